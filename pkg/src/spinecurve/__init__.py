"""Spinal curvature estimation from binary spine masks via clamped
B-spline centerlines."""

from .bspline import (
    BSplineCurve,
    BSplineError,
    CurvePoint,
    ValidationReport,
    basis,
    basis_matrix,
    derivative,
    derivative_curve,
    evaluate,
    evaluate_many,
    evaluate_naive,
    make_clamped,
    uniform_interior_knots,
    validate,
)
from .cobb import (
    AngleTriple,
    CobbError,
    EvalRecord,
    HybridWeights,
    SlopeSample,
    angle_between_slopes,
    cobb_from_slopes,
    hybrid_combine,
    mae,
    sample_equal_arclength,
    slopes,
    smape,
)
from .fitting import (
    FitConfig,
    FitError,
    LossWeights,
    combined_loss,
    fit_clamped_bspline,
    init_loss,
    parameterize,
    paras_loss,
    resample,
    resample_loss,
)
from .mask import (
    BinaryMask,
    ContourAnnotation,
    ContourError,
    MaskError,
    clean_mask,
    contour_to_mask,
    extract_centerline,
    load_mask,
    mask_to_contour,
    save_mask,
)
from .pipeline import (
    CurveAnalysis,
    PipelineConfig,
    analyze_curve,
    analyze_mask,
    analyze_points,
    centerline_from_mask,
)

__version__ = "0.1.0"
