"""End-to-end composition: mask -> centerline -> fitted curve -> angles,
with one config object shared by the CLI and the HTTP service.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bspline import BSplineCurve
from .cobb import (
    AngleTriple,
    HybridWeights,
    SlopeSample,
    cobb_from_slopes,
    hybrid_combine,
    slopes,
)
from .fitting import FitConfig, fit_clamped_bspline, resample
from .mask import BinaryMask, clean_mask, extract_centerline


@dataclass(frozen=True)
class PipelineConfig:
    """Defaults mirror the production settings: cubic curve with 10 control
    points and 14 knots, slope offset 5e-2, 17 slope samples, 34 resampled
    centerline points, blend weights 0.4/0.5/0.5."""

    fit: FitConfig = FitConfig()
    epsilon: float = 5e-2
    sample_count: int = 17
    resample_count: int = 34
    extract_count: int = 17
    alpha: HybridWeights = HybridWeights()

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon {self.epsilon!r} must lie in (0, 1)")
        if self.sample_count < 2:
            raise ValueError("sample_count must be at least 2")
        if self.resample_count < 2:
            raise ValueError("resample_count must be at least 2")
        if self.extract_count < 2:
            raise ValueError("extract_count must be at least 2")

    def to_dict(self) -> dict:
        return {
            "fit": self.fit.to_dict(),
            "epsilon": self.epsilon,
            "sample_count": self.sample_count,
            "resample_count": self.resample_count,
            "extract_count": self.extract_count,
            "alpha": self.alpha.to_dict(),
        }

    @classmethod
    def from_dict(
        cls, data: dict, base: "PipelineConfig | None" = None
    ) -> "PipelineConfig":
        base = base or cls()
        known = {
            "fit", "epsilon", "sample_count", "resample_count",
            "extract_count", "alpha",
        }
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        fit = FitConfig.from_dict(data.get("fit", {}), base=base.fit)
        alpha = (
            HybridWeights.from_dict(data["alpha"]) if "alpha" in data else base.alpha
        )
        return cls(
            fit=fit,
            epsilon=float(data.get("epsilon", base.epsilon)),
            sample_count=int(data.get("sample_count", base.sample_count)),
            resample_count=int(data.get("resample_count", base.resample_count)),
            extract_count=int(data.get("extract_count", base.extract_count)),
            alpha=alpha,
        )


@dataclass(frozen=True)
class CurveAnalysis:
    """Everything derived from one fitted centerline curve."""

    curve: BSplineCurve
    centerline: np.ndarray
    slope_samples: list[SlopeSample]
    slope_angles: AngleTriple
    angles: AngleTriple


def centerline_from_mask(mask: BinaryMask, config: PipelineConfig) -> np.ndarray:
    """Clean the mask and extract the configured number of centerline points."""
    return extract_centerline(clean_mask(mask), config.extract_count)


def analyze_curve(
    curve: BSplineCurve,
    config: PipelineConfig,
    regression: AngleTriple | None = None,
) -> CurveAnalysis:
    """Slope analysis of a curve, optionally blended with regression angles.

    Without regression angles the final triple is the slope-based one
    (blend weight effectively 1).
    """
    samples = slopes(curve, epsilon=config.epsilon, count=config.sample_count)
    slope_triple = cobb_from_slopes(samples)
    if regression is None:
        final = slope_triple
    else:
        final = hybrid_combine(slope_triple, regression, config.alpha)
    return CurveAnalysis(
        curve=curve,
        centerline=resample(curve, config.resample_count),
        slope_samples=samples,
        slope_angles=slope_triple,
        angles=final,
    )


def analyze_points(
    points,
    config: PipelineConfig,
    regression: AngleTriple | None = None,
) -> CurveAnalysis:
    """Fit a curve to centerline points and run the slope analysis."""
    curve = fit_clamped_bspline(points, config.fit)
    return analyze_curve(curve, config, regression)


def analyze_mask(
    mask: BinaryMask,
    config: PipelineConfig,
    regression: AngleTriple | None = None,
) -> CurveAnalysis:
    """Full pipeline from a raw binary mask to Cobb angles."""
    points = centerline_from_mask(mask, config)
    return analyze_points(points, config, regression)


def analysis_to_dict(analysis: CurveAnalysis) -> dict:
    """JSON-ready view of a CurveAnalysis."""
    return {
        "curve": analysis.curve.to_dict(),
        "centerline": [[float(x), float(y)] for x, y in analysis.centerline],
        "slope_samples": [
            {
                "index": s.index,
                "u": s.u,
                "position": [s.position[0], s.position[1]],
                "slope": s.slope,
            }
            for s in analysis.slope_samples
        ],
        "slope_angles": analysis.slope_angles.to_dict(),
        "angles": analysis.angles.to_dict(),
    }
