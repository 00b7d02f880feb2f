"""Least-squares fitting of clamped cubic B-splines to ordered centerline
points, curve resampling, and point/parameter/resample quality functionals.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .bspline import (
    BSplineCurve,
    basis_matrix,
    evaluate_many,
    make_clamped,
    uniform_interior_knots,
    validate,
)

KNOT_STRATEGIES = ("uniform", "averaging")
PARAMETERIZATIONS = ("uniform", "chord_length")

# Conditioning thresholds for the normal equations.
_COND_WARN = 1e10
_COND_FAIL = 1e14


class FitError(ValueError):
    """Bad fitting input: too few points, degenerate layout, bad config."""


@dataclass(frozen=True)
class FitConfig:
    """Fitting parameters. Defaults: cubic, 10 control points (14 knots),
    knot averaging, chord-length parameters."""

    n_control: int = 10
    degree: int = 3
    knot_strategy: str = "averaging"
    parameterization: str = "chord_length"

    def __post_init__(self):
        if self.n_control < self.degree + 1:
            raise FitError(
                f"n_control={self.n_control} must be at least degree+1="
                f"{self.degree + 1}"
            )
        if self.knot_strategy not in KNOT_STRATEGIES:
            raise FitError(f"unknown knot_strategy {self.knot_strategy!r}")
        if self.parameterization not in PARAMETERIZATIONS:
            raise FitError(f"unknown parameterization {self.parameterization!r}")

    def to_dict(self) -> dict:
        return {
            "n_control": self.n_control,
            "degree": self.degree,
            "knot_strategy": self.knot_strategy,
            "parameterization": self.parameterization,
        }

    @classmethod
    def from_dict(cls, data: dict, base: "FitConfig | None" = None) -> "FitConfig":
        base = base or cls()
        merged = base.to_dict()
        unknown = set(data) - set(merged)
        if unknown:
            raise FitError(f"unknown fit config keys: {sorted(unknown)}")
        merged.update(data)
        return cls(**merged)


@dataclass(frozen=True)
class LossWeights:
    """Weights for the combined curve-quality functional."""

    lambda_init: float = 1.0
    lambda_paras: float = 0.1
    lambda_resample: float = 0.1

    def __post_init__(self):
        for name in ("lambda_init", "lambda_paras", "lambda_resample"):
            if getattr(self, name) < 0:
                raise FitError(f"{name} must be non-negative")


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise FitError(f"expected an (N, 2) point array, got shape {pts.shape}")
    return pts


def parameterize(points, strategy: str = "chord_length") -> np.ndarray:
    """Assign strictly increasing parameters in [0, 1] to ordered points.

    chord_length makes parameter steps proportional to polyline segment
    lengths; zero-length segments fall back to the mean segment length
    (with a warning) so the result stays strictly increasing.
    """
    pts = _as_points(points)
    if len(pts) < 2:
        raise FitError(f"need at least 2 points to parameterize, got {len(pts)}")
    if strategy == "uniform":
        return np.linspace(0.0, 1.0, len(pts))
    if strategy != "chord_length":
        raise FitError(f"unknown parameterization {strategy!r}")
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    if np.any(seg == 0.0):
        warnings.warn(
            "duplicate consecutive points; using uniform spacing for "
            "zero-length spans",
            RuntimeWarning,
            stacklevel=2,
        )
        nonzero = seg[seg > 0.0]
        filler = float(nonzero.mean()) if nonzero.size else 1.0
        seg = np.where(seg == 0.0, filler, seg)
    t = np.concatenate([[0.0], np.cumsum(seg)])
    t /= t[-1]
    t[0] = 0.0
    t[-1] = 1.0
    return t


def averaged_interior_knots(params, n_control: int, degree: int) -> tuple[float, ...]:
    """Place interior knots by parameter averaging.

    Each knot is a convex combination of neighbouring fitting parameters,
    which keeps every knot span populated with data and the normal
    equations well conditioned.
    """
    params = np.asarray(params, dtype=float)
    n = n_control - 1
    count = n - degree
    if count <= 0:
        return ()
    stride = len(params) / (n - degree + 1)
    out = []
    for j in range(1, count + 1):
        pos = j * stride
        i = int(pos)
        alpha = pos - i
        out.append(float((1.0 - alpha) * params[i - 1] + alpha * params[i]))
    return tuple(out)


def fit_clamped_bspline(points, config: FitConfig | None = None) -> BSplineCurve:
    """Fit a clamped B-spline to ordered centerline points.

    The first and last control points are pinned to the first and last
    input points; the interior control points solve the least-squares
    normal equations for the assembled clamped knot vector.

    Args:
        points: (N, 2) ordered points, N >= config.n_control.
        config: Fit parameters; defaults to FitConfig().

    Returns:
        The fitted curve.

    Raises:
        FitError: too few points, or a point layout that leaves the
            normal equations rank-deficient.
    """
    config = config or FitConfig()
    pts = _as_points(points)
    if len(pts) < config.n_control:
        raise FitError(
            f"need at least {config.n_control} points to fit "
            f"{config.n_control} control points, got {len(pts)}"
        )
    params = parameterize(pts, config.parameterization)
    if config.knot_strategy == "uniform":
        interior = uniform_interior_knots(config.n_control, config.degree)
    else:
        interior = averaged_interior_knots(params, config.n_control, config.degree)
    knots = (0.0,) * (config.degree + 1) + interior + (1.0,) * (config.degree + 1)
    matrix = basis_matrix(config.degree, knots, params)

    first, last = pts[0], pts[-1]
    inner = matrix[:, 1:-1]
    if inner.shape[1] == 0:
        controls = np.vstack([first, last])
        return make_clamped(controls, config.degree, interior)
    rhs = pts - np.outer(matrix[:, 0], first) - np.outer(matrix[:, -1], last)
    gram = inner.T @ inner
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > _COND_FAIL:
        raise FitError(
            f"rank-deficient normal equations (condition estimate {cond:.3g}); "
            "the point layout leaves some control points undetermined"
        )
    if cond > _COND_WARN:
        warnings.warn(
            f"ill-conditioned fit: normal-equation condition estimate {cond:.3g}",
            RuntimeWarning,
            stacklevel=2,
        )
    try:
        factor = scipy.linalg.cho_factor(gram)
        free = scipy.linalg.cho_solve(factor, inner.T @ rhs)
    except np.linalg.LinAlgError as exc:
        raise FitError(f"rank-deficient normal equations: {exc}") from exc
    controls = np.vstack([first, free, last])
    return make_clamped(controls, config.degree, interior)


def resample(curve: BSplineCurve, count: int) -> np.ndarray:
    """Evaluate the curve at `count` uniformly spaced parameters in [0, 1]."""
    count = int(count)
    if count < 2:
        raise FitError(f"resample needs count >= 2, got {count}")
    return evaluate_many(curve, np.linspace(0.0, 1.0, count))


def init_loss(pred, gt) -> float:
    """Mean squared point distance between two equally sized point lists."""
    a = _as_points(pred)
    b = _as_points(gt)
    if a.shape != b.shape:
        raise FitError(f"point count mismatch: {a.shape[0]} vs {b.shape[0]}")
    return float(np.mean(np.sum((a - b) ** 2, axis=1)))


def paras_loss(pred: BSplineCurve, gt: BSplineCurve) -> float:
    """Mean squared control-point distance plus mean squared free-knot
    difference (the clamped end knots are fixed and excluded)."""
    for curve, label in ((pred, "predicted"), (gt, "reference")):
        report = validate(curve)
        if not report.ok:
            raise FitError(f"invalid {label} curve: " + "; ".join(report.violations))
    if pred.degree != gt.degree:
        raise FitError(f"degree mismatch: {pred.degree} vs {gt.degree}")
    if len(pred.control_points) != len(gt.control_points):
        raise FitError(
            f"control-point count mismatch: {len(pred.control_points)} vs "
            f"{len(gt.control_points)}"
        )
    p = pred.degree
    a = np.asarray(pred.control_points)
    b = np.asarray(gt.control_points)
    point_term = float(np.mean(np.sum((a - b) ** 2, axis=1)))
    free_a = np.asarray(pred.knots[p + 1: len(pred.knots) - (p + 1)])
    free_b = np.asarray(gt.knots[p + 1: len(gt.knots) - (p + 1)])
    knot_term = float(np.mean((free_a - free_b) ** 2)) if free_a.size else 0.0
    return point_term + knot_term


def resample_loss(curve: BSplineCurve, gt) -> float:
    """Mean squared distance between uniform-parameter curve samples and
    reference points generated at the same parameters."""
    ref = _as_points(gt)
    if len(ref) < 2:
        raise FitError(f"need at least 2 reference points, got {len(ref)}")
    sampled = resample(curve, len(ref))
    return float(np.mean(np.sum((sampled - ref) ** 2, axis=1)))


def combined_loss(
    pred_points,
    pred_curve: BSplineCurve,
    gt_points,
    gt_curve: BSplineCurve,
    weights: LossWeights | None = None,
) -> float:
    """Weighted sum of the three curve-quality functionals."""
    w = weights or LossWeights()
    return (
        w.lambda_init * init_loss(pred_points, gt_points)
        + w.lambda_paras * paras_loss(pred_curve, gt_curve)
        + w.lambda_resample * resample_loss(pred_curve, gt_points)
    )
