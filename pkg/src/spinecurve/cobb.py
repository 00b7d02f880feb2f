"""Cobb angle estimation from a B-spline centerline.

The curve is sampled at equal arc-length steps, rotated a quarter turn
anticlockwise so the spine runs along x, and per-sample slopes are taken
from a small forward parameter offset. MT comes from the global
maximum/minimum slopes; PT and TL repeat the search on the head side and
tail side of the MT pair. Also provides the hybrid blend with externally
supplied regression angles and the MAE/SMAPE evaluation metrics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bspline import BSplineCurve, CurvePoint, evaluate, evaluate_many, validate

ANGLE_KEYS = ("mt", "pt", "tl")

# Dense polyline resolution for arc-length quadrature.
ARCLENGTH_SEGMENTS = 4096


class CobbError(ValueError):
    """Degenerate curve, slope, or metric input."""


@dataclass(frozen=True)
class SlopeSample:
    """Equal-arc-length curve sample with its rotated-frame slope."""

    index: int
    u: float
    position: tuple[float, float]
    slope: float


@dataclass(frozen=True)
class AngleTriple:
    """MT/PT/TL angles in degrees with optional sample-index provenance.

    Provenance maps an angle key to the ordered pair of slope-sample
    indices whose slopes produced it; regression-sourced triples carry
    none.
    """

    mt: float
    pt: float
    tl: float
    provenance: dict[str, tuple[int, int]] = field(default_factory=dict)

    def __post_init__(self):
        for key in ANGLE_KEYS:
            value = getattr(self, key)
            if not 0.0 <= value < 180.0:
                raise CobbError(f"{key} angle {value!r} outside [0, 180)")
        cleaned = {}
        for key, pair in (self.provenance or {}).items():
            if key not in ANGLE_KEYS:
                raise CobbError(f"unknown provenance key {key!r}")
            i, j = int(pair[0]), int(pair[1])
            if i == j or i < 0 or j < 0:
                raise CobbError(
                    f"provenance for {key} must be two distinct non-negative "
                    f"indices, got ({i}, {j})"
                )
            cleaned[key] = (i, j)
        object.__setattr__(self, "provenance", cleaned)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.mt, self.pt, self.tl)

    def to_dict(self) -> dict:
        out = {"mt": self.mt, "pt": self.pt, "tl": self.tl}
        if self.provenance:
            out["provenance"] = {k: list(v) for k, v in self.provenance.items()}
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "AngleTriple":
        try:
            provenance = {
                k: (int(v[0]), int(v[1]))
                for k, v in (data.get("provenance") or {}).items()
            }
            return cls(
                float(data["mt"]), float(data["pt"]), float(data["tl"]), provenance
            )
        except (KeyError, TypeError) as exc:
            raise CobbError(f"malformed angle data: {exc}") from exc


@dataclass(frozen=True)
class HybridWeights:
    """Per-angle blend weight for slope-based vs regression-based angles."""

    alpha_mt: float = 0.4
    alpha_pt: float = 0.5
    alpha_tl: float = 0.5

    def __post_init__(self):
        for name in ("alpha_mt", "alpha_pt", "alpha_tl"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise CobbError(f"{name}={value!r} must lie in [0, 1]")

    def to_dict(self) -> dict:
        return {"mt": self.alpha_mt, "pt": self.alpha_pt, "tl": self.alpha_tl}

    @classmethod
    def from_dict(cls, data: dict) -> "HybridWeights":
        return cls(
            float(data.get("mt", 0.4)),
            float(data.get("pt", 0.5)),
            float(data.get("tl", 0.5)),
        )


@dataclass(frozen=True)
class EvalRecord:
    """One evaluation case: predicted vs ground-truth angle triples."""

    predicted: AngleTriple
    ground_truth: AngleTriple


def _rotate_quarter_turns(x: float, y: float, turns: int) -> tuple[float, float]:
    # Anticlockwise quarter turn in image coordinates: (x, y) -> (y, -x).
    for _ in range(turns % 4):
        x, y = y, -x
    return x, y


def curve_arclength_table(curve: BSplineCurve, segments: int = ARCLENGTH_SEGMENTS):
    """Dense parameter grid and cumulative polyline arc length along it."""
    us = np.linspace(0.0, 1.0, segments + 1)
    pts = evaluate_many(curve, us)
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    cumulative = np.concatenate([[0.0], np.cumsum(seg)])
    return us, cumulative


def sample_equal_arclength(curve: BSplineCurve, count: int = 17) -> list[CurvePoint]:
    """Pick `count` parameters whose curve points are equally spaced by
    arc length, endpoints included.

    Arc length is measured on a dense polyline (4096 segments) and
    inverted by monotone interpolation.
    """
    count = int(count)
    if count < 2:
        raise CobbError(f"need at least 2 samples, got {count}")
    report = validate(curve)
    if not report.ok:
        raise CobbError("invalid curve: " + "; ".join(report.violations))
    us, cumulative = curve_arclength_table(curve)
    total = float(cumulative[-1])
    if total <= 0.0:
        raise CobbError("zero-length curve")
    targets = np.linspace(0.0, total, count)
    params = np.interp(targets, cumulative, us)
    params[0] = 0.0
    params[-1] = 1.0
    positions = evaluate_many(curve, params)
    return [
        CurvePoint(float(u), (float(p[0]), float(p[1])))
        for u, p in zip(params, positions)
    ]


def slopes(
    curve: BSplineCurve,
    epsilon: float = 5e-2,
    count: int = 17,
    rotation_quarter_turns: int = 1,
) -> list[SlopeSample]:
    """Equal-arc-length samples with slopes in the rotated frame.

    Each sample S_i at parameter u_i is paired with a neighbour at
    u_i + epsilon (or u_i - epsilon when that would leave [0, 1], which
    preserves the difference-quotient sign). Both points are rotated
    `rotation_quarter_turns` quarter turns anticlockwise — one turn by
    default, which maps a y-spanning spine onto the x axis so slopes stay
    finite — and the slope is the rotated-frame difference quotient.
    Stored positions remain in the original image frame.
    """
    epsilon = float(epsilon)
    if not 0.0 < epsilon < 1.0:
        raise CobbError(f"epsilon {epsilon!r} must lie strictly between 0 and 1")
    samples = sample_equal_arclength(curve, count)
    out = []
    for index, sample in enumerate(samples):
        u = sample.u
        u_near = u + epsilon if u + epsilon <= 1.0 else u - epsilon
        near = evaluate(curve, u_near)
        ax, ay = _rotate_quarter_turns(*sample.position, rotation_quarter_turns)
        bx, by = _rotate_quarter_turns(near[0], near[1], rotation_quarter_turns)
        dx = bx - ax
        if abs(dx) < 1e-12:
            raise CobbError(
                f"vertical tangent in rotated frame at sample {index} (u={u:.4f})"
            )
        out.append(SlopeSample(index, u, sample.position, (by - ay) / dx))
    return out


def angle_between_slopes(a: float, b: float) -> float:
    """Acute angle in degrees between lines of slope a and b; 90 when the
    denominator 1 + a*b vanishes."""
    den = 1.0 + a * b
    if den == 0.0:
        return 90.0
    return math.degrees(abs(math.atan((a - b) / den)))


def _extreme_pair(values: np.ndarray, offset: int):
    imax = int(np.argmax(values)) + offset
    imin = int(np.argmin(values)) + offset
    return imax, imin


def _restricted_angle(all_slopes: np.ndarray, start: int, stop: int):
    # Search over samples [start, stop] inclusive; fewer than two samples
    # (or all-equal slopes) degrade to angle 0 with no provenance.
    if stop - start + 1 < 2:
        return 0.0, None
    window = all_slopes[start: stop + 1]
    imax, imin = _extreme_pair(window, start)
    if imax == imin:
        return 0.0, None
    angle = angle_between_slopes(all_slopes[imax], all_slopes[imin])
    return angle, (min(imax, imin), max(imax, imin))


def cobb_from_slopes(samples: list[SlopeSample]) -> AngleTriple:
    """Slope-based MT/PT/TL from ordered samples (head first).

    MT uses the global max/min slopes. PT repeats the search on samples at
    or before the MT pair's first index; TL on samples at or after its
    last index (the MT boundary samples are included). A restricted search
    with fewer than two samples yields 0 with empty provenance.
    """
    if len(samples) < 2:
        raise CobbError(f"need at least 2 slope samples, got {len(samples)}")
    values = np.asarray([s.slope for s in samples])
    imax, imin = _extreme_pair(values, 0)
    provenance = {}
    if imax != imin:
        mt = angle_between_slopes(values[imax], values[imin])
        provenance["mt"] = (min(imax, imin), max(imax, imin))
        lo, hi = provenance["mt"]
    else:
        mt = 0.0
        lo = hi = imax
    pt, pt_pair = _restricted_angle(values, 0, lo)
    tl, tl_pair = _restricted_angle(values, hi, len(values) - 1)
    if pt_pair:
        provenance["pt"] = pt_pair
    if tl_pair:
        provenance["tl"] = tl_pair
    return AngleTriple(mt, pt, tl, provenance)


def hybrid_combine(
    slope_angles: AngleTriple,
    regression_angles: AngleTriple,
    weights: HybridWeights | None = None,
) -> AngleTriple:
    """Per-angle convex blend alpha*slope + (1-alpha)*regression.

    Provenance is copied from the slope triple, which is the side that
    carries the interpretable sample indices.
    """
    w = weights or HybridWeights()
    alphas = (w.alpha_mt, w.alpha_pt, w.alpha_tl)
    blended = {
        key: alpha * getattr(slope_angles, key)
        + (1.0 - alpha) * getattr(regression_angles, key)
        for key, alpha in zip(ANGLE_KEYS, alphas)
    }
    return AngleTriple(
        blended["mt"], blended["pt"], blended["tl"], dict(slope_angles.provenance)
    )


def mae(records: list[EvalRecord], angle: str) -> float:
    """Mean absolute error in degrees for one angle across records."""
    if angle not in ANGLE_KEYS:
        raise CobbError(f"unknown angle {angle!r}; expected one of {ANGLE_KEYS}")
    if not records:
        raise CobbError("no evaluation records")
    errors = [
        abs(getattr(r.predicted, angle) - getattr(r.ground_truth, angle))
        for r in records
    ]
    return float(np.mean(errors))


def smape(records: list[EvalRecord]) -> float:
    """Symmetric mean absolute percent error over the three angles.

    Per record the absolute errors and the angle sums are each summed over
    MT/PT/TL before dividing; the ratios are averaged and scaled to
    percent.
    """
    if not records:
        raise CobbError("no evaluation records")
    ratios = []
    for index, record in enumerate(records):
        numerator = sum(
            abs(getattr(record.ground_truth, k) - getattr(record.predicted, k))
            for k in ANGLE_KEYS
        )
        denominator = sum(
            getattr(record.ground_truth, k) + getattr(record.predicted, k)
            for k in ANGLE_KEYS
        )
        if denominator <= 0.0:
            raise CobbError(f"record {index}: angle sums are zero, SMAPE undefined")
        ratios.append(numerator / denominator)
    return 100.0 * float(np.mean(ratios))
