"""Clamped planar B-spline curves: basis functions, curve evaluation,
derivatives, and structural validation.

Conventions
-----------
* Image coordinates: x grows rightward, y grows downward, pixel units.
* The parameter domain is [0, 1]; valid knot vectors start at exactly 0.0
  and end at exactly 1.0.
* Degree-0 basis spans are half-open [u_i, u_{i+1}), except that the last
  non-empty span is closed at u = 1 so a clamped curve reaches its final
  control point.
* Zero denominators in the basis recursion contribute zero terms.
* Evaluation at an interior knot of multiplicity > 1 uses the
  right-continuous span (the span starting at that knot).

All curve math is done in 64-bit floats.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


class BSplineError(ValueError):
    """Structurally invalid curve, knot vector, index, or parameter."""


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of structural validation; `violations` is empty when `ok`."""

    ok: bool
    violations: tuple[str, ...]


@dataclass(frozen=True)
class CurvePoint:
    """A curve location paired with the parameter that produced it."""

    u: float
    position: tuple[float, float]


@dataclass(frozen=True)
class BSplineCurve:
    """Planar B-spline defined by degree, control points, and knot vector.

    Immutable value type. For a consistent curve the knot count equals
    control-point count + degree + 1. Use :func:`validate` to obtain a
    violation report instead of an exception.
    """

    degree: int
    control_points: tuple[tuple[float, float], ...]
    knots: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "degree", int(self.degree))
        object.__setattr__(
            self,
            "control_points",
            tuple((float(p[0]), float(p[1])) for p in self.control_points),
        )
        object.__setattr__(self, "knots", tuple(float(k) for k in self.knots))

    @property
    def n(self) -> int:
        """Index of the last control point."""
        return len(self.control_points) - 1

    @property
    def m(self) -> int:
        """Index of the last knot."""
        return len(self.knots) - 1

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "control_points": [list(p) for p in self.control_points],
            "knots": list(self.knots),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BSplineCurve":
        try:
            return cls(data["degree"], data["control_points"], data["knots"])
        except (KeyError, TypeError) as exc:
            raise BSplineError(f"malformed curve data: {exc}") from exc

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def loads(cls, text: str) -> "BSplineCurve":
        return cls.from_dict(json.loads(text))


def validate_knots(knots) -> list[str]:
    """Check the unconditional knot-vector invariants, returning violations."""
    knots = [float(k) for k in knots]
    violations = []
    if len(knots) < 2:
        violations.append(f"knot vector needs at least 2 entries, got {len(knots)}")
        return violations
    for j in range(len(knots) - 1):
        if knots[j] > knots[j + 1]:
            violations.append(
                f"knots must be non-decreasing: knots[{j}]={knots[j]!r} > "
                f"knots[{j + 1}]={knots[j + 1]!r}"
            )
            break
    if knots[0] != 0.0:
        violations.append(f"first knot must be exactly 0, got {knots[0]!r}")
    if knots[-1] != 1.0:
        violations.append(f"last knot must be exactly 1, got {knots[-1]!r}")
    return violations


def validate(curve: BSplineCurve) -> ValidationReport:
    """Report every structural violation of a (clamped) curve.

    Checks the count relation between knots, control points and degree, the
    knot ordering and range, and the end-knot multiplicity required for a
    clamped curve. Never raises; returns a report.
    """
    violations = []
    p = curve.degree
    n_pts = len(curve.control_points)
    n_knots = len(curve.knots)
    if p < 0:
        violations.append(f"degree must be non-negative, got {p}")
    if n_pts < p + 1:
        violations.append(
            f"need at least degree+1={p + 1} control points, got {n_pts}"
        )
    if n_knots != n_pts + p + 1:
        violations.append(
            f"knot count mismatch: {n_knots} knots for {n_pts} control points of "
            f"degree {p} (expected {n_pts + p + 1})"
        )
    violations.extend(validate_knots(curve.knots))
    if n_knots >= 2 * (p + 1) and p >= 0:
        if any(k != 0.0 for k in curve.knots[: p + 1]):
            violations.append(
                f"clamped curve of degree {p} needs its first {p + 1} knots all 0"
            )
        if any(k != 1.0 for k in curve.knots[n_knots - (p + 1):]):
            violations.append(
                f"clamped curve of degree {p} needs its last {p + 1} knots all 1"
            )
    return ValidationReport(not violations, tuple(violations))


def _require_valid(curve: BSplineCurve) -> None:
    report = validate(curve)
    if not report.ok:
        raise BSplineError("invalid curve: " + "; ".join(report.violations))


def _require_param(u: float) -> float:
    u = float(u)
    if not 0.0 <= u <= 1.0:
        raise BSplineError(f"parameter {u!r} outside [0, 1]; no extrapolation")
    return u


def _basis_recursive(i: int, p: int, u: float, knots) -> float:
    # Literal two-term recursion; 0/0 terms contribute 0, and the last
    # non-empty degree-0 span is closed at the final knot value.
    if p == 0:
        if knots[i] <= u < knots[i + 1]:
            return 1.0
        if u == knots[-1] and knots[i] < knots[i + 1] == knots[-1]:
            return 1.0
        return 0.0
    total = 0.0
    den = knots[i + p] - knots[i]
    if den > 0.0:
        total += (u - knots[i]) / den * _basis_recursive(i, p - 1, u, knots)
    den = knots[i + p + 1] - knots[i + 1]
    if den > 0.0:
        total += (knots[i + p + 1] - u) / den * _basis_recursive(i + 1, p - 1, u, knots)
    return total


def basis(i: int, p: int, u: float, knots) -> float:
    """Evaluate the degree-p basis function with index i at parameter u.

    Args:
        i: Basis index, 0 <= i <= len(knots) - p - 2.
        p: Degree, non-negative.
        u: Parameter in [0, 1].
        knots: Valid knot vector (non-decreasing, spanning exactly [0, 1]).

    Returns:
        The basis value, always in [0, 1].
    """
    knots = tuple(float(k) for k in knots)
    problems = validate_knots(knots)
    if problems:
        raise BSplineError("invalid knot vector: " + "; ".join(problems))
    if p < 0:
        raise BSplineError(f"degree must be non-negative, got {p}")
    if not 0 <= i <= len(knots) - p - 2:
        raise BSplineError(
            f"basis index {i} out of range [0, {len(knots) - p - 2}] for "
            f"{len(knots)} knots of degree {p}"
        )
    return _basis_recursive(i, p, _require_param(u), knots)


def _find_span(degree: int, knots: np.ndarray, u) -> np.ndarray:
    # Right-continuous span lookup, clipped so u=1 lands on the last
    # non-degenerate span of a clamped vector.
    last = len(knots) - degree - 2
    span = np.searchsorted(knots, u, side="right") - 1
    return np.clip(span, degree, last)


def basis_matrix(degree: int, knots, us) -> np.ndarray:
    """Evaluate all basis functions at many parameters at once.

    Returns an array of shape (len(us), n_basis) whose rows each sum to 1
    on a clamped knot vector. This is the bulk evaluation path used for
    fitting matrices and dense curve sampling.
    """
    knots = np.asarray(knots, dtype=float)
    us = np.atleast_1d(np.asarray(us, dtype=float))
    p = int(degree)
    n_basis = len(knots) - p - 1
    spans = _find_span(p, knots, us)
    count = len(us)
    # Triangular scheme over the p+1 non-vanishing functions per parameter.
    values = np.zeros((count, p + 1))
    values[:, 0] = 1.0
    left = np.zeros((count, p + 1))
    right = np.zeros((count, p + 1))
    for j in range(1, p + 1):
        left[:, j] = us - knots[spans + 1 - j]
        right[:, j] = knots[spans + j] - us
        saved = np.zeros(count)
        for r in range(j):
            den = right[:, r + 1] + left[:, j - r]
            safe = np.where(den == 0.0, 1.0, den)
            temp = np.where(den == 0.0, 0.0, values[:, r] / safe)
            values[:, r] = saved + right[:, r + 1] * temp
            saved = left[:, j - r] * temp
        values[:, j] = saved
    matrix = np.zeros((count, n_basis))
    rows = np.repeat(np.arange(count), p + 1)
    cols = (spans[:, None] - p + np.arange(p + 1)[None, :]).ravel()
    matrix[rows, cols] = values.ravel()
    return matrix


def evaluate(curve: BSplineCurve, u: float) -> np.ndarray:
    """Evaluate the curve at u via the de Boor pyramid (fast path)."""
    _require_valid(curve)
    u = _require_param(u)
    p = curve.degree
    knots = curve.knots
    span = int(_find_span(p, np.asarray(knots), u))
    stages = [np.array(curve.control_points[span - p + j]) for j in range(p + 1)]
    for r in range(1, p + 1):
        for j in range(p, r - 1, -1):
            i = span - p + j
            den = knots[i + p - r + 1] - knots[i]
            alpha = 0.0 if den == 0.0 else (u - knots[i]) / den
            stages[j] = (1.0 - alpha) * stages[j - 1] + alpha * stages[j]
    return stages[p]


def evaluate_naive(curve: BSplineCurve, u: float) -> np.ndarray:
    """Evaluate the curve as the plain basis-weighted control-point sum.

    Reference implementation kept deliberately independent from
    :func:`evaluate`; the two are cross-checked in the test suite.
    """
    _require_valid(curve)
    u = _require_param(u)
    point = np.zeros(2)
    for i, ctrl in enumerate(curve.control_points):
        b = _basis_recursive(i, curve.degree, u, curve.knots)
        if b != 0.0:
            point += b * np.asarray(ctrl)
    return point


def evaluate_many(curve: BSplineCurve, us) -> np.ndarray:
    """Evaluate the curve at an array of parameters, returning (N, 2)."""
    _require_valid(curve)
    us = np.atleast_1d(np.asarray(us, dtype=float))
    if us.size and (us.min() < 0.0 or us.max() > 1.0):
        raise BSplineError("parameters outside [0, 1]; no extrapolation")
    matrix = basis_matrix(curve.degree, curve.knots, us)
    return matrix @ np.asarray(curve.control_points, dtype=float)


def derivative_curve(curve: BSplineCurve) -> BSplineCurve:
    """Build the degree-(p-1) curve representing dC/du."""
    _require_valid(curve)
    p = curve.degree
    if p == 0:
        raise BSplineError("degree-0 curve has no derivative curve")
    points = np.asarray(curve.control_points, dtype=float)
    knots = curve.knots
    diffs = []
    for i in range(len(points) - 1):
        den = knots[i + p + 1] - knots[i + 1]
        if den > 0.0:
            diffs.append(p / den * (points[i + 1] - points[i]))
        else:
            diffs.append(np.zeros(2))
    return BSplineCurve(p - 1, [tuple(d) for d in diffs], knots[1:-1])


def derivative(curve: BSplineCurve, u: float) -> np.ndarray:
    """First derivative dC/du at u, from the derivative B-spline."""
    return evaluate(derivative_curve(curve), u)


def make_clamped(control_points, degree: int, interior_knots=()) -> BSplineCurve:
    """Assemble a clamped curve from control points and interior knots.

    The full knot vector gets multiplicity degree+1 at both ends; the
    number of interior knots must equal len(control_points) - degree - 1.
    """
    control_points = [(float(p[0]), float(p[1])) for p in control_points]
    degree = int(degree)
    interior = [float(k) for k in interior_knots]
    n = len(control_points) - 1
    expected = n - degree
    if expected < 0:
        raise BSplineError(
            f"{n + 1} control points cannot carry degree {degree} "
            f"(need at least {degree + 1})"
        )
    if len(interior) != expected:
        raise BSplineError(
            f"expected {expected} interior knots for {n + 1} control points of "
            f"degree {degree}, got {len(interior)}"
        )
    for j, k in enumerate(interior):
        if not 0.0 < k < 1.0:
            raise BSplineError(f"interior knot [{j}]={k!r} must lie strictly in (0, 1)")
        if j and interior[j - 1] > k:
            raise BSplineError(
                f"interior knots must be non-decreasing: [{j - 1}]={interior[j - 1]!r} "
                f"> [{j}]={k!r}"
            )
    knots = (0.0,) * (degree + 1) + tuple(interior) + (1.0,) * (degree + 1)
    return BSplineCurve(degree, control_points, knots)


def uniform_interior_knots(n_control: int, degree: int) -> tuple[float, ...]:
    """Evenly spaced interior knots for a clamped vector."""
    count = n_control - 1 - degree
    if count < 0:
        raise BSplineError(
            f"{n_control} control points cannot carry degree {degree}"
        )
    return tuple(j / (count + 1) for j in range(1, count + 1))
