"""Shared fixtures and synthetic-spine helpers."""

import math

import numpy as np
import pytest

from spinecurve.bspline import make_clamped, uniform_interior_knots
from spinecurve.mask import BinaryMask


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)


def random_interior_knots(rng, n_control, degree):
    count = n_control - 1 - degree
    return tuple(np.sort(rng.uniform(0.08, 0.92, count)))


def random_clamped_cubic(rng, n_control=10, degree=3, box=(256.0, 512.0),
                         uniform_knots=False):
    """Random clamped curve with control points shaped like a spine walk."""
    if uniform_knots:
        interior = uniform_interior_knots(n_control, degree)
    else:
        interior = random_interior_knots(rng, n_control, degree)
    x = rng.uniform(0.15 * box[0], 0.85 * box[0], n_control)
    y = np.sort(rng.uniform(0.0, box[1], n_control))
    return make_clamped(np.column_stack([x, y]), degree, interior)


def straight_segment_curve(start, end, n_control=10, degree=3):
    """Exactly linear-in-u curve: control points at the Greville abscissae
    of a uniform clamped knot vector, so C(u) = start + u * (end - start)."""
    interior = uniform_interior_knots(n_control, degree)
    knots = (0.0,) * (degree + 1) + interior + (1.0,) * (degree + 1)
    start = np.asarray(start, float)
    end = np.asarray(end, float)
    controls = []
    for i in range(n_control):
        greville = sum(knots[i + 1: i + degree + 1]) / degree
        controls.append(start + greville * (end - start))
    return make_clamped(controls, degree, interior)


def render_tube(center_of_row, height, width, half_width=14.0):
    """Rasterize a vertical tube mask: column c is foreground in row r
    iff |c - center_of_row(r)| <= half_width."""
    rows = np.arange(height)
    centers = np.asarray([center_of_row(r) for r in rows], dtype=float)
    cols = np.arange(width)
    data = np.abs(cols[None, :] - centers[:, None]) <= half_width
    return BinaryMask(data)


def sine_center(amplitude, periods, height, center_x=128.0, phase=0.0):
    k = 2.0 * math.pi * periods / height
    return lambda y: center_x + amplitude * math.sin(k * y + phase)


def sine_rotated_slope(amplitude, periods, height, phase=0.0):
    """Rotated-frame slope of the sine centerline: s(y) = -dx/dy."""
    k = 2.0 * math.pi * periods / height
    return lambda y: -amplitude * k * math.cos(k * y + phase)


def acute_angle_between_slopes_deg(s1, s2):
    """Independent direction-vector oracle: acute angle between the lines
    through (1, s1) and (1, s2)."""
    a1 = math.degrees(math.atan2(s1, 1.0))
    a2 = math.degrees(math.atan2(s2, 1.0))
    diff = abs(a1 - a2) % 180.0
    return min(diff, 180.0 - diff)


def analytic_tube_mt(amplitude, periods, height, phase=0.0, samples=200001):
    """Maximal tangent-angle difference of the analytic sine centerline."""
    slope = sine_rotated_slope(amplitude, periods, height, phase)
    ys = np.linspace(0.0, height - 1, samples)
    values = np.asarray([slope(y) for y in ys])
    return acute_angle_between_slopes_deg(values.max(), values.min())
