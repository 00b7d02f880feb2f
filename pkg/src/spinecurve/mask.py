"""Binary spine-mask handling: loading, deterministic cleanup, scanline
centerline extraction, and contour-annotation rasterization.

Masks are boolean (height, width) grids in image coordinates; row 0 is the
top of the image. Expected inputs are 512x256 spine masks but any size is
accepted.
"""

from __future__ import annotations

import io
import warnings
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError
from scipy import ndimage

CONTOUR_POINTS_PER_SIDE = 17

_EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)
_CLOSING_ELEMENT = np.ones((3, 3), dtype=bool)


class MaskError(ValueError):
    """Unreadable, empty, or otherwise unusable mask."""


class ContourError(MaskError):
    """Contour annotation violating a structural invariant."""


class BinaryMask:
    """Immutable boolean foreground grid."""

    __slots__ = ("data",)

    def __init__(self, data):
        arr = np.asarray(data)
        if arr.ndim != 2:
            raise MaskError(f"mask data must be 2-D, got shape {arr.shape}")
        arr = arr.astype(bool)
        arr.setflags(write=False)
        self.data = arr

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def foreground_count(self) -> int:
        return int(self.data.sum())

    def __eq__(self, other):
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return np.array_equal(self.data, other.data)

    def __repr__(self):
        return (
            f"BinaryMask({self.width}x{self.height}, "
            f"{self.foreground_count} foreground px)"
        )


def _mask_from_image(image: Image.Image) -> BinaryMask:
    gray = image.convert("L")
    mask = BinaryMask(np.asarray(gray) > 127)
    if mask.foreground_count == 0:
        raise MaskError("empty mask: no foreground pixels")
    return mask


def load_mask(path) -> BinaryMask:
    """Load an 8-bit grayscale PNG or PGM; values > 127 are foreground."""
    try:
        with Image.open(path) as image:
            return _mask_from_image(image)
    except FileNotFoundError:
        raise
    except (UnidentifiedImageError, OSError) as exc:
        raise MaskError(f"cannot read mask image {path}: {exc}") from exc


def mask_from_bytes(data: bytes) -> BinaryMask:
    """Decode an in-memory PNG/PGM payload into a mask."""
    try:
        with Image.open(io.BytesIO(data)) as image:
            return _mask_from_image(image)
    except (UnidentifiedImageError, OSError) as exc:
        raise MaskError(f"cannot decode mask image: {exc}") from exc


def save_mask(mask: BinaryMask, path) -> None:
    """Write the mask as an 8-bit PNG with values 0/255."""
    Image.fromarray(mask.data.astype(np.uint8) * 255).save(path)


def mask_to_png_bytes(mask: BinaryMask) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(mask.data.astype(np.uint8) * 255).save(buf, format="PNG")
    return buf.getvalue()


def clean_mask(mask: BinaryMask) -> BinaryMask:
    """Keep the largest 8-connected component, then close pinholes.

    The closing uses a 3x3 square element, one iteration, computed on a
    padded canvas so border pixels are preserved. Idempotent.
    """
    if mask.foreground_count == 0:
        raise MaskError("empty mask: no foreground pixels")
    labels, n_components = ndimage.label(mask.data, structure=_EIGHT_CONNECTED)
    if n_components > 1:
        warnings.warn(
            f"mask has {n_components} components; keeping the largest",
            RuntimeWarning,
            stacklevel=2,
        )
        counts = np.bincount(labels.ravel())
        counts[0] = 0
        component = labels == int(np.argmax(counts))
    else:
        component = labels == 1
    padded = np.pad(component, 1)
    closed = ndimage.binary_closing(padded, structure=_CLOSING_ELEMENT)
    return BinaryMask(closed[1:-1, 1:-1])


def _runs(row: np.ndarray):
    # Consecutive foreground runs as (start, end) inclusive column indices.
    cols = np.flatnonzero(row)
    if cols.size == 0:
        return []
    breaks = np.flatnonzero(np.diff(cols) > 1)
    starts = np.concatenate([[0], breaks + 1])
    ends = np.concatenate([breaks, [cols.size - 1]])
    return [(int(cols[s]), int(cols[e])) for s, e in zip(starts, ends)]


def _widest_run(row: np.ndarray):
    runs = _runs(row)
    if not runs:
        return None
    # First widest run on ties, so noise specks never hijack the centerline.
    return max(runs, key=lambda r: (r[1] - r[0], -r[0]))


def _row_midpoints(mask: BinaryMask) -> np.ndarray:
    fg_rows = np.flatnonzero(mask.data.any(axis=1))
    if fg_rows.size == 0:
        raise MaskError("empty mask: no foreground pixels")
    first, last = int(fg_rows[0]), int(fg_rows[-1])
    gaps = (last - first + 1) - fg_rows.size
    if gaps:
        warnings.warn(
            f"{gaps} rows inside the mask span have no foreground; skipped",
            RuntimeWarning,
            stacklevel=3,
        )
    midpoints = []
    for row in fg_rows:
        start, end = _widest_run(mask.data[row])
        midpoints.append(((start + end) / 2.0, float(row)))
    return np.asarray(midpoints)


def extract_centerline(mask: BinaryMask, count: int = 17) -> np.ndarray:
    """Extract `count` ordered centerline points by horizontal scanlines.

    Every mask row contributes the midpoint of its widest foreground run;
    the row-ordered midpoints are then evenly subsampled (by row index,
    keeping both extremes) down to `count` points with strictly
    increasing y.
    """
    count = int(count)
    if count < 2:
        raise MaskError(f"centerline needs count >= 2, got {count}")
    midpoints = _row_midpoints(mask)
    if len(midpoints) < count:
        raise MaskError(
            f"mask spans {len(midpoints)} foreground rows, need at least {count}"
        )
    idx = np.round(np.linspace(0, len(midpoints) - 1, count)).astype(int)
    return midpoints[idx]


@dataclass(frozen=True)
class ContourAnnotation:
    """17+17 ordered contour points outlining the spine mask.

    Both sides run top to bottom with strictly increasing y, and each left
    point lies strictly left of its same-index right point.
    """

    left: tuple[tuple[float, float], ...]
    right: tuple[tuple[float, float], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "left", tuple((float(p[0]), float(p[1])) for p in self.left)
        )
        object.__setattr__(
            self, "right", tuple((float(p[0]), float(p[1])) for p in self.right)
        )
        for name, side in (("left", self.left), ("right", self.right)):
            if len(side) != CONTOUR_POINTS_PER_SIDE:
                raise ContourError(
                    f"{name} contour must contain {CONTOUR_POINTS_PER_SIDE} "
                    f"points, got {len(side)}"
                )
            for i in range(1, len(side)):
                if side[i][1] <= side[i - 1][1]:
                    raise ContourError(
                        f"{name} contour y-coordinates must strictly increase "
                        f"(violated at point {i})"
                    )
        for i, (lp, rp) in enumerate(zip(self.left, self.right)):
            if lp[0] >= rp[0]:
                raise ContourError(
                    f"left contour must stay left of the right contour "
                    f"(violated at paired point {i})"
                )

    def to_dict(self) -> dict:
        return {
            "left": [list(p) for p in self.left],
            "right": [list(p) for p in self.right],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ContourAnnotation":
        try:
            return cls(tuple(map(tuple, data["left"])), tuple(map(tuple, data["right"])))
        except (KeyError, TypeError) as exc:
            raise ContourError(f"malformed contour data: {exc}") from exc

    def polygon(self) -> list[tuple[float, float]]:
        """Closed outline: left side top-to-bottom, right side bottom-to-top."""
        return list(self.left) + list(reversed(self.right))


def _orientation(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _properly_intersect(p, q, r, s) -> bool:
    d1 = _orientation(r, s, p)
    d2 = _orientation(r, s, q)
    d3 = _orientation(p, q, r)
    d4 = _orientation(p, q, s)
    return ((d1 > 0) != (d2 > 0) and d1 != 0 and d2 != 0) and (
        (d3 > 0) != (d4 > 0) and d3 != 0 and d4 != 0
    )


def _check_simple(polygon) -> None:
    n = len(polygon)
    for i in range(n):
        a, b = polygon[i], polygon[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            c, d = polygon[j], polygon[(j + 1) % n]
            if _properly_intersect(a, b, c, d):
                raise ContourError(
                    f"contour self-intersects: segment {i}-{(i + 1) % n} crosses "
                    f"segment {j}-{(j + 1) % n}"
                )


def shoelace_area(polygon) -> float:
    """Signed polygon area (positive for counter-clockwise in math axes)."""
    pts = np.asarray(polygon, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _fill_polygon_even_odd(polygon, width: int, height: int) -> np.ndarray:
    """Even-odd scanline fill sampled at integer pixel coordinates.

    A pixel (c, r) is foreground when its centre lies inside the polygon
    under the even-odd rule. Each edge counts its smaller-y endpoint and
    excludes the larger, so shared vertices are never double-counted; rows
    exactly on the polygon's lower extreme sample infinitesimally above it
    so the bottom row is kept.
    """
    data = np.zeros((height, width), dtype=bool)
    pts = np.asarray(polygon, dtype=float)
    y_min = max(int(np.ceil(pts[:, 1].min())), 0)
    y_max = min(int(np.floor(pts[:, 1].max())), height - 1)
    bottom = pts[:, 1].max()
    n = len(pts)
    for row in range(y_min, y_max + 1):
        y = float(row) if row < bottom else bottom - 1e-9
        crossings = []
        for i in range(n):
            x1, y1 = pts[i]
            x2, y2 = pts[(i + 1) % n]
            if y1 == y2:
                continue
            lo, hi = (y1, y2) if y1 < y2 else (y2, y1)
            if lo <= y < hi:
                crossings.append(x1 + (y - y1) * (x2 - x1) / (y2 - y1))
        crossings.sort()
        for left, right in zip(crossings[0::2], crossings[1::2]):
            first = max(int(np.ceil(left)), 0)
            last = min(int(np.floor(right)), width - 1)
            if first <= last:
                data[row, first: last + 1] = True
    return data


def contour_to_mask(annotation: ContourAnnotation, width: int, height: int) -> BinaryMask:
    """Rasterize a contour annotation into a filled binary mask.

    The polygon is the left side joined to the reversed right side, filled
    with the even-odd scanline rule at pixel centres.
    """
    width, height = int(width), int(height)
    if width <= 0 or height <= 0:
        raise MaskError(f"mask dimensions must be positive, got {width}x{height}")
    for name, side in (("left", annotation.left), ("right", annotation.right)):
        for i, (x, y) in enumerate(side):
            if not (0.0 <= x <= width - 1 and 0.0 <= y <= height - 1):
                raise ContourError(
                    f"{name} contour point {i} ({x}, {y}) outside image bounds "
                    f"{width}x{height}"
                )
    polygon = annotation.polygon()
    _check_simple(polygon)
    if abs(shoelace_area(polygon)) < 1e-9:
        raise ContourError("zero-area contour")
    mask = BinaryMask(_fill_polygon_even_odd(polygon, width, height))
    if mask.foreground_count == 0:
        raise ContourError("zero-area contour")
    return mask


def mask_to_contour(mask: BinaryMask) -> ContourAnnotation:
    """Derive an initial 17+17 contour annotation from a mask.

    Samples 17 foreground rows evenly and takes the widest run's end
    pixels as the left/right contour points.
    """
    midrows = np.flatnonzero(mask.data.any(axis=1))
    if midrows.size < CONTOUR_POINTS_PER_SIDE:
        raise MaskError(
            f"mask spans {midrows.size} foreground rows, need at least "
            f"{CONTOUR_POINTS_PER_SIDE} for a contour annotation"
        )
    idx = np.round(
        np.linspace(0, midrows.size - 1, CONTOUR_POINTS_PER_SIDE)
    ).astype(int)
    left, right = [], []
    for row in midrows[idx]:
        start, end = _widest_run(mask.data[row])
        lx, rx = float(start), float(end)
        if lx == rx:
            lx -= 0.5
            rx += 0.5
        left.append((lx, float(row)))
        right.append((rx, float(row)))
    return ContourAnnotation(tuple(left), tuple(right))
