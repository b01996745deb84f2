"""Planar primitives: points, axis-aligned boxes, simple polygons, span.

Everything downstream (regions, uncertainty, indexing) is built on these.
All values are immutable; operations are pure functions.
"""

import enum
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import DegenerateGeometryError

SNAP_EPS = 1e-9       # vertices closer than this are merged
BOUNDARY_EPS = _kernels.BOUNDARY_EPS


class Point(NamedTuple):
    x: float
    y: float


class Mbr(NamedTuple):
    """Axis-aligned bounding box, stored as (xlo, ylo, xhi, yhi)."""

    xlo: float
    ylo: float
    xhi: float
    yhi: float

    @property
    def lo(self) -> Point:
        return Point(self.xlo, self.ylo)

    @property
    def hi(self) -> Point:
        return Point(self.xhi, self.yhi)

    @property
    def width(self) -> float:
        return self.xhi - self.xlo

    @property
    def height(self) -> float:
        return self.yhi - self.ylo

    @property
    def area(self) -> float:
        return self.width * self.height

    def contains_mbr(self, other: "Mbr") -> bool:
        return (self.xlo <= other.xlo and self.ylo <= other.ylo
                and other.xhi <= self.xhi and other.yhi <= self.yhi)

    def contains_point(self, x: float, y: float) -> bool:
        return self.xlo <= x <= self.xhi and self.ylo <= y <= self.yhi

    @staticmethod
    def around(center: Point, half: float) -> "Mbr":
        return Mbr(center.x - half, center.y - half, center.x + half, center.y + half)


class Containment(enum.IntEnum):
    """Verdict of a point-vs-polygon test (codes match the kernel output)."""

    OUTSIDE = -1
    ON_BOUNDARY = 0
    INSIDE = 1


def mbr_intersects(a: Mbr, b: Mbr) -> bool:
    """Closed-interval overlap: shared boundary counts as intersecting."""
    return (a.xlo <= b.xhi and b.xlo <= a.xhi
            and a.ylo <= b.yhi and b.ylo <= a.yhi)


def span_of(b: Mbr) -> float:
    """Span: the larger side length of the box."""
    return max(b.width, b.height)


class SimplePolygon:
    """A simple closed ring with a cached bounding box.

    Vertices are held as an (n, 2) float64 array, normalized to
    counterclockwise orientation on construction; the closing edge is
    implicit.  Consecutive vertices closer than ``SNAP_EPS`` are merged.
    """

    __slots__ = ("vertices", "mbr", "_area")

    def __init__(self, vertices, validate: bool = True):
        arr = np.asarray(vertices, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("vertices must be an (n, 2) array-like")
        if validate:
            if not np.isfinite(arr).all():
                raise ValueError("vertices must be finite")
            arr = _snap_ring(arr)
            if arr.shape[0] < 3:
                raise DegenerateGeometryError(
                    f"ring collapsed to {arr.shape[0]} vertices after snapping")
        signed = _kernels.ring_signed_area(arr)
        if signed < 0.0:
            arr = arr[::-1]
            signed = -signed
        if validate and signed <= 0.0:
            raise DegenerateGeometryError("ring has zero area (collinear vertices)")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        self.vertices = arr
        self.mbr = Mbr(float(arr[:, 0].min()), float(arr[:, 1].min()),
                       float(arr[:, 0].max()), float(arr[:, 1].max()))
        self._area = signed

    def __len__(self) -> int:
        return self.vertices.shape[0]

    def __repr__(self) -> str:
        return f"SimplePolygon({len(self)} vertices, area={self._area:.6g})"

    @property
    def area(self) -> float:
        return self._area

    @staticmethod
    def rectangle(xlo: float, ylo: float, xhi: float, yhi: float) -> "SimplePolygon":
        return SimplePolygon([(xlo, ylo), (xhi, ylo), (xhi, yhi), (xlo, yhi)],
                             validate=False)

    def is_simple(self) -> bool:
        """O(n^2) self-intersection check; used by tests and input validation,
        not by the hot path."""
        edges = self.edges()
        n = len(edges)
        for i in range(n):
            for j in range(i + 1, n):
                if j == i + 1 or (i == 0 and j == n - 1):
                    continue  # adjacent edges share a vertex by design
                if _segments_cross(edges[i], edges[j]):
                    return False
        return True

    def edges(self) -> np.ndarray:
        """(n, 4) array of segments (x1, y1, x2, y2), closing edge included."""
        v = self.vertices
        nxt = np.roll(v, -1, axis=0)
        return np.hstack([v, nxt])


def _snap_ring(arr: np.ndarray) -> np.ndarray:
    """Drop consecutive duplicates (within SNAP_EPS) and the closing repeat."""
    if arr.shape[0] == 0:
        return arr
    keep = [0]
    for i in range(1, arr.shape[0]):
        prev = arr[keep[-1]]
        if abs(arr[i, 0] - prev[0]) > SNAP_EPS or abs(arr[i, 1] - prev[1]) > SNAP_EPS:
            keep.append(i)
    first = arr[keep[0]]
    last = arr[keep[-1]]
    if len(keep) > 1 and abs(last[0] - first[0]) <= SNAP_EPS and abs(last[1] - first[1]) <= SNAP_EPS:
        keep.pop()
    return arr[keep]


def polygon_area(p: SimplePolygon) -> float:
    """Absolute shoelace area; orientation-independent."""
    return p.area


def point_in_polygon(pt: Point, p: SimplePolygon) -> Containment:
    """Ray-crossing containment with boundary detection within 1e-9."""
    pts = np.array([[pt[0], pt[1]]], dtype=np.float64)
    ring_off = np.array([0, len(p)], dtype=np.int64)
    code = _kernels.points_in_rings(pts, p.vertices, ring_off)[0, 0]
    return Containment(int(code))


def points_in_polygon(pts: np.ndarray, p: SimplePolygon) -> np.ndarray:
    """Vectorized ray-crossing verdicts (-1/0/1 int8) for many points."""
    ring_off = np.array([0, len(p)], dtype=np.int64)
    return _kernels.points_in_rings(pts, p.vertices, ring_off)[:, 0]


def _segments_cross(s1, s2) -> bool:
    """Proper-or-touching intersection of two segments (x1,y1,x2,y2)."""
    return bool(segments_intersect_any(np.asarray([s1]), np.asarray([s2])))


def segments_intersect_any(a: np.ndarray, b: np.ndarray) -> bool:
    """True if any segment of `a` intersects any segment of `b`.

    Segments are rows (x1, y1, x2, y2); touching endpoints count.  Runs the
    standard orientation test vectorized over all pairs.
    """
    if len(a) == 0 or len(b) == 0:
        return False
    ax1 = a[:, 0][:, None]; ay1 = a[:, 1][:, None]
    ax2 = a[:, 2][:, None]; ay2 = a[:, 3][:, None]
    bx1 = b[:, 0][None, :]; by1 = b[:, 1][None, :]
    bx2 = b[:, 2][None, :]; by2 = b[:, 3][None, :]

    d1 = (ax2 - ax1) * (by1 - ay1) - (ay2 - ay1) * (bx1 - ax1)
    d2 = (ax2 - ax1) * (by2 - ay1) - (ay2 - ay1) * (bx2 - ax1)
    d3 = (bx2 - bx1) * (ay1 - by1) - (by2 - by1) * (ax1 - bx1)
    d4 = (bx2 - bx1) * (ay2 - by1) - (by2 - by1) * (ax2 - bx1)

    proper = ((d1 > 0) != (d2 > 0)) & ((d3 > 0) != (d4 > 0)) \
        & (d1 != 0) & (d2 != 0) & (d3 != 0) & (d4 != 0)
    if proper.any():
        return True

    # collinear / endpoint-touching cases: a zero cross product with overlap
    # of the corresponding bounding intervals
    def on_seg(px, py, qx, qy, rx, ry):
        return ((np.minimum(px, qx) <= rx) & (rx <= np.maximum(px, qx))
                & (np.minimum(py, qy) <= ry) & (ry <= np.maximum(py, qy)))

    touch = ((d1 == 0) & on_seg(ax1, ay1, ax2, ay2, bx1, by1)) \
        | ((d2 == 0) & on_seg(ax1, ay1, ax2, ay2, bx2, by2)) \
        | ((d3 == 0) & on_seg(bx1, by1, bx2, by2, ax1, ay1)) \
        | ((d4 == 0) & on_seg(bx1, by1, bx2, by2, ax2, ay2))
    return bool(touch.any())
