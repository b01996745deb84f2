"""Regions with holes and the subtraction / intersection operations.

A ``Region`` is the label-based representation used everywhere: one outer
ring, a list of hole rings, and a has-holes flag.  Boolean operations return
a ``RegionSet`` holding the connected subdivisions of the result.

The low-level ring clipping is delegated to GEOS (via shapely); everything
above it — the region representation, the fast paths for disjoint and
fully-contained subtrahends, subdivision bookkeeping, areas and membership —
is implemented here.  Two fast paths matter semantically as well as for
speed: a subtrahend whose box misses the region is a no-op returning the
input unchanged, and a subtrahend strictly inside the region interior is
carved as a new hole without touching the outer ring.
"""

import enum

import numpy as np
from shapely.geometry import Polygon as _ShapelyPolygon

from . import _kernels
from .errors import DegenerateGeometryError
from .geometry import (Mbr, Point, SimplePolygon, mbr_intersects,
                       segments_intersect_any, span_of)

# subdivisions and answer areas below this are treated as empty
AREA_EPS = 1e-12


class OpKind(enum.Enum):
    """What a subtraction call actually did (feeds the cost counters)."""

    DISJOINT = "disjoint"        # box test proved a no-op
    HOLE_CARVED = "hole_carved"  # subtrahend strictly inside: hole appended
    CLIPPED = "clipped"          # full boolean operation executed


class Region:
    """Outer ring plus holes; the unit the query algorithms manipulate.

    Holes are kept in a canonical order (sorted by their bounding boxes) so
    that regions built through different operation orders compare cleanly.
    """

    __slots__ = ("outer", "holes", "_area")

    def __init__(self, outer: SimplePolygon, holes=()):
        self.outer = outer
        hs = list(holes)
        hs.sort(key=lambda h: h.mbr)
        self.holes = tuple(hs)
        a = outer.area
        for h in self.holes:
            a -= h.area
        self._area = a

    @property
    def flag(self) -> bool:
        """True iff the region has at least one hole."""
        return bool(self.holes)

    @property
    def mbr(self) -> Mbr:
        return self.outer.mbr

    @property
    def area(self) -> float:
        return self._area

    def __repr__(self) -> str:
        return f"Region(area={self._area:.6g}, holes={len(self.holes)})"

    def with_hole(self, hole: SimplePolygon) -> "Region":
        return Region(self.outer, self.holes + (hole,))


class RegionSet:
    """Pairwise interior-disjoint subdivisions; may be empty."""

    __slots__ = ("subdivisions",)

    def __init__(self, subdivisions=()):
        subs = list(subdivisions)
        subs.sort(key=lambda r: (r.mbr, r.area))
        self.subdivisions = tuple(subs)

    def __len__(self) -> int:
        return len(self.subdivisions)

    def __iter__(self):
        return iter(self.subdivisions)

    def __getitem__(self, i) -> Region:
        return self.subdivisions[i]

    def __bool__(self) -> bool:
        return bool(self.subdivisions)

    def __repr__(self) -> str:
        return f"RegionSet({len(self.subdivisions)} subdivisions)"


def region_area(a: Region) -> float:
    """Outer area minus the hole areas."""
    return a.area


def regionset_area(s: RegionSet) -> float:
    """Total area over all subdivisions."""
    total = 0.0
    for r in s:
        total += r.area
    return total


# ---------------------------------------------------------------------------
# membership
# ---------------------------------------------------------------------------

def pack_regions(regions) -> tuple:
    """Flatten regions into the packed-array layout the kernels consume."""
    coords = []
    ring_off = [0]
    region_off = [0]
    n = 0
    for reg in regions:
        coords.append(reg.outer.vertices)
        n += len(reg.outer)
        ring_off.append(n)
        for h in reg.holes:
            coords.append(h.vertices)
            n += len(h)
            ring_off.append(n)
        region_off.append(len(ring_off) - 1)
    if not coords:
        return (np.empty((0, 2)), np.zeros(1, dtype=np.int64), np.zeros(1, dtype=np.int64))
    return (np.ascontiguousarray(np.vstack(coords)),
            np.asarray(ring_off, dtype=np.int64),
            np.asarray(region_off, dtype=np.int64))


def points_in_regionset(pts: np.ndarray, s) -> np.ndarray:
    """Boolean mask of points lying in any subdivision (boundaries included,
    strict hole interiors excluded)."""
    coords, ring_off, region_off = pack_regions(s)
    return _kernels.points_in_regionset(pts, coords, ring_off, region_off)


def points_in_region(pts: np.ndarray, a: Region) -> np.ndarray:
    return points_in_regionset(pts, (a,))


def point_in_region(pt: Point, a: Region) -> bool:
    """True iff pt is inside the outer ring and not strictly inside a hole."""
    return bool(points_in_region(np.array([[pt[0], pt[1]]], dtype=np.float64), a)[0])


# ---------------------------------------------------------------------------
# shapely bridge
# ---------------------------------------------------------------------------

def _to_shapely(a: Region) -> _ShapelyPolygon:
    return _ShapelyPolygon(a.outer.vertices, [h.vertices for h in a.holes])


def _poly_to_shapely(p: SimplePolygon) -> _ShapelyPolygon:
    return _ShapelyPolygon(p.vertices)


def _regions_from_shapely(geom) -> list:
    """Decompose a GEOS result into Regions, dropping sliver artifacts."""
    if geom.is_empty:
        return []
    if geom.geom_type == "Polygon":
        geoms = [geom]
    elif geom.geom_type in ("MultiPolygon", "GeometryCollection"):
        geoms = [g for g in geom.geoms if g.geom_type == "Polygon" and not g.is_empty]
    else:
        return []
    out = []
    for g in geoms:
        if g.area <= AREA_EPS:
            continue
        try:
            outer = SimplePolygon(np.asarray(g.exterior.coords)[:-1])
        except DegenerateGeometryError:
            continue  # collapsed ring: the degenerate-touch case, not a piece
        holes = []
        for interior in g.interiors:
            try:
                hole = SimplePolygon(np.asarray(interior.coords)[:-1])
            except DegenerateGeometryError:
                continue
            if hole.area > AREA_EPS:
                holes.append(hole)
        out.append(Region(outer, holes))
    return out


# ---------------------------------------------------------------------------
# containment fast path
# ---------------------------------------------------------------------------

def region_strictly_contains(a: Region, p: SimplePolygon) -> bool:
    """True iff p lies strictly inside a's interior, touching nothing.

    Cheap sufficient tests run first: box containment, then one vertex of p
    strictly interior, then absence of any boundary intersection.  Existing
    holes must be box-disjoint from p; overlapping-hole layouts fall back to
    the full boolean path.
    """
    if not a.outer.mbr.contains_mbr(p.mbr):
        return False
    for h in a.holes:
        if mbr_intersects(h.mbr, p.mbr):
            return False
    pts = p.vertices[:1]
    ring_off = np.array([0, len(a.outer)], dtype=np.int64)
    if _kernels.points_in_rings(pts, a.outer.vertices, ring_off)[0, 0] != 1:
        return False
    if segments_intersect_any(p.edges(), a.outer.edges()):
        return False
    return True


# ---------------------------------------------------------------------------
# boolean operations
# ---------------------------------------------------------------------------

def subtract_with_info(a: Region, p: SimplePolygon):
    """Subtract polygon p from region a.

    Returns (list of Region subdivisions, OpKind).  The input region object
    is returned unchanged when p's box misses it.
    """
    if not mbr_intersects(a.mbr, p.mbr):
        return [a], OpKind.DISJOINT
    if region_strictly_contains(a, p):
        return [a.with_hole(p)], OpKind.HOLE_CARVED
    result = _to_shapely(a).difference(_poly_to_shapely(p))
    return _regions_from_shapely(result), OpKind.CLIPPED


def region_subtract(a: Region, p: SimplePolygon) -> RegionSet:
    """Set difference a \\ p as maximal connected subdivisions."""
    pieces, _ = subtract_with_info(a, p)
    return RegionSet(pieces)


def _require_rect(r: SimplePolygon) -> None:
    v = r.vertices
    if len(v) != 4:
        raise ValueError("query rectangle must have exactly 4 vertices")
    for i in range(4):
        x1, y1 = v[i]
        x2, y2 = v[(i + 1) % 4]
        if x1 != x2 and y1 != y2:
            raise ValueError("query rectangle must be axis-aligned")


def intersect_outer_with_rect(outer: SimplePolygon, r: SimplePolygon):
    """Clip a single ring to an axis-aligned rectangle.

    Returns hole-free pieces (the intersection of two simply-connected sets
    has simply-connected components).
    """
    if not mbr_intersects(outer.mbr, r.mbr):
        return []
    if r.mbr.contains_mbr(outer.mbr):
        return [Region(outer)]
    result = _poly_to_shapely(outer).intersection(_poly_to_shapely(r))
    return _regions_from_shapely(result)


def region_intersect_rect(a: Region, r: SimplePolygon, counters=None) -> RegionSet:
    """Intersection of a region with an axis-aligned rectangle.

    Clips the outer ring to the rectangle first, then subtracts each hole
    from the resulting pieces.  ``counters``, when given, receives the same
    operation accounting the optimized clip reports.
    """
    _require_rect(r)
    if not mbr_intersects(a.mbr, r.mbr):
        return RegionSet()
    if r.mbr.contains_mbr(a.mbr):
        return RegionSet([a])
    pieces = intersect_outer_with_rect(a.outer, r)
    if counters is not None:
        counters.geos_ops += 1
    for hole in a.holes:
        nxt = []
        for piece in pieces:
            subs, kind = subtract_with_info(piece, hole)
            if counters is not None:
                counters.record(kind)
                if len(subs) > 1:
                    counters.splits += 1
            nxt.extend(subs)
        pieces = nxt
    return RegionSet(pieces)
