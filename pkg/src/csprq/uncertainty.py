"""Uncertainty-region construction and clipping against the query range.

Two construction strategies produce the same region:

* ``compute_uncertainty_basic`` subtracts every candidate restricted area in
  the caller's order, carries every subdivision along, and selects the one
  containing the recorded location at the end.
* ``compute_uncertainty_optimized`` exploits the fact that at most one
  subdivision can contain the recorded location: after any split it keeps
  only that subdivision, prunes remaining candidates against its bounding
  box, defers candidates wholly inside the working region (hole carving is
  cheaper once everything else is done), and skips bounding-box updates on
  non-splitting steps.

``intersect_with_query`` applies the same ideas to clipping the finished
region against the query rectangle, where every subdivision must be kept.

Cost counters are first-class outputs; relative comparisons between the two
strategies stand in for analytic operation-count formulas.
"""

from dataclasses import dataclass, field, fields

import numpy as np

from .errors import SelectionError
from .geometry import Mbr, Point, SimplePolygon, mbr_intersects, span_of
from .regions import (OpKind, Region, RegionSet, intersect_outer_with_rect,
                      point_in_region, region_strictly_contains,
                      subtract_with_info, _require_rect)


@dataclass(frozen=True)
class MovingObject:
    id: int
    l_r: Point
    tau: float

    def circle_mbr(self) -> Mbr:
        """The 2-tau square centered at the recorded location."""
        return Mbr.around(self.l_r, self.tau)


@dataclass(frozen=True)
class RestrictedArea:
    id: int
    shape: SimplePolygon


@dataclass
class OpCounters:
    """Operation counts for one uncertainty/clip computation (or a sum of
    many; see merge)."""

    geos_ops: int = 0        # full boolean operations executed
    hole_carves: int = 0     # subtrahend strictly inside: hole appended
    disjoint_ops: int = 0    # box test inside the kernel proved a no-op
    mbr_prunes: int = 0      # candidate skipped before any kernel call
    postponed: int = 0       # subtrahends deferred to the carve phase
    splits: int = 0          # operations that produced >1 subdivision
    discarded: int = 0       # subdivisions dropped (effective-subdivision rule)
    lazy_holds: int = 0      # non-splitting steps with the working box kept

    def record(self, kind: OpKind) -> None:
        if kind is OpKind.CLIPPED:
            self.geos_ops += 1
        elif kind is OpKind.HOLE_CARVED:
            self.hole_carves += 1
        else:
            self.disjoint_ops += 1

    def merge(self, other: "OpCounters") -> None:
        for f in fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @property
    def subtractions(self) -> int:
        """Real geometry work: boolean ops plus hole carves."""
        return self.geos_ops + self.hole_carves


def approximate_circle(l_r: Point, tau: float, xi: int) -> SimplePolygon:
    """Regular xi-gon inscribed in the circle of radius tau around l_r.

    Vertex i sits at angle 2*pi*i/xi, at distance exactly tau from the
    center, so the circle circumscribes the polygon.
    """
    if xi < 3:
        raise ValueError(f"xi must be >= 3, got {xi}")
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    ang = 2.0 * np.pi * np.arange(xi, dtype=np.float64) / xi
    verts = np.empty((xi, 2), dtype=np.float64)
    verts[:, 0] = l_r[0] + tau * np.cos(ang)
    verts[:, 1] = l_r[1] + tau * np.sin(ang)
    return SimplePolygon(verts, validate=False)


def sort_candidates(candidates) -> list:
    """Canonical processing order: span descending, box area descending,
    id ascending.  Larger spans are more likely to split the region, so
    handling them first maximizes the pruning opportunity."""
    return sorted(candidates,
                  key=lambda r: (-span_of(r.shape.mbr), -r.shape.mbr.area, r.id))


def _select_effective(pieces, l_r: Point) -> Region:
    """The unique subdivision containing the recorded location."""
    ordered = RegionSet(pieces)
    for piece in ordered:
        if point_in_region(l_r, piece):
            return piece
    raise SelectionError(
        "no subdivision contains the recorded location "
        f"({l_r[0]:.6g}, {l_r[1]:.6g})")


def compute_uncertainty_basic(e: SimplePolygon, candidates, l_r: Point,
                              counters: OpCounters | None = None) -> Region:
    """Subtract every candidate in the given order, carrying all
    subdivisions, then pick the one containing l_r."""
    counters = counters if counters is not None else OpCounters()
    pieces = [Region(e)]
    for cand in candidates:
        nxt = []
        for piece in pieces:
            subs, kind = subtract_with_info(piece, cand.shape)
            counters.record(kind)
            if len(subs) > 1:
                counters.splits += 1
            nxt.extend(subs)
        pieces = nxt
    if len(pieces) == 1:
        return pieces[0]
    return _select_effective(pieces, l_r)


def compute_uncertainty_optimized(e: SimplePolygon, candidates, l_r: Point,
                                  counters: OpCounters | None = None) -> Region:
    """Same region as the basic strategy, computed with pruning.

    Candidates are processed span-descending.  A candidate whose box misses
    the current working box is skipped outright; one strictly inside the
    working region is deferred to the final carve phase; otherwise it is
    subtracted, keeping only the subdivision containing l_r after a split
    (with a tight box recompute) and keeping the stale working box after a
    non-splitting step.
    """
    counters = counters if counters is not None else OpCounters()
    working = Region(e)
    work_mbr = e.mbr
    postponed = []
    for cand in sort_candidates(candidates):
        shape = cand.shape
        if not mbr_intersects(work_mbr, shape.mbr):
            counters.mbr_prunes += 1
            continue
        if region_strictly_contains(working, shape):
            postponed.append(shape)
            counters.postponed += 1
            continue
        working, work_mbr = _subtract_step(working, work_mbr, shape, l_r, counters)
    for shape in postponed:
        working, work_mbr = _subtract_step(working, work_mbr, shape, l_r, counters)
    return working


def _subtract_step(working: Region, work_mbr: Mbr, shape: SimplePolygon,
                   l_r: Point, counters: OpCounters):
    subs, kind = subtract_with_info(working, shape)
    counters.record(kind)
    if len(subs) > 1:
        counters.splits += 1
        counters.discarded += len(subs) - 1
        working = _select_effective(subs, l_r)
        return working, working.mbr
    if not subs:
        raise SelectionError("uncertainty region vanished during subtraction")
    if kind is OpKind.CLIPPED:
        counters.lazy_holds += 1
    return subs[0], work_mbr


def intersect_with_query(u: Region, rect: SimplePolygon,
                         counters: OpCounters | None = None) -> RegionSet:
    """Clip the uncertainty region to the query rectangle.

    The outer ring is clipped first; holes are then subtracted span-ascending
    (holes unlikely to split pieces go first), with wholly-interior holes
    deferred to the carve phase and working boxes updated lazily.  Every
    subdivision is retained: past the first clip none may be discarded.
    """
    counters = counters if counters is not None else OpCounters()
    _require_rect(rect)
    if not mbr_intersects(u.mbr, rect.mbr):
        return RegionSet()
    if rect.mbr.contains_mbr(u.mbr):
        return RegionSet([u])
    pieces = intersect_outer_with_rect(u.outer, rect)
    counters.geos_ops += 1
    if not pieces:
        return RegionSet()
    holes = sorted(u.holes, key=lambda h: (span_of(h.mbr), h.mbr.area, h.mbr))
    work = [(piece, piece.mbr) for piece in pieces]
    postponed = []
    for hole in holes:
        hm = hole.mbr
        if not any(mbr_intersects(wm, hm) for _, wm in work):
            counters.mbr_prunes += 1
            continue
        deferred = False
        for piece, wm in work:
            if mbr_intersects(wm, hm) and region_strictly_contains(piece, hole):
                postponed.append(hole)
                counters.postponed += 1
                deferred = True
                break
        if deferred:
            continue
        work = _clip_hole(work, hole, counters, lazy=True)
    for hole in postponed:
        work = _clip_hole(work, hole, counters, lazy=True)
    return RegionSet(piece for piece, _ in work)


def _clip_hole(work, hole: SimplePolygon, counters: OpCounters, lazy: bool):
    hm = hole.mbr
    nxt = []
    for piece, wm in work:
        if not mbr_intersects(wm, hm):
            nxt.append((piece, wm))
            continue
        subs, kind = subtract_with_info(piece, hole)
        counters.record(kind)
        if len(subs) > 1:
            counters.splits += 1
            nxt.extend((s, s.mbr) for s in subs)
        elif len(subs) == 1:
            if kind is OpKind.CLIPPED:
                counters.lazy_holds += 1
            nxt.append((subs[0], wm if lazy else subs[0].mbr))
        # an empty result means the hole swallowed the piece: drop it
    return nxt
