"""Query strategies over a workspace of moving objects and restricted areas.

Four strategies answer the same query:

* ``query_scan``        — linear scans for both candidate sets (baseline B)
* ``query_basic``       — twin R-tree candidates, basic uncertainty (S)
* ``query_optimized``   — adds subdivision pruning, span ordering, postpone
                          processing and lazy box updates (SO)
* ``query_precomputed`` — uncertainty regions precomputed and indexed (PSO)

All strategies return identical answers for the same (workspace, range,
seed): candidate supersets only ever add objects whose probability is zero,
and the per-object Monte Carlo stream is seeded by (query seed, object id)
so processing order cannot matter.  Probabilities are quantized to 1e-6 on
output, which absorbs the last-bit float differences between the basic and
optimized clipping orders.
"""

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (ConstraintViolationError, MissingPrecomputationError,
                     UnknownObjectError)
from .geometry import Containment, Mbr, Point, SimplePolygon, mbr_intersects, point_in_polygon
from .probability import Pdf, probability_monte_carlo, probability_uniform
from .regions import AREA_EPS, Region, RegionSet, region_intersect_rect, regionset_area
from .rtree import DEFAULT_FANOUT, DEFAULT_PAGE_SIZE, RTree
from .uncertainty import (MovingObject, OpCounters, RestrictedArea,
                          approximate_circle, compute_uncertainty_basic,
                          compute_uncertainty_optimized, intersect_with_query,
                          sort_candidates)

PROBABILITY_DECIMALS = 6


class QueryRange:
    """Axis-aligned query rectangle with its (tight) bounding box."""

    __slots__ = ("rect", "mbr")

    def __init__(self, xlo: float, ylo: float, xhi: float, yhi: float):
        if not (xlo < xhi and ylo < yhi):
            raise ValueError("query range must have positive extent")
        self.rect = SimplePolygon.rectangle(xlo, ylo, xhi, yhi)
        self.mbr = self.rect.mbr

    @staticmethod
    def centered(cx: float, cy: float, theta: float) -> "QueryRange":
        h = theta / 2.0
        return QueryRange(cx - h, cy - h, cx + h, cy + h)

    def __repr__(self) -> str:
        m = self.mbr
        return f"QueryRange([{m.xlo:.6g},{m.xhi:.6g}]x[{m.ylo:.6g},{m.yhi:.6g}])"


class QueryAnswer:
    """(object id, probability) pairs with every probability > 0."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        self.entries = tuple(sorted(entries))
        ids = [i for i, _ in self.entries]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate object ids in answer")
        if any(p <= 0.0 for _, p in self.entries):
            raise ValueError("answer contains a nonpositive probability")

    def ids(self):
        return [i for i, _ in self.entries]

    def as_dict(self) -> dict:
        return dict(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __eq__(self, other) -> bool:
        return isinstance(other, QueryAnswer) and self.entries == other.entries

    def __repr__(self) -> str:
        return f"QueryAnswer({list(self.entries)!r})"


@dataclass
class QueryStats:
    """Index page accounting, or record counts for the scanning baseline."""

    nodes_visited: int = 0
    pages_read: int = 0
    records_scanned: int = 0


@dataclass
class QueryCounters:
    """Geometry-operation accounting split by phase."""

    uncertainty: OpCounters = field(default_factory=OpCounters)
    clip: OpCounters = field(default_factory=OpCounters)
    objects_considered: int = 0
    candidate_areas: int = 0

    def as_dict(self) -> dict:
        out = {"objects_considered": self.objects_considered,
               "candidate_areas": self.candidate_areas}
        out.update({f"u_{k}": v for k, v in self.uncertainty.as_dict().items()})
        out.update({f"s_{k}": v for k, v in self.clip.as_dict().items()})
        return out


@dataclass
class Workspace:
    """Objects, restricted areas, their indexes, and query-time settings."""

    objects: dict
    areas: dict
    pdf: Pdf = field(default_factory=Pdf)
    xi: int = 32
    n1: int = 700
    fanout: int = DEFAULT_FANOUT
    page_size: int = DEFAULT_PAGE_SIZE
    index_o: Optional[RTree] = None
    index_r: Optional[RTree] = None
    index_u: Optional[RTree] = None
    precomputed: Optional[dict] = None
    _scan_cache: Optional[tuple] = None

    def object_boxes(self):
        """Vectorized (ids, boxes) arrays for the scanning baseline."""
        if self._scan_cache is None:
            ids = np.array(sorted(self.objects), dtype=np.int64)
            boxes = np.array([self.objects[i].circle_mbr() for i in ids],
                             dtype=np.float64).reshape(len(ids), 4)
            aids = np.array(sorted(self.areas), dtype=np.int64)
            aboxes = np.array([self.areas[i].shape.mbr for i in aids],
                              dtype=np.float64).reshape(len(aids), 4)
            self._scan_cache = (ids, boxes, aids, aboxes)
        return self._scan_cache

    def invalidate_caches(self) -> None:
        self._scan_cache = None


def build_workspace(objects, areas, pdf: Pdf = Pdf(), xi: int = 32, n1: int = 700,
                    fanout: int = DEFAULT_FANOUT,
                    page_size: int = DEFAULT_PAGE_SIZE) -> Workspace:
    """Index the datasets and return a ready-to-query workspace."""
    obj_map = {o.id: o for o in objects}
    area_map = {a.id: a for a in areas}
    w = Workspace(objects=obj_map, areas=area_map, pdf=pdf, xi=xi, n1=n1,
                  fanout=fanout, page_size=page_size)
    w.index_o = RTree.build([(o.circle_mbr(), o.id) for o in obj_map.values()],
                            fanout=fanout, page_size=page_size)
    w.index_r = RTree.build([(a.shape.mbr, a.id) for a in area_map.values()],
                            fanout=fanout, page_size=page_size)
    return w


# ---------------------------------------------------------------------------
# shared per-object machinery
# ---------------------------------------------------------------------------

def _mask_overlap(boxes: np.ndarray, m: Mbr) -> np.ndarray:
    return ((boxes[:, 0] <= m.xhi) & (m.xlo <= boxes[:, 2])
            & (boxes[:, 1] <= m.yhi) & (m.ylo <= boxes[:, 3]))


def _candidate_areas_indexed(w: Workspace, obj: MovingObject, stats: QueryStats):
    ids = w.index_r.range_search(obj.circle_mbr(), stats)
    return sort_candidates(w.areas[i] for i in ids)


def _candidate_areas_scan(w: Workspace, obj: MovingObject, stats: QueryStats):
    _, _, aids, aboxes = w.object_boxes()
    stats.records_scanned += len(aids)
    hit = aids[_mask_overlap(aboxes, obj.circle_mbr())]
    return sort_candidates(w.areas[int(i)] for i in hit)


def _finish_probability(w: Workspace, obj: MovingObject, u: Region, s: RegionSet,
                        seed: int) -> float:
    """Probability of the object lying in the clipped set, quantized for
    cross-strategy comparability; 0.0 means 'exclude from the answer'."""
    if not s:
        return 0.0
    if w.pdf.is_uniform:
        if regionset_area(s) < AREA_EPS:
            return 0.0
        p = probability_uniform(u, s)
    else:
        pdf = w.pdf.for_object(obj.l_r, obj.tau)
        p = probability_monte_carlo(u, s, pdf, n1=w.n1, seed=(seed, obj.id))
        if p <= 0.0:
            return 0.0
    return round(p, PROBABILITY_DECIMALS)


def _uncertainty_for(w: Workspace, obj: MovingObject, candidates,
                     counters: QueryCounters, optimized: bool) -> Region:
    e = approximate_circle(obj.l_r, obj.tau, w.xi)
    if optimized:
        return compute_uncertainty_optimized(e, candidates, obj.l_r,
                                             counters.uncertainty)
    return compute_uncertainty_basic(e, candidates, obj.l_r, counters.uncertainty)


def _run_query(w: Workspace, qr: QueryRange, seed: int, candidate_ids,
               area_lookup, optimized: bool, stats: QueryStats,
               counters: QueryCounters, stored_u=None) -> QueryAnswer:
    entries = []
    for oid in sorted(candidate_ids):
        obj = w.objects[oid]
        counters.objects_considered += 1
        if stored_u is not None:
            u = stored_u[oid]
        else:
            candidates = area_lookup(w, obj, stats)
            counters.candidate_areas += len(candidates)
            u = _uncertainty_for(w, obj, candidates, counters, optimized)
        if optimized or stored_u is not None:
            s = intersect_with_query(u, qr.rect, counters.clip)
        else:
            s = region_intersect_rect(u, qr.rect, counters.clip)
        p = _finish_probability(w, obj, u, s, seed)
        if p > 0.0:
            entries.append((oid, p))
    return QueryAnswer(entries)


# ---------------------------------------------------------------------------
# the four strategies
# ---------------------------------------------------------------------------

def query_scan(w: Workspace, qr: QueryRange, seed: int = 0):
    """Baseline: linear scans replace both index probes."""
    stats = QueryStats()
    counters = QueryCounters()
    ids, boxes, _, _ = w.object_boxes()
    stats.records_scanned += len(ids)
    cand = [int(i) for i in ids[_mask_overlap(boxes, qr.mbr)]]
    answer = _run_query(w, qr, seed, cand, _candidate_areas_scan,
                        optimized=False, stats=stats, counters=counters)
    return answer, stats, counters


def query_basic(w: Workspace, qr: QueryRange, seed: int = 0):
    """Twin-index strategy with the basic uncertainty construction."""
    stats = QueryStats()
    counters = QueryCounters()
    cand = w.index_o.range_search(qr.mbr, stats)
    answer = _run_query(w, qr, seed, cand, _candidate_areas_indexed,
                        optimized=False, stats=stats, counters=counters)
    return answer, stats, counters


def query_optimized(w: Workspace, qr: QueryRange, seed: int = 0):
    """Twin-index strategy with pruning, ordering, postpone and lazy update."""
    stats = QueryStats()
    counters = QueryCounters()
    cand = w.index_o.range_search(qr.mbr, stats)
    answer = _run_query(w, qr, seed, cand, _candidate_areas_indexed,
                        optimized=True, stats=stats, counters=counters)
    return answer, stats, counters


def query_precomputed(w: Workspace, qr: QueryRange, seed: int = 0):
    """Query against precomputed, indexed uncertainty regions."""
    if w.precomputed is None or w.index_u is None:
        raise MissingPrecomputationError("run precompute_all before PSO queries")
    missing = w.objects.keys() - w.precomputed.keys()
    if missing:
        raise MissingPrecomputationError(
            f"{len(missing)} objects lack precomputed regions")
    stats = QueryStats()
    counters = QueryCounters()
    cand = w.index_u.range_search(qr.mbr, stats)
    answer = _run_query(w, qr, seed, cand, None, optimized=True,
                        stats=stats, counters=counters, stored_u=w.precomputed)
    return answer, stats, counters


STRATEGIES = {
    "B": query_scan,
    "S": query_basic,
    "SO": query_optimized,
    "PSO": query_precomputed,
}


# ---------------------------------------------------------------------------
# precomputation and maintenance
# ---------------------------------------------------------------------------

@dataclass
class PrecomputeReport:
    seconds: float
    objects_processed: int
    counters: OpCounters


def precompute_all(w: Workspace, ids=None) -> PrecomputeReport:
    """Compute and index the uncertainty region of every object (or of the
    given subset, for staged builds)."""
    if w.index_r is None:
        raise ValueError("index_r must be built before precomputation")
    if w.precomputed is None:
        w.precomputed = {}
    todo = sorted(w.objects) if ids is None else sorted(ids)
    counters = OpCounters()
    stats = QueryStats()
    t0 = time.perf_counter()
    for oid in todo:
        obj = w.objects[oid]
        candidates = _candidate_areas_indexed(w, obj, stats)
        e = approximate_circle(obj.l_r, obj.tau, w.xi)
        w.precomputed[oid] = compute_uncertainty_optimized(
            e, candidates, obj.l_r, counters)
    w.index_u = RTree.build([(u.mbr, oid) for oid, u in w.precomputed.items()],
                            fanout=w.fanout, page_size=w.page_size)
    elapsed = time.perf_counter() - t0
    return PrecomputeReport(seconds=elapsed, objects_processed=len(todo),
                            counters=counters)


def report_location(w: Workspace, oid: int, new_l: Point) -> None:
    """Distance-threshold location update.

    Moves the object's index entry, and — when its uncertainty region has
    already been precomputed — recomputes and reindexes that region before
    any later query can observe the object.
    """
    if oid not in w.objects:
        raise UnknownObjectError(f"unknown object id {oid!r}")
    probe = Mbr(new_l[0], new_l[1], new_l[0], new_l[1])
    for aid in w.index_r.range_search(probe):
        verdict = point_in_polygon(new_l, w.areas[aid].shape)
        if verdict is Containment.INSIDE:
            raise ConstraintViolationError(
                f"location {tuple(new_l)} lies inside restricted area {aid}")
    old = w.objects[oid]
    obj = MovingObject(oid, Point(*new_l), old.tau)
    w.objects[oid] = obj
    w.index_o.remove(oid)
    w.index_o.insert(obj.circle_mbr(), oid)
    w.invalidate_caches()
    if w.precomputed is not None and oid in w.precomputed:
        candidates = _candidate_areas_indexed(w, obj, QueryStats())
        e = approximate_circle(obj.l_r, obj.tau, w.xi)
        u = compute_uncertainty_optimized(e, candidates, obj.l_r)
        w.precomputed[oid] = u
        w.index_u.remove(oid)
        w.index_u.insert(u.mbr, oid)
