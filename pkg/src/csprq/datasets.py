"""Dataset generation, real-data normalization, and the on-disk text formats.

Formats (one record per line, ``#`` starts a comment):

* points file: ``id x y tau``
* areas file:  ``id RECT xlo ylo xhi yhi`` or ``id x1 y1 x2 y2 ... xk yk``

``load_real`` ingests raw third-party files (points as ``x y`` lines, boxes
as 4 or 5 numeric columns), normalizes both into the working space, filters
degenerate and overlapping boxes, and drops points falling inside a kept
box.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DatasetFormatError, PlacementError
from .geometry import Containment, Mbr, Point, SimplePolygon, point_in_polygon
from .uncertainty import MovingObject, RestrictedArea, approximate_circle

DEFAULT_SPACE = 10000.0
DEFAULT_TAU_RANGE = (20.0, 50.0)
_MAX_RETRIES = 1000


class _MbrGrid:
    """Uniform-grid bucket index over boxes for disjointness and point tests."""

    def __init__(self, cell: float):
        self.cell = max(cell, 1e-9)
        self.buckets: dict = {}
        self.boxes: list = []

    def _cells(self, m: Mbr):
        cx0 = int(m.xlo // self.cell)
        cx1 = int(m.xhi // self.cell)
        cy0 = int(m.ylo // self.cell)
        cy1 = int(m.yhi // self.cell)
        for cx in range(cx0, cx1 + 1):
            for cy in range(cy0, cy1 + 1):
                yield (cx, cy)

    def add(self, m: Mbr, payload) -> None:
        idx = len(self.boxes)
        self.boxes.append((m, payload))
        for cell in self._cells(m):
            self.buckets.setdefault(cell, []).append(idx)

    def overlapping(self, m: Mbr, open_intervals: bool = False):
        seen = set()
        for cell in self._cells(m):
            for idx in self.buckets.get(cell, ()):
                if idx in seen:
                    continue
                seen.add(idx)
                b, payload = self.boxes[idx]
                if open_intervals:
                    hit = (b.xlo < m.xhi and m.xlo < b.xhi
                           and b.ylo < m.yhi and m.ylo < b.yhi)
                else:
                    hit = (b.xlo <= m.xhi and m.xlo <= b.xhi
                           and b.ylo <= m.yhi and m.ylo <= b.yhi)
                if hit:
                    yield b, payload


def _regular_area(center: Point, zeta: int, circumradius: float) -> SimplePolygon:
    return approximate_circle(center, circumradius, zeta)


def generate_synthetic(n_objects: int, n_areas: int, zeta: int = 4,
                       area_w: float = 40.0, area_h: float = 10.0,
                       regular: bool = False, circumradius: float = 20.0,
                       space: float = DEFAULT_SPACE,
                       tau_range=DEFAULT_TAU_RANGE, seed: int = 0):
    """Random dataset: disjoint restricted areas uniformly placed in the
    space, then object locations rejected until outside every area.

    Areas are axis-aligned ``area_w x area_h`` rectangles by default, or
    regular ``zeta``-gons with the given center-to-vertex distance when
    ``regular`` is set.  Distance thresholds are uniform over ``tau_range``.
    Raises PlacementError when the space is too crowded.
    """
    rng = np.random.default_rng(seed)
    if regular:
        extent = 2.0 * circumradius
    else:
        extent = max(area_w, area_h)
    grid = _MbrGrid(cell=max(extent, space / 256.0))

    areas = []
    for aid in range(n_areas):
        for _ in range(_MAX_RETRIES):
            if regular:
                cx = rng.uniform(circumradius, space - circumradius)
                cy = rng.uniform(circumradius, space - circumradius)
                shape = _regular_area(Point(cx, cy), zeta, circumradius)
            else:
                x = rng.uniform(0.0, space - area_w)
                y = rng.uniform(0.0, space - area_h)
                shape = SimplePolygon.rectangle(x, y, x + area_w, y + area_h)
            if next(grid.overlapping(shape.mbr), None) is None:
                grid.add(shape.mbr, shape)
                areas.append(RestrictedArea(aid, shape))
                break
        else:
            raise PlacementError(
                f"could not place area {aid} after {_MAX_RETRIES} retries")

    objects = []
    for oid in range(n_objects):
        for _ in range(_MAX_RETRIES):
            x = rng.uniform(0.0, space)
            y = rng.uniform(0.0, space)
            if _point_clear(grid, x, y):
                tau = rng.uniform(*tau_range)
                objects.append(MovingObject(oid, Point(x, y), tau))
                break
        else:
            raise PlacementError(
                f"could not place object {oid} after {_MAX_RETRIES} retries")
    return objects, areas


def _point_clear(grid: _MbrGrid, x: float, y: float) -> bool:
    """True unless (x, y) is strictly inside some area (boundary is fine)."""
    probe = Mbr(x, y, x, y)
    for _box, shape in grid.overlapping(probe):
        if point_in_polygon(Point(x, y), shape) is Containment.INSIDE:
            return False
    return True


# ---------------------------------------------------------------------------
# package text formats
# ---------------------------------------------------------------------------

def write_points(path, objects) -> None:
    with open(path, "w") as fh:
        fh.write("# id x y tau\n")
        for o in objects:
            fh.write(f"{o.id} {o.l_r.x!r} {o.l_r.y!r} {o.tau!r}\n")


def write_areas(path, areas) -> None:
    with open(path, "w") as fh:
        fh.write("# id RECT xlo ylo xhi yhi | id x1 y1 x2 y2 ...\n")
        for a in areas:
            v = a.shape.vertices
            m = a.shape.mbr
            if len(v) == 4 and _is_axis_rect(v):
                fh.write(f"{a.id} RECT {m.xlo!r} {m.ylo!r} {m.xhi!r} {m.yhi!r}\n")
            else:
                flat = " ".join(repr(float(c)) for xy in v for c in xy)
                fh.write(f"{a.id} {flat}\n")


def _is_axis_rect(v: np.ndarray) -> bool:
    for i in range(4):
        x1, y1 = v[i]
        x2, y2 = v[(i + 1) % 4]
        if x1 != x2 and y1 != y2:
            return False
    return True


def _data_lines(path):
    with open(path) as fh:
        for ln, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            yield ln, line


def read_points(path) -> list:
    objects = []
    for ln, line in _data_lines(path):
        parts = line.split()
        if len(parts) != 4:
            raise DatasetFormatError(path, ln, f"expected 'id x y tau', got {len(parts)} fields")
        try:
            oid = int(parts[0])
            x, y, tau = (float(p) for p in parts[1:])
        except ValueError as exc:
            raise DatasetFormatError(path, ln, str(exc)) from None
        objects.append(MovingObject(oid, Point(x, y), tau))
    return objects


def read_areas(path) -> list:
    areas = []
    for ln, line in _data_lines(path):
        parts = line.split()
        try:
            aid = int(parts[0])
            if len(parts) >= 2 and parts[1].upper() == "RECT":
                if len(parts) != 6:
                    raise DatasetFormatError(path, ln, "RECT record needs 4 coordinates")
                xlo, ylo, xhi, yhi = (float(p) for p in parts[2:6])
                shape = SimplePolygon.rectangle(xlo, ylo, xhi, yhi)
            else:
                coords = [float(p) for p in parts[1:]]
                if len(coords) < 6 or len(coords) % 2:
                    raise DatasetFormatError(path, ln, "vertex list needs >= 3 x,y pairs")
                shape = SimplePolygon(np.array(coords).reshape(-1, 2))
        except DatasetFormatError:
            raise
        except ValueError as exc:
            raise DatasetFormatError(path, ln, str(exc)) from None
        areas.append(RestrictedArea(aid, shape))
    return areas


# ---------------------------------------------------------------------------
# real-data ingestion
# ---------------------------------------------------------------------------

@dataclass
class LoadReport:
    points_read: int
    points_kept: int
    rects_read: int
    rects_kept: int
    rects_degenerate: int
    rects_overlapping: int


def load_real(points_file, rects_file, space: float = DEFAULT_SPACE,
              tau_range=DEFAULT_TAU_RANGE, seed: int = 0):
    """Normalize raw point / box datasets into the working space.

    Boxes with zero width or height are dropped, boxes whose interior
    overlaps an earlier kept box are dropped (keep-first), and points
    strictly inside any surviving box are dropped.  Returns
    (objects, areas, LoadReport).
    """
    raw_pts = _read_raw_points(points_file)
    raw_rects = _read_raw_rects(rects_file)

    pts = _minmax_normalize(raw_pts, space)
    rects = np.empty_like(raw_rects)
    if len(raw_rects):
        lo = _minmax_normalize(raw_rects[:, 0:2], space,
                               bounds=_rect_bounds(raw_rects))
        hi = _minmax_normalize(raw_rects[:, 2:4], space,
                               bounds=_rect_bounds(raw_rects))
        rects[:, 0:2] = lo
        rects[:, 2:4] = hi

    degenerate = 0
    overlapping = 0
    grid = _MbrGrid(cell=space / 256.0)
    kept_rects = []
    for row in rects:
        xlo, xhi = sorted((row[0], row[2]))
        ylo, yhi = sorted((row[1], row[3]))
        if xhi - xlo <= 0.0 or yhi - ylo <= 0.0:
            degenerate += 1
            continue
        m = Mbr(xlo, ylo, xhi, yhi)
        if next(grid.overlapping(m, open_intervals=True), None) is not None:
            overlapping += 1
            continue
        grid.add(m, None)
        kept_rects.append(m)

    rng = np.random.default_rng(seed)
    objects = []
    kept_pts = 0
    for x, y in pts:
        probe = Mbr(x, y, x, y)
        inside = any(b.xlo < x < b.xhi and b.ylo < y < b.yhi
                     for b, _ in grid.overlapping(probe))
        if inside:
            continue
        tau = rng.uniform(*tau_range)
        objects.append(MovingObject(kept_pts, Point(float(x), float(y)), tau))
        kept_pts += 1

    areas = [RestrictedArea(i, SimplePolygon.rectangle(m.xlo, m.ylo, m.xhi, m.yhi))
             for i, m in enumerate(kept_rects)]
    report = LoadReport(points_read=len(pts), points_kept=kept_pts,
                        rects_read=len(rects), rects_kept=len(kept_rects),
                        rects_degenerate=degenerate, rects_overlapping=overlapping)
    return objects, areas, report


def _read_raw_points(path) -> np.ndarray:
    rows = []
    for ln, line in _data_lines(path):
        parts = line.replace(",", " ").split()
        if len(parts) < 2:
            raise DatasetFormatError(path, ln, "point record needs two coordinates")
        try:
            rows.append((float(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise DatasetFormatError(path, ln, str(exc)) from None
    return np.asarray(rows, dtype=np.float64).reshape(-1, 2)


def _read_raw_rects(path) -> np.ndarray:
    rows = []
    for ln, line in _data_lines(path):
        parts = line.replace(",", " ").split()
        try:
            if len(parts) == 4:
                vals = [float(p) for p in parts]
            elif len(parts) >= 5:
                vals = [float(p) for p in parts[-4:]]
            else:
                raise DatasetFormatError(path, ln, "box record needs four coordinates")
        except DatasetFormatError:
            raise
        except ValueError as exc:
            raise DatasetFormatError(path, ln, str(exc)) from None
        rows.append(vals)
    return np.asarray(rows, dtype=np.float64).reshape(-1, 4)


def _rect_bounds(rects: np.ndarray):
    xs = np.concatenate([rects[:, 0], rects[:, 2]])
    ys = np.concatenate([rects[:, 1], rects[:, 3]])
    return (xs.min(), xs.max()), (ys.min(), ys.max())


def _minmax_normalize(xy: np.ndarray, space: float, bounds=None) -> np.ndarray:
    """Per-axis min-max scaling into [0, space]."""
    if len(xy) == 0:
        return xy
    out = np.empty_like(xy)
    for axis in range(2):
        v = xy[:, axis]
        lo, hi = bounds[axis] if bounds is not None else (v.min(), v.max())
        if hi > lo:
            out[:, axis] = (v - lo) / (hi - lo) * space
        else:
            out[:, axis] = space / 2.0
    return out
