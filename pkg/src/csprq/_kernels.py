"""Hot numeric kernels: point-in-ring tests, region membership, ring areas.

Two interchangeable backends: numba ``@njit`` loops (default) and pure-numpy
vectorized fallbacks.  Set ``CSPRQ_DISABLE_NUMBA=1`` to force the numpy path
(useful on platforms where numba is unavailable or for benchmarking; see
``benchmarks/kernel_bench.py``).

Both backends perform the same IEEE float comparisons element-wise, so the
boolean membership masks they produce are identical bit-for-bit.  Only the
summation order inside ``ring_signed_area`` differs between backends.

Packed region layout (shared by both backends):
  coords      (m, 2) float64 — ring vertices, all rings concatenated
  ring_off    (R+1,) int64   — coords index where ring k starts, last = m
  region_off  (P+1,) int64   — ring index where region j starts; ring
                               ``region_off[j]`` is region j's outer ring,
                               rings up to ``region_off[j+1]`` are its holes
"""

import os

import numpy as np

BOUNDARY_EPS = 1e-9

_disable = os.environ.get("CSPRQ_DISABLE_NUMBA", "").strip().lower()
USE_NUMBA = _disable not in ("1", "true", "yes")
if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USE_NUMBA = False


# ---------------------------------------------------------------------------
# numba backend: tight scalar loops compiled per point
# ---------------------------------------------------------------------------

def _classify_point_ring(px, py, xs, ys, eps):
    """Ray-crossing classification: 1 inside, 0 on boundary, -1 outside."""
    n = xs.shape[0]
    eps2 = eps * eps
    inside = False
    x1 = xs[n - 1]
    y1 = ys[n - 1]
    for i in range(n):
        x2 = xs[i]
        y2 = ys[i]
        # squared distance from the point to segment (x1,y1)-(x2,y2)
        dx = x2 - x1
        dy = y2 - y1
        seg2 = dx * dx + dy * dy
        if seg2 > 0.0:
            t = ((px - x1) * dx + (py - y1) * dy) / seg2
            if t < 0.0:
                t = 0.0
            elif t > 1.0:
                t = 1.0
            cx = x1 + t * dx - px
            cy = y1 + t * dy - py
            if cx * cx + cy * cy <= eps2:
                return 0
        elif (x1 - px) * (x1 - px) + (y1 - py) * (y1 - py) <= eps2:
            return 0
        # half-open crossing rule avoids double-counting shared vertices
        if (y1 > py) != (y2 > py):
            xint = x1 + (py - y1) * dx / dy
            if px < xint:
                inside = not inside
        x1 = x2
        y1 = y2
    return 1 if inside else -1


def _points_in_rings_nb(pts, coords, ring_off, out, eps):
    npts = pts.shape[0]
    nrings = ring_off.shape[0] - 1
    for k in range(nrings):
        lo = ring_off[k]
        hi = ring_off[k + 1]
        xs = coords[lo:hi, 0]
        ys = coords[lo:hi, 1]
        for i in range(npts):
            out[i, k] = _classify_point_ring(pts[i, 0], pts[i, 1], xs, ys, eps)


def _points_in_regionset_nb(pts, coords, ring_off, region_off, eps):
    npts = pts.shape[0]
    nreg = region_off.shape[0] - 1
    out = np.zeros(npts, dtype=np.bool_)
    for i in range(npts):
        px = pts[i, 0]
        py = pts[i, 1]
        for j in range(nreg):
            r0 = region_off[j]
            r1 = region_off[j + 1]
            lo = ring_off[r0]
            hi = ring_off[r0 + 1]
            v = _classify_point_ring(px, py, coords[lo:hi, 0], coords[lo:hi, 1], eps)
            if v < 0:
                continue
            hit = True
            for k in range(r0 + 1, r1):
                lo = ring_off[k]
                hi = ring_off[k + 1]
                v = _classify_point_ring(px, py, coords[lo:hi, 0], coords[lo:hi, 1], eps)
                if v > 0:  # strictly inside a hole; hole boundary stays in
                    hit = False
                    break
            if hit:
                out[i] = True
                break
    return out


def _ring_signed_area_nb(coords):
    n = coords.shape[0]
    acc = 0.0
    x1 = coords[n - 1, 0]
    y1 = coords[n - 1, 1]
    for i in range(n):
        x2 = coords[i, 0]
        y2 = coords[i, 1]
        acc += x1 * y2 - x2 * y1
        x1 = x2
        y1 = y2
    return 0.5 * acc


# ---------------------------------------------------------------------------
# numpy backend: vectorized over points, loop over edges
# ---------------------------------------------------------------------------

def _classify_points_ring_np(pts, xs, ys, eps):
    """Vectorized version of _classify_point_ring for an array of points."""
    px = pts[:, 0]
    py = pts[:, 1]
    eps2 = eps * eps
    inside = np.zeros(len(pts), dtype=np.bool_)
    boundary = np.zeros(len(pts), dtype=np.bool_)
    x1 = np.roll(xs, 1)
    y1 = np.roll(ys, 1)
    for i in range(len(xs)):
        ax, ay, bx, by = x1[i], y1[i], xs[i], ys[i]
        dx = bx - ax
        dy = by - ay
        seg2 = dx * dx + dy * dy
        if seg2 > 0.0:
            t = np.clip(((px - ax) * dx + (py - ay) * dy) / seg2, 0.0, 1.0)
            cx = ax + t * dx - px
            cy = ay + t * dy - py
            boundary |= cx * cx + cy * cy <= eps2
        else:
            boundary |= (ax - px) ** 2 + (ay - py) ** 2 <= eps2
        crosses = (ay > py) != (by > py)
        if crosses.any():
            with np.errstate(divide="ignore", invalid="ignore"):
                xint = ax + (py - ay) * dx / dy
            inside ^= crosses & (px < xint)
    out = np.where(inside, 1, -1).astype(np.int8)
    out[boundary] = 0
    return out


def _points_in_rings_np(pts, coords, ring_off, out, eps):
    nrings = len(ring_off) - 1
    for k in range(nrings):
        lo, hi = ring_off[k], ring_off[k + 1]
        out[:, k] = _classify_points_ring_np(pts, coords[lo:hi, 0], coords[lo:hi, 1], eps)


def _points_in_regionset_np(pts, coords, ring_off, region_off, eps):
    out = np.zeros(len(pts), dtype=np.bool_)
    nreg = len(region_off) - 1
    for j in range(nreg):
        r0, r1 = region_off[j], region_off[j + 1]
        lo, hi = ring_off[r0], ring_off[r0 + 1]
        hit = _classify_points_ring_np(pts, coords[lo:hi, 0], coords[lo:hi, 1], eps) >= 0
        for k in range(r0 + 1, r1):
            if not hit.any():
                break
            lo, hi = ring_off[k], ring_off[k + 1]
            sub = pts[hit]
            v = _classify_points_ring_np(sub, coords[lo:hi, 0], coords[lo:hi, 1], eps)
            keep = v <= 0
            idx = np.flatnonzero(hit)
            hit[idx[~keep]] = False
        out |= hit
    return out


def _ring_signed_area_np(coords):
    x = coords[:, 0]
    y = coords[:, 1]
    return 0.5 * float(np.sum(np.roll(x, 1) * y - x * np.roll(y, 1)))


# ---------------------------------------------------------------------------
# backend selection
# ---------------------------------------------------------------------------

if USE_NUMBA:
    BACKEND = "numba"
    _classify_point_ring = njit(cache=True)(_classify_point_ring)
    _points_in_rings_impl = njit(cache=True)(_points_in_rings_nb)
    _points_in_regionset_impl = njit(cache=True)(_points_in_regionset_nb)
    _ring_signed_area_impl = njit(cache=True)(_ring_signed_area_nb)
else:
    BACKEND = "numpy"
    _points_in_rings_impl = _points_in_rings_np
    _points_in_regionset_impl = _points_in_regionset_np
    _ring_signed_area_impl = _ring_signed_area_np


def points_in_rings(pts, coords, ring_off, eps=BOUNDARY_EPS):
    """Classify points against every ring: (n_pts, n_rings) int8 of -1/0/1."""
    pts = np.ascontiguousarray(pts, dtype=np.float64)
    out = np.empty((pts.shape[0], len(ring_off) - 1), dtype=np.int8)
    _points_in_rings_impl(pts, coords, ring_off, out, eps)
    return out


def points_in_regionset(pts, coords, ring_off, region_off, eps=BOUNDARY_EPS):
    """Boolean mask: point lies in some region (outer incl. boundary, minus
    strict hole interiors)."""
    pts = np.ascontiguousarray(pts, dtype=np.float64)
    if len(pts) == 0 or len(region_off) <= 1:
        return np.zeros(len(pts), dtype=np.bool_)
    return _points_in_regionset_impl(pts, coords, ring_off, region_off, eps)


def ring_signed_area(coords):
    """Signed shoelace area of one ring (positive for counterclockwise)."""
    return float(_ring_signed_area_impl(np.ascontiguousarray(coords, dtype=np.float64)))


def warmup():
    """Trigger JIT compilation ahead of any timed section."""
    pts = np.array([[0.5, 0.5], [2.0, 2.0]])
    coords = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    ring_off = np.array([0, 4], dtype=np.int64)
    region_off = np.array([0, 1], dtype=np.int64)
    points_in_rings(pts, coords, ring_off)
    points_in_regionset(pts, coords, ring_off, region_off)
    ring_signed_area(coords)
