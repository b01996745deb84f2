"""Probabilistic range queries over uncertain moving objects whose movement
is constrained by polygonal restricted areas."""

from ._kernels import BACKEND as KERNEL_BACKEND
from .engine import (STRATEGIES, QueryAnswer, QueryCounters, QueryRange,
                     QueryStats, Workspace, build_workspace, precompute_all,
                     query_basic, query_optimized, query_precomputed,
                     query_scan, report_location)
from .geometry import (Containment, Mbr, Point, SimplePolygon, mbr_intersects,
                       point_in_polygon, polygon_area, span_of)
from .probability import (DISTORTED_GAUSSIAN, UNIFORM, Pdf,
                          probability_monte_carlo, probability_uniform)
from .regions import (Region, RegionSet, point_in_region, region_area,
                      region_intersect_rect, region_subtract, regionset_area)
from .rtree import AccessStats, RTree
from .uncertainty import (MovingObject, OpCounters, RestrictedArea,
                          approximate_circle, compute_uncertainty_basic,
                          compute_uncertainty_optimized, intersect_with_query)

__version__ = "0.1.0"

__all__ = [
    "AccessStats", "Containment", "DISTORTED_GAUSSIAN", "KERNEL_BACKEND",
    "Mbr", "MovingObject", "OpCounters", "Pdf", "Point", "QueryAnswer",
    "QueryCounters", "QueryRange", "QueryStats", "RTree", "Region",
    "RegionSet", "RestrictedArea", "STRATEGIES", "SimplePolygon", "UNIFORM",
    "Workspace", "approximate_circle", "build_workspace",
    "compute_uncertainty_basic", "compute_uncertainty_optimized",
    "intersect_with_query", "mbr_intersects", "point_in_polygon",
    "point_in_region", "polygon_area", "precompute_all",
    "probability_monte_carlo", "probability_uniform", "query_basic",
    "query_optimized", "query_precomputed", "query_scan", "region_area",
    "region_intersect_rect", "region_subtract", "regionset_area",
    "report_location", "span_of",
]
