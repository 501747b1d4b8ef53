"""Approximate Frechet distance between polygonal curves in R^d.

The main entry points are :func:`approx_frechet` (open curves),
:func:`approx_frechet_cascade` and :func:`approx_frechet_closed`.
"""

from .closed import approx_frechet_closed, closed_exact_decide, closed_fuzzy_decide
from .errors import ContractError, FrechetError, ParseError, UsageError
from .freespace import ReachableDiagram, decide_reachable, extract_matching, relevant_vertex_edge_radii
from .geometry import (ClosedCurve, Interval, Matching, PolygonalCurve, Segment, distance,
                       free_space_interval, matching_width, monotonicity_event_radius,
                       segment_length_in_ball, vertex_edge_event_radius)
from .io import CurveFile, load_curve, parse_curve, write_curve
from .oracle import critical_values, cyclic_frechet_reference, discrete_frechet, exact_frechet
from .search import (ApproxResult, SearchStats, approx_binary_search, approx_frechet,
                     approx_frechet_cascade, exact_decide, fixed_simplification_search,
                     fuzzy_decide, interval_search)
from .simplify import compose_matchings, simplification_matching, simplify, simplify_closed
from .wspd import approx_distances, wspd

__all__ = [
    "ApproxResult", "ClosedCurve", "ContractError", "CurveFile", "FrechetError", "Interval",
    "Matching", "ParseError", "PolygonalCurve", "ReachableDiagram", "SearchStats", "Segment",
    "UsageError", "approx_binary_search", "approx_distances", "approx_frechet",
    "approx_frechet_cascade", "approx_frechet_closed", "closed_exact_decide",
    "closed_fuzzy_decide", "compose_matchings", "critical_values", "cyclic_frechet_reference",
    "decide_reachable", "discrete_frechet", "distance", "exact_decide", "exact_frechet",
    "extract_matching", "fixed_simplification_search", "free_space_interval", "fuzzy_decide",
    "interval_search", "load_curve", "matching_width", "monotonicity_event_radius",
    "parse_curve", "relevant_vertex_edge_radii", "segment_length_in_ball",
    "simplification_matching", "simplify", "simplify_closed", "vertex_edge_event_radius",
    "write_curve", "wspd",
]
