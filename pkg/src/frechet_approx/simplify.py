"""Greedy mu-simplification and matchings between curves and their simplifications."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels as K
from .errors import UsageError
from .geometry import ClosedCurve, Matching, PolygonalCurve


@dataclass(frozen=True)
class SimplificationResult:
    simplified: PolygonalCurve
    kept_indices: np.ndarray
    radius: float
    # When the forced final vertex coincides with the previously kept one,
    # the earlier index is dropped and remembered here for the matching.
    tail_start: Optional[int] = field(default=None, repr=False)


def simplify(P: PolygonalCurve, mu: float) -> SimplificationResult:
    """Greedy scan: keep the first vertex at distance >= mu from the last kept one.

    The final vertex is always kept.  In the rare case that it lands exactly
    on the last kept vertex, that vertex is replaced by the final one.  If
    this leaves a single point (every vertex within mu of the start, and the
    curve returns to it), the curve is returned unchanged.
    """
    if mu < 0:
        raise UsageError("simplification radius must be non-negative")
    V = P.vertices
    kept = K.greedy_simplify(V, float(mu))
    tail = None
    if kept.size >= 2 and np.array_equal(V[kept[-1]], V[kept[-2]]):
        if kept.size == 2:
            kept = np.arange(V.shape[0])
        else:
            tail = int(kept[-2])
            kept = np.concatenate([kept[:-2], kept[-1:]])
    simplified = P if kept.size == V.shape[0] else PolygonalCurve._trusted(V[kept])
    return SimplificationResult(simplified, kept, float(mu), tail)


def simplification_matching(P: PolygonalCurve, R: SimplificationResult) -> Matching:
    """Matching between P and R.simplified of width at most R.radius.

    For each simplified edge the simplified point waits at the edge's start
    vertex while P runs through all but the last original sub-edge; then both
    move together over the last one.
    """
    kept = np.asarray(R.kept_indices)
    if kept.size < 2 or kept[0] != 0 or kept[-1] != P.n_edges or R.simplified.n_vertices != kept.size:
        raise UsageError("simplification result does not belong to this curve")
    m = kept.size
    eff = kept.copy()
    if R.tail_start is not None:
        eff[-1] = R.tail_start
    k = np.arange(m - 1, dtype=float)
    s = np.empty(2 * (m - 1) + 1)
    t = np.empty_like(s)
    s[0], t[0] = 0.0, 0.0
    s[1::2] = eff[1:] - 1
    t[1::2] = k
    s[2::2] = eff[1:]
    t[2::2] = k + 1
    if R.tail_start is not None:
        s = np.append(s, float(kept[-1]))
        t = np.append(t, float(m - 1))
    keep = np.ones(s.size, dtype=bool)
    keep[1:] = (s[1:] != s[:-1]) | (t[1:] != t[:-1])
    return Matching(s[keep], t[keep], check=False)


def _coordinate_ranges(src: np.ndarray, dst: np.ndarray, b: np.ndarray):
    """For each query b, the range [first, last] of dst matched to src == b.

    ``src`` is the non-decreasing coordinate on the shared curve.
    """
    lo = np.searchsorted(src, b, side="left")
    hi = np.searchsorted(src, b, side="right")
    exact = hi > lo
    first = np.empty(b.size)
    last = np.empty(b.size)
    first[exact] = dst[lo[exact]]
    last[exact] = dst[hi[exact] - 1]
    ne = ~exact
    if np.any(ne):
        r = np.clip(lo[ne], 1, src.size - 1)
        l0 = r - 1
        w = np.clip((b[ne] - src[l0]) / (src[r] - src[l0]), 0.0, 1.0)
        val = dst[l0] + w * (dst[r] - dst[l0])
        first[ne] = val
        last[ne] = val
    return first, last


def compose_matchings(M1: Matching, M2: Matching) -> Matching:
    """Chain a matching A~B with a matching B~C into a matching A~C.

    Breakpoints are placed at every B-coordinate that is a breakpoint of
    either input.  Where one side holds its B-coordinate while moving on the
    other curve, the whole moved range is paired with the held value.
    """
    if abs(M1.t[-1] - M2.s[-1]) > 1e-9 or abs(M1.t[0] - M2.s[0]) > 1e-9:
        raise UsageError("matchings do not share the middle curve")
    b = np.union1d(M1.t, M2.s)
    a_first, a_last = _coordinate_ranges(M1.t, M1.s, b)
    c_first, c_last = _coordinate_ranges(M2.s, M2.t, b)
    s = np.empty(2 * b.size)
    t = np.empty(2 * b.size)
    s[0::2], s[1::2] = a_first, a_last
    t[0::2], t[1::2] = c_first, c_last
    s = np.maximum.accumulate(s)
    t = np.maximum.accumulate(t)
    keep = np.ones(s.size, dtype=bool)
    keep[1:] = (s[1:] != s[:-1]) | (t[1:] != t[:-1])
    return Matching(s[keep], t[keep], check=False)


def compose_chain(*matchings: Matching) -> Matching:
    out = matchings[0]
    for M in matchings[1:]:
        out = compose_matchings(out, M)
    return out


@dataclass(frozen=True)
class ClosedSimplification:
    """Simplification of a closed curve, with the matching of the opened loops."""

    simplified: ClosedCurve
    kept_indices: np.ndarray
    radius: float
    loop_matching: Matching


def simplify_closed(P: ClosedCurve, mu: float) -> ClosedSimplification:
    """Greedy scan around the loop starting at vertex 0.

    The last kept vertex closes back to vertex 0, so the closing edge may be
    shorter than mu.  Fewer than three kept vertices cannot form a closed
    curve; the input is then returned unchanged.
    """
    loop = P.loop()
    R = simplify(loop, mu)
    kept = R.kept_indices[:-1]
    if kept.size < 3:
        n = P.n_vertices
        return ClosedSimplification(P, np.arange(n), float(mu), Matching.identity(n))
    simplified = P if kept.size == P.n_vertices else ClosedCurve._trusted(P.vertices[kept])
    return ClosedSimplification(simplified, kept, float(mu), simplification_matching(loop, R))
