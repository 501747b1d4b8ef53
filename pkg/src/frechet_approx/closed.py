"""Frechet distance approximation for closed curves.

A closed pair is reduced to open pairs: the first curve is opened at its
first simplified vertex p, the second at a small set of candidate points
near p, and the open decision procedure runs on each opening.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from . import _kernels as K
from .errors import ContractError, UsageError
from .freespace import decide_reachable, extract_matching
from .geometry import ClosedCurve, Matching, PolygonalCurve, check_same_dim, point_segment_distances
from .search import (
    AtMost, Approximation, C1, Greater, GreaterThan, Less, Outside, SearchStats,
    _check_eps, bisect_values, grid_search,
)
from .simplify import compose_chain, simplify_closed
from .wspd import approx_distances

# Share of eps spent on the candidate spacing; the simplification gets eps/8.
CANDIDATE_SHARE = 0.25
SIMPLIFY_SHARE = 0.125
SNAP = 1e-12


class SplitCandidate(NamedTuple):
    location: float  # edge coordinate on the closed curve, in [0, n)
    point: np.ndarray


def _arc_to_location(cum: np.ndarray, lengths: np.ndarray, arc: float) -> float:
    k = int(np.searchsorted(cum, arc, side="right") - 1)
    k = min(max(k, 0), lengths.size - 1)
    return k + (arc - cum[k]) / lengths[k]


def candidate_split_points(Q: ClosedCurve, p, delta: float, eps: float) -> List[SplitCandidate]:
    """Points of Q near p such that some opening of Q at them is good enough.

    One traversal from vertex 0: a candidate is emitted at the start when it
    lies in B(p, delta), whenever the curve (re-)enters the ball, and after
    every eps*delta of arc length travelled without leaving the ball.
    """
    if not delta > 0:
        raise UsageError("delta must be positive")
    p = np.asarray(p, dtype=float)
    V = Q.loop().vertices
    lengths = np.linalg.norm(np.diff(V, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(lengths)])
    total = cum[-1]
    step = eps * delta
    locs: List[float] = []
    inside = K.dist2(V[0], p) <= delta * delta
    last = 0.0
    if inside:
        locs.append(0.0)
    for k in range(lengths.size):
        lo, hi = K.fs_interval(p, V[k], V[k + 1], float(delta))
        if lo > hi:
            inside = False
            continue
        a_lo = cum[k] + lo * lengths[k]
        a_hi = cum[k] + hi * lengths[k]
        if not (inside and lo == 0.0):
            if a_lo < total:
                locs.append(k + lo)
            last = a_lo
        nxt = last + step
        while nxt <= a_hi and nxt < total:
            locs.append(_arc_to_location(cum, lengths, nxt))
            last = nxt
            nxt = last + step
        inside = hi >= 1.0
    pts = Q.points_at(np.array(locs)) if locs else np.empty((0, Q.dim))
    return [SplitCandidate(float(u), pts[i]) for i, u in enumerate(locs)]


def _split(u: float) -> Tuple[int, float]:
    """Edge index and fraction of location u, snapped to a vertex when very close."""
    k = int(np.floor(u))
    f = u - k
    if f < SNAP:
        return k, 0.0
    if f > 1.0 - SNAP:
        return k + 1, 0.0
    return k, f


def open_closed_curve(C: ClosedCurve, u: float) -> Tuple[PolygonalCurve, float]:
    """Open C at edge coordinate u in [0, n]; returns the open curve and the snapped location."""
    n = C.n_vertices
    k, f = _split(u)
    if f == 0.0:
        return C.opened_at(k % n), float(k)
    V = C.vertices
    p = V[k] + f * (V[(k + 1) % n] - V[k])
    rest = np.roll(V, -(k + 1), axis=0)
    return PolygonalCurve._trusted(np.vstack([p, rest, p])), k + f


def _open_coords(u: np.ndarray, n: int, start: float) -> np.ndarray:
    """Map unrolled loop coordinates in [start, start + n] to the opened curve."""
    k, f = _split(start)
    if f == 0.0:
        return u - start
    out = u - k
    first = u <= k + 1
    last = u >= k + n
    out[first] = (u[first] - (k + f)) / (1.0 - f)
    out[last] = n + (u[last] - (k + n)) / f
    return out


def rotate_loop_matching(M: Matching, nS: int, nT: int, s0: float, t0: float) -> Matching:
    """Re-start a matching between two loops at the path point (s0, t0).

    M pairs loop S (nS edges) with loop T (nT edges), both starting at
    their vertex 0.  The result pairs S opened at s0 with T opened at t0,
    in the edge coordinates of :func:`open_closed_curve`.
    """
    s, t = M.s, M.t
    same = (s == s0) & (t == t0)
    before = (s <= s0) & (t <= t0) & ~same
    after = ~before & ~same
    us = np.concatenate([[s0], s[after], s[before] + nS, [s0 + nS]])
    ut = np.concatenate([[t0], t[after], t[before] + nT, [t0 + nT]])
    R = Matching(np.maximum.accumulate(us), np.maximum.accumulate(ut), check=False).refined()
    out = []
    for u, n, start in ((R.s.copy(), nS, s0), (R.t.copy(), nT, t0)):
        v = _open_coords(u, n, start)
        end = float(n if _split(start)[1] == 0.0 else n + 1)
        v = np.clip(np.maximum.accumulate(v), 0.0, end)
        v[0], v[-1] = 0.0, end
        out.append(v)
    return Matching(out[0], out[1], check=False)


def _first_preimage(M: Matching, t0: float) -> float:
    """Smallest s with (s, t0) on the matching path."""
    lo = int(np.searchsorted(M.t, t0, side="left"))
    if lo < M.t.size and M.t[lo] == t0:
        return float(M.s[lo])
    w = (t0 - M.t[lo - 1]) / (M.t[lo] - M.t[lo - 1])
    return float(M.s[lo - 1] + w * (M.s[lo] - M.s[lo - 1]))


@dataclass
class ClosedWitness:
    matching: Matching  # between a_open and b_open
    a_open: PolygonalCurve
    b_open: PolygonalCurve
    b_start: float  # where B was opened, edge coordinate on B

    def approximation(self) -> Approximation:
        return Approximation(self.matching, self.a_open, self.b_open, b_start=self.b_start)


class ClosedAtMost(AtMost):
    """AtMost outcome whose witness is a matching of the opened inputs."""

    def __init__(self, bound, builder):
        super().__init__(bound)
        self._witness_builder = builder
        self._witness: Optional[ClosedWitness] = None

    @property
    def witness(self) -> ClosedWitness:
        if self._witness is None:
            self._witness = self._witness_builder()
            self._witness_builder = None
        return self._witness

    @property
    def matching(self) -> Matching:
        return self.witness.matching


def _lift(A: ClosedCurve, B: ClosedCurve, SA, SB, D, u_hat: float) -> ClosedWitness:
    """Turn a matching of the opened simplifications into one of the opened inputs."""
    M_dec = extract_matching(D)
    MB = SB.loop_matching
    nB, nBh = B.n_vertices, SB.simplified.n_vertices
    s0 = _first_preimage(MB, u_hat)
    B_open, s0 = open_closed_curve(B, s0)
    R = rotate_loop_matching(MB, nB, nBh, s0, u_hat)
    M = compose_chain(SA.loop_matching, M_dec, R.inverse())
    return ClosedWitness(M, A.loop(), B_open, s0)


def closed_fuzzy_decide(A: ClosedCurve, B: ClosedCurve, delta: float, eps: float,
                        stats: Optional[SearchStats] = None):
    """AtMost((1+eps) delta) or GreaterThan(delta) for closed curves.

    Both curves are simplified at mu = (eps/8) delta.  The simplified first
    curve is opened at its vertex 0 (call it p); candidate openings of the
    simplified second curve are taken within delta1 = delta + 2 mu of p at
    spacing (eps/4) delta1, and each opening is decided exactly at
    (1 + eps/4) delta1.  The lifted matching has width at most
    ((1 + eps/4)**2 + eps/4) delta <= (1 + eps) delta.
    """
    if not delta > 0:
        raise UsageError("delta must be positive")
    _check_eps(eps)
    check_same_dim(A, B)
    mu = SIMPLIFY_SHARE * eps * delta
    SA = simplify_closed(A, mu)
    SB = simplify_closed(B, mu)
    Ah, Bh = SA.simplified, SB.simplified
    delta1 = delta + 2.0 * mu
    ek = CANDIDATE_SHARE * eps
    delta2 = (1.0 + ek) * delta1
    A_open = Ah.loop()
    if stats is not None:
        stats.fuzzy_calls += 1
    for cand in candidate_split_points(Bh, Ah.vertices[0], delta1, ek):
        B_open, u_hat = open_closed_curve(Bh, cand.location)
        D = decide_reachable(A_open, B_open, delta2)
        if stats is not None:
            stats.record(D.visitedCount)
        if D.endReachable:
            return ClosedAtMost((1.0 + eps) * delta,
                                lambda D=D, u=u_hat: _lift(A, B, SA, SB, D, u))
    return GreaterThan(float(delta))


def closed_exact_decide(A: ClosedCurve, B: ClosedCurve, delta: float, eps: float,
                        stats: Optional[SearchStats] = None):
    """Closed-curve analogue of the three-way exact decider."""
    e1 = C1 * eps
    first = closed_fuzzy_decide(A, B, delta, e1, stats)
    if isinstance(first, GreaterThan):
        return Greater(float(delta))
    second = closed_fuzzy_decide(A, B, delta / (1.0 + e1), e1, stats)
    if isinstance(second, AtMost):
        return Less(float(delta), builder=lambda: second.matching)
    return first.witness.approximation()


@dataclass
class ClosedApproxResult:
    """Cyclic matching given as a matching of A opened at vertex 0 and B opened at b_start."""

    value: float
    matching: Matching
    eps: float
    a_open: PolygonalCurve
    b_open: PolygonalCurve
    b_start: float
    stats: Optional[SearchStats] = None


def _closed_test(A, B, eps, stats):
    seen = {}

    def test(x):
        if x not in seen:
            seen[x] = decide(x)
        return seen[x]

    def decide(x):
        first = closed_fuzzy_decide(A, B, x, C1 * eps, stats)
        if isinstance(first, GreaterThan):
            return None
        second = closed_fuzzy_decide(A, B, x / (1.0 + C1 * eps), C1 * eps, stats)
        if isinstance(second, AtMost):
            return lambda: second.witness.approximation()
        return first.witness.approximation()

    return test


def _rotation_of(A: ClosedCurve, B: ClosedCurve) -> Optional[int]:
    """k with B rotated by k equal to A, if any."""
    if A.vertices.shape != B.vertices.shape:
        return None
    for k in np.nonzero(np.all(B.vertices == A.vertices[0], axis=1))[0]:
        if np.array_equal(np.roll(B.vertices, -k, axis=0), A.vertices):
            return int(k)
    return None


def _hausdorff_vertex_bound(A: ClosedCurve, B: ClosedCurve) -> float:
    """max over vertices of either curve of the distance to the other curve."""
    best = 0.0
    for P, C in ((A.vertices, B.loop().vertices), (B.vertices, A.loop().vertices)):
        for p in P:
            d = point_segment_distances(np.repeat(p[None, :], C.shape[0] - 1, axis=0), C[:-1], C[1:])
            best = max(best, float(d.min()))
    return best


def _result(r: Approximation, eps, stats) -> ClosedApproxResult:
    a_open, b_open = r.curves
    return ClosedApproxResult(r.value, r.matching, eps, a_open, b_open, r.b_start, stats)


def approx_frechet_closed(A: ClosedCurve, B: ClosedCurve, eps: float,
                          stats: Optional[SearchStats] = None) -> ClosedApproxResult:
    """(1+eps)-approximate Frechet distance between closed curves.

    Same skeleton as the open algorithm with the closed decider: candidate
    radii from the WSPD, binary search to an atomic interval, fringe
    searches, and a final grid search over the remaining middle range.
    """
    check_same_dim(A, B)
    _check_eps(eps, upper_inclusive=False)
    if stats is None:
        stats = SearchStats()
    k = _rotation_of(A, B)
    if k is not None:
        b_open = B.opened_at(k)
        return ClosedApproxResult(0.0, Matching.identity(A.n_edges), eps, A.loop(), b_open, float(k), stats)
    test = _closed_test(A, B, eps, stats)
    Z = approx_distances(np.vstack([A.vertices, B.vertices]))
    stats.phase = "binary-search"
    br = bisect_values(test, Z)
    if isinstance(br, Approximation):
        return _result(br, eps, stats)
    lo, hi, _ = br
    if hi >= Z.size:
        raise ContractError("distance above every candidate radius")
    beta = float(Z[hi])
    if lo < 0:
        stats.phase = "sub-candidate"
        h = max(_hausdorff_vertex_bound(A, B), beta * 2.0 ** -40)
        r = grid_search(test, min(h, beta), beta, eps)
        if isinstance(r, Outside):
            # Below the resolution floor: accept the witness found there.
            r = test(min(h, beta) / (1.0 + eps))
            if r is None:
                raise ContractError("closed search lost the distance below the floor")
            if not isinstance(r, Approximation):
                r = r()
        return _result(r, eps, stats)
    alpha = float(Z[lo])
    a1 = 30.0 * alpha / eps
    b1 = beta / 3.0
    stats.phase = "fringe"
    for a, b in ((alpha, max(alpha, min(4.0 * a1, beta))), (max(alpha, b1 / 4.0), beta)):
        r = grid_search(test, a, b, eps)
        if isinstance(r, Approximation):
            return _result(r, eps, stats)
    stats.phase = "middle"
    r = grid_search(test, a1, b1, eps)
    if isinstance(r, Approximation):
        return _result(r, eps, stats)
    raise ContractError("closed search failed to bracket the distance")
