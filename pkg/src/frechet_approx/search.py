"""The approximation pipeline: deciders, interval searches and the main algorithm."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Union

import numpy as np

from .errors import ContractError, UsageError
from .freespace import decide_reachable, extract_matching, relevant_vertex_edge_radii
from .geometry import Matching, PolygonalCurve, check_same_dim, matching_width
from .simplify import compose_chain, simplification_matching, simplify
from .wspd import approx_distances

# Constant relating the fuzzy decider's slack to the requested one: with
# eps' = eps/3 we get (1 + eps')**2 <= 1 + eps on (0, 1].
C1 = 1.0 / 3.0
# Approximation constant of the per-round decisions in the cascade.
C2 = 1.0 / 8.0
# Largest combined vertex count handed to the exact oracle.
EXACT_CAP = 200


@dataclass
class SearchStats:
    """Per-invocation work counters."""

    decisions: int = 0
    cells: int = 0
    fuzzy_calls: int = 0
    phase_cells: dict = field(default_factory=dict)
    round_cells: List[int] = field(default_factory=list)
    phase: str = "main"

    def record(self, visited: int):
        self.decisions += 1
        self.cells += visited
        self.phase_cells[self.phase] = self.phase_cells.get(self.phase, 0) + visited


def _decide(A, B, delta, stats: Optional[SearchStats], record=True):
    D = decide_reachable(A, B, delta, record=record)
    if stats is not None:
        stats.record(D.visitedCount)
    return D


class _LazyMatching:
    """Outcome carrying a matching that is built only when asked for."""

    def __init__(self, matching: Optional[Matching] = None,
                 builder: Optional[Callable[[], Matching]] = None):
        self._matching = matching
        self._builder = builder

    @property
    def matching(self) -> Matching:
        if self._matching is None:
            self._matching = self._builder()
            self._builder = None
        return self._matching


class AtMost(_LazyMatching):
    """d_F <= bound, witnessed by the matching."""

    def __init__(self, bound: float, matching=None, builder=None):
        super().__init__(matching, builder)
        self.bound = float(bound)

    def __repr__(self):
        return f"AtMost({self.bound!r})"


class Less(_LazyMatching):
    """d_F <= delta, witnessed by a matching of width <= delta."""

    def __init__(self, delta: float, matching=None, builder=None):
        super().__init__(matching, builder)
        self.delta = float(delta)

    def __repr__(self):
        return f"Less({self.delta!r})"


@dataclass(frozen=True)
class GreaterThan:
    delta: float


@dataclass(frozen=True)
class Greater:
    delta: float


class Approximation:
    """A matching together with its width.

    ``curves`` are the two (open) curves the matching refers to; for closed
    inputs these are the opened loops and ``b_start`` records where the
    second curve was opened.
    """

    def __init__(self, matching: Matching, A, B, value: Optional[float] = None,
                 b_start: float = 0.0):
        self.matching = matching
        self.curves = (A, B)
        self.b_start = float(b_start)
        self.value = matching_width(matching, A, B) if value is None else float(value)

    def __repr__(self):
        return f"Approximation({self.value!r})"


@dataclass(frozen=True)
class Outside:
    side: str  # "below" or "above"


@dataclass
class ApproxResult:
    value: float
    matching: Matching
    eps: float
    stats: Optional[SearchStats] = None


def _check_eps(eps, upper_inclusive=True):
    ok = eps > 0 and (eps <= 1 if upper_inclusive else eps < 1)
    if not ok:
        raise UsageError(f"eps must lie in (0, 1{']' if upper_inclusive else ')'}, got {eps}")


def fuzzy_decide(A: PolygonalCurve, B: PolygonalCurve, delta: float, eps: float,
                 stats: Optional[SearchStats] = None) -> Union[AtMost, GreaterThan]:
    """AtMost((1+eps) delta) or GreaterThan(delta), decided on mu-simplified curves.

    Both curves are simplified at mu = (eps/4) delta and the exact decision
    runs at delta + 2 mu.  d_F <= delta always yields AtMost, and
    d_F > (1+eps) delta always yields GreaterThan.
    """
    if not delta > 0:
        raise UsageError("delta must be positive")
    _check_eps(eps)
    check_same_dim(A, B)
    mu = 0.25 * eps * delta
    RA = simplify(A, mu)
    RB = simplify(B, mu)
    if stats is not None:
        stats.fuzzy_calls += 1
    D = _decide(RA.simplified, RB.simplified, delta + 2.0 * mu, stats)
    if not D.endReachable:
        return GreaterThan(float(delta))

    def build():
        return compose_chain(simplification_matching(A, RA), extract_matching(D),
                             simplification_matching(B, RB).inverse())

    return AtMost((1.0 + eps) * delta, builder=build)


def exact_decide(A: PolygonalCurve, B: PolygonalCurve, delta: float, eps: float,
                 stats: Optional[SearchStats] = None) -> Union[Less, Greater, Approximation]:
    """Less(delta), Greater(delta) or a (1+eps)-approximation, via two fuzzy calls."""
    _check_eps(eps)
    e1 = C1 * eps
    first = fuzzy_decide(A, B, delta, e1, stats)
    if isinstance(first, GreaterThan):
        return Greater(float(delta))
    second = fuzzy_decide(A, B, delta / (1.0 + e1), e1, stats)
    if isinstance(second, AtMost):
        return Less(float(delta), builder=lambda: second.matching)
    return Approximation(first.matching, A, B)


def _grid(a: float, b: float, eps: float) -> np.ndarray:
    if a == b:
        return np.array([a])
    m = int(math.floor(math.log(b / a) / math.log1p(eps) + 1e-12))
    xs = a * (1.0 + eps) ** np.arange(m + 1)
    xs = xs[xs < b]
    return np.append(xs, b)


def grid_search(test, a: float, b: float, eps: float):
    """Binary search over a, a(1+eps), ..., b with a generic decision ``test``.

    ``test(x)`` returns None when d_F > x, an Approximation to stop early, or
    a zero-argument callable producing the Approximation that witnesses
    d_F <= x.  Returns an Approximation or Outside.
    """
    xs = _grid(a, b, eps)
    top = test(xs[-1])
    if isinstance(top, Approximation):
        return top
    if top is None:
        return Outside("above")
    hi_out = top
    if xs.size > 1:
        bottom = test(xs[0])
        if isinstance(bottom, Approximation):
            return bottom
        if bottom is not None:
            hi_out = bottom
            xs = xs[:1]
    if xs.size == 1:
        # d_F <= xs[0]; it is within the band only if it exceeds xs[0]/(1+eps).
        below = test(xs[0] / (1.0 + eps))
        if isinstance(below, Approximation):
            return below
        if below is not None:
            return Outside("below")
        return hi_out()
    lo, hi = 0, xs.size - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        r = test(xs[mid])
        if isinstance(r, Approximation):
            return r
        if r is None:
            lo = mid
        else:
            hi, hi_out = mid, r
    return hi_out()


def bisect_values(test, Z: np.ndarray):
    """Binary search over sorted Z; returns (lo, hi, hi_result) or an Approximation.

    lo is the last index with d_F > Z[lo] (-1 if none), hi the first index
    with a yes answer (len(Z) if none).
    """
    lo, hi = -1, Z.size
    hi_out = None
    while hi - lo > 1:
        mid = (lo + hi) // 2
        r = test(float(Z[mid]))
        if isinstance(r, Approximation):
            return r
        if r is None:
            lo = mid
        else:
            hi, hi_out = mid, r
    return lo, hi, hi_out


def _open_test(A, B, eps, mode, stats, cache=None):
    """Decision closure for the searches.  ``cache`` (a dict) lets several
    searches over the same curves and eps share answers for repeated x."""
    if cache is not None:
        key = (mode, eps)
        inner = _open_test(A, B, eps, mode, stats)

        def cached(x):
            if (key, x) not in cache:
                cache[(key, x)] = inner(x)
            return cache[(key, x)]

        return cached

    def test(x):
        if mode == "simplified":
            r = exact_decide(A, B, x, eps, stats)
            if isinstance(r, Greater):
                return None
            if isinstance(r, Approximation):
                return r
            return lambda: Approximation(r.matching, A, B)
        D = _decide(A, B, x, stats)
        if not D.endReachable:
            return None
        return lambda: Approximation(extract_matching(D), A, B)

    return test


def interval_search(A: PolygonalCurve, B: PolygonalCurve, a: float, b: float, eps: float,
                    mode: str = "simplified", stats: Optional[SearchStats] = None,
                    cache: Optional[dict] = None) -> Union[Approximation, Outside]:
    """Binary search over a, a(1+eps), a(1+eps)^2, ..., b.

    ``simplified`` decides with :func:`exact_decide`; ``direct`` decides with
    the exact free-space BFS on the curves as given.  Returns an
    Approximation when d_F lies in [a, b] (or just below a, within a factor
    1+eps), otherwise Outside.
    """
    if not (a > 0 and a <= b):
        raise UsageError(f"need 0 < a <= b, got [{a}, {b}]")
    _check_eps(eps)
    if mode not in ("simplified", "direct"):
        raise UsageError(f"unknown mode {mode!r}")
    return grid_search(_open_test(A, B, eps, mode, stats, cache), a, b, eps)


@dataclass
class Bracket:
    """Atomic interval of Z containing d_F; None marks a missing side."""

    alpha: Optional[float]
    beta: Optional[float]


def approx_binary_search(A: PolygonalCurve, B: PolygonalCurve, Z: np.ndarray, eps: float,
                         stats: Optional[SearchStats] = None,
                         cache: Optional[dict] = None) -> Union[Bracket, Approximation]:
    """Binary search over the sorted values Z with :func:`exact_decide`."""
    Z = np.asarray(Z, dtype=float)
    if Z.size == 0:
        raise UsageError("candidate set is empty")
    r = bisect_values(_open_test(A, B, eps, "simplified", stats, cache), Z)
    if isinstance(r, Approximation):
        return r
    lo, hi, _ = r
    return Bracket(float(Z[lo]) if lo >= 0 else None, float(Z[hi]) if hi < Z.size else None)


def fixed_simplification_search(C: PolygonalCurve, D: PolygonalCurve, lo: float, hi: float,
                                eps: float, stats: Optional[SearchStats] = None) -> Approximation:
    """(1+eps)-approximation of d_F(C, D), known to lie in [lo, hi].

    Requires that no pairwise vertex distance falls strictly inside the
    interval.  The vertex-edge radii of the relevant free space at ``hi``
    are binary searched to an atomic interval [a, b]; the distance is then
    within factor 4 of one of its ends, and exact-decision interval searches
    on [a, 4a] and [b/4, b] finish the job.
    """
    if not (lo > 0 and lo <= hi):
        raise UsageError(f"need 0 < lo <= hi, got [{lo}, {hi}]")
    _check_eps(eps)
    Dhi = _decide(C, D, hi, stats)
    if not Dhi.endReachable:
        raise ContractError(f"distance exceeds the upper limit {hi}")
    Dlo = _decide(C, D, lo, stats)
    if Dlo.endReachable:
        return Approximation(extract_matching(Dlo), C, D)
    radii = relevant_vertex_edge_radii(Dhi)
    events = np.unique(radii[(radii > lo) & (radii < hi)])
    del Dhi
    i_lo, i_hi = -1, events.size
    while i_hi - i_lo > 1:
        mid = (i_lo + i_hi) // 2
        if _decide(C, D, float(events[mid]), stats, record=False).endReachable:
            i_hi = mid
        else:
            i_lo = mid
    a = float(events[i_lo]) if i_lo >= 0 else lo
    b = float(events[i_hi]) if i_hi < events.size else hi
    r = interval_search(C, D, a, min(4.0 * a, b), eps, "direct", stats)
    if isinstance(r, Approximation):
        return r
    r = interval_search(C, D, max(b / 4.0, a), b, eps, "direct", stats)
    if isinstance(r, Approximation):
        return r
    raise ContractError(f"distance not found near the event interval [{a}, {b}]")


def _identical(A, B) -> bool:
    return A.vertices.shape == B.vertices.shape and np.array_equal(A.vertices, B.vertices)


def _exact_result(A, B, eps, stats) -> ApproxResult:
    from .oracle import exact_frechet

    value = exact_frechet(A, B)
    D = _decide(A, B, value, stats)
    M = extract_matching(D)
    return ApproxResult(matching_width(M, A, B), M, eps, stats)


def _sub_z(A, B, z0, eps, stats) -> Approximation:
    """d_F lies below every candidate radius; only vertex-edge scales remain."""
    D0 = _decide(A, B, 0.0, stats)
    if D0.endReachable:
        return Approximation(extract_matching(D0), A, B)
    Dz = _decide(A, B, z0, stats)
    if not Dz.endReachable:
        raise ContractError("distance above the smallest candidate radius")
    radii = relevant_vertex_edge_radii(Dz)
    radii = radii[radii > 0]
    low = min(float(radii[0]) if radii.size else z0, z0) / 4.0
    return fixed_simplification_search(A, B, low, z0, eps, stats)


def approx_frechet(A: PolygonalCurve, B: PolygonalCurve, eps: float,
                   stats: Optional[SearchStats] = None, exact_fallback: bool = True) -> ApproxResult:
    """(1+eps)-approximation of the Frechet distance with a witnessing matching.

    Steps: candidate radii from the WSPD of all vertices; binary search to
    an atomic interval [alpha, beta]; interval searches on the fringes
    [alpha, 4 alpha'] and [beta'/4, beta] with alpha' = 30 alpha/eps and
    beta' = beta/3; otherwise simplify both curves at 3 alpha and search the
    fixed simplifications on [alpha', beta'] at eps/4, then lift the
    matching back to the input curves.

    For eps below 1/n the exact oracle is used when the input is small
    enough (disable with ``exact_fallback=False``).
    """
    check_same_dim(A, B)
    _check_eps(eps, upper_inclusive=False)
    if stats is None:
        stats = SearchStats()
    if _identical(A, B):
        return ApproxResult(0.0, Matching.identity(A.n_edges), eps, stats)
    n = A.n_vertices + B.n_vertices
    if exact_fallback and eps < 1.0 / n and n <= EXACT_CAP:
        return _exact_result(A, B, eps, stats)
    r = _approx_core(A, B, eps, stats)
    return ApproxResult(r.value, r.matching, eps, stats)


def _approx_core(A, B, eps, stats) -> Approximation:
    Z = approx_distances(np.vstack([A.vertices, B.vertices]))
    stats.phase = "binary-search"
    cache = {}
    br = approx_binary_search(A, B, Z, eps, stats, cache)
    if isinstance(br, Approximation):
        return br
    if br.beta is None:
        raise ContractError("distance above every candidate radius")
    if br.alpha is None:
        stats.phase = "sub-candidate"
        return _sub_z(A, B, br.beta, eps, stats)
    alpha, beta = br.alpha, br.beta
    a1 = 30.0 * alpha / eps
    b1 = beta / 3.0
    stats.phase = "fringe"
    r = interval_search(A, B, alpha, max(alpha, min(4.0 * a1, beta)), eps, "simplified", stats, cache)
    if isinstance(r, Approximation):
        return r
    r = interval_search(A, B, max(alpha, b1 / 4.0), beta, eps, "simplified", stats, cache)
    if isinstance(r, Approximation):
        return r
    if a1 >= b1:
        raise ContractError("fringe searches missed an interval they cover")
    stats.phase = "direct"
    mu = 3.0 * alpha
    RA = simplify(A, mu)
    RB = simplify(B, mu)
    inner = fixed_simplification_search(RA.simplified, RB.simplified, a1, b1, eps / 4.0, stats)
    M = compose_chain(simplification_matching(A, RA), inner.matching,
                      simplification_matching(B, RB).inverse())
    return Approximation(M, A, B)


def approx_frechet_cascade(A: PolygonalCurve, B: PolygonalCurve, eps: float,
                           stats: Optional[SearchStats] = None,
                           exact_fallback: bool = True) -> ApproxResult:
    """Same contract as :func:`approx_frechet`, refining with shrinking eps.

    A 3/2-approximation zeta gives d_F in [zeta/1.5, zeta].  Each round
    tests the three quarter points of the current interval at
    approximation C2 * 2**-i and keeps a half-length subinterval; after
    ceil(lg(1/eps)) rounds the best witnessed width is within 1+eps.
    """
    check_same_dim(A, B)
    _check_eps(eps, upper_inclusive=False)
    if stats is None:
        stats = SearchStats()
    if _identical(A, B):
        return ApproxResult(0.0, Matching.identity(A.n_edges), eps, stats)
    n = A.n_vertices + B.n_vertices
    if exact_fallback and eps < 1.0 / n and n <= EXACT_CAP:
        return _exact_result(A, B, eps, stats)
    base = _approx_core(A, B, 0.5, stats)
    best_m, best_w = base.matching, base.value
    if best_w == 0.0:
        return ApproxResult(0.0, best_m, eps, stats)
    lo, hi = best_w / 1.5, best_w
    rounds = max(1, math.ceil(math.log2(1.0 / eps)))
    for i in range(1, rounds + 1):
        stats.phase = f"round-{i}"
        before = stats.cells
        e_i = C2 * 2.0 ** (-i)
        step = (hi - lo) / 4.0
        xs = [lo + j * step for j in range(5)]
        first_less = 4
        for j in (1, 2, 3):
            r = exact_decide(A, B, xs[j], e_i, stats)
            if isinstance(r, Greater):
                continue
            if isinstance(r, Approximation):
                w, m = r.value, r.matching
            else:
                m = r.matching
                w = matching_width(m, A, B)
            if w < best_w:
                best_w, best_m = w, m
            first_less = j
            break
        stats.round_cells.append(stats.cells - before)
        if first_less == 1:
            lo, hi = xs[0], xs[2]
        elif first_less == 2:
            lo, hi = xs[1], xs[3]
        else:
            lo, hi = xs[2], xs[4]
        hi = min(hi, best_w)
    return ApproxResult(best_w, best_m, eps, stats)
