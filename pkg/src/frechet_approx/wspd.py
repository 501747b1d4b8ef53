"""Approximate distance selection with a well-separated pair decomposition."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from . import _kernels as K
from .errors import UsageError

SEPARATION = 8.0


@dataclass(frozen=True)
class WspdPair:
    repA: np.ndarray
    repB: np.ndarray
    countA: int
    countB: int


def _points(points) -> np.ndarray:
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or P.shape[0] < 1:
        raise UsageError("expected a non-empty (n, d) point array")
    if not np.all(np.isfinite(P)):
        raise UsageError("point coordinates must be finite")
    return np.ascontiguousarray(np.unique(P, axis=0))


def wspd(points, separation: float = SEPARATION) -> List[WspdPair]:
    """All pairs of a fair-split-tree WSPD, representatives = first point of each node."""
    P = _points(points)
    if P.shape[0] < 2:
        return []
    pairs, _, _, _, perm, start, stop = K.wspd_walk(P, float(separation), True)
    out = []
    for u, v in pairs:
        out.append(WspdPair(P[perm[start[u]]], P[perm[start[v]]],
                            int(stop[u] - start[u]), int(stop[v] - start[v])))
    return out


def wspd_pair_count(points, separation: float = SEPARATION) -> int:
    P = _points(points)
    if P.shape[0] < 2:
        return 0
    return int(K.wspd_walk(P, float(separation), False)[1])


def _doubling_points(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """lo, 2lo, 4lo, ... while below hi, then hi, for each range."""
    steps = np.ceil(np.log2(hi / lo) - 1e-12).astype(np.int64)
    steps = np.maximum(steps, 1)
    rng = np.repeat(np.arange(lo.size), steps)
    k = np.arange(steps.sum()) - np.repeat(np.cumsum(steps) - steps, steps)
    vals = lo[rng] * np.exp2(k)
    return np.unique(np.concatenate([vals, hi]))


def approx_distances(points, compact: bool = True) -> np.ndarray:
    """Sorted candidate radii Z covering every pairwise distance up to a factor 2.

    For each WSPD pair with representatives p, q we set l = (3/4)|pq|; every
    distance realised by that pair lies in [l, 2l].  With ``compact=False``
    Z is the literal multiset {l, 2l}.  By default the ranges [l, 2l] are
    merged into connected components and each component [L, R] is replaced
    by L, 2L, 4L, ..., R, which keeps the covering property
    (x <= y <= x' <= 2x with x, x' in Z) with at most as many values and far
    fewer in practice.
    """
    P = _points(points)
    if P.shape[0] < 2:
        return np.empty(0)
    if not compact:
        pairs = wspd(P)
        ell = np.array([0.75 * np.linalg.norm(p.repA - p.repB) for p in pairs])
        return np.sort(np.concatenate([ell, 2.0 * ell]))
    _, _, lo, hi, _, _, _ = K.wspd_walk(P, SEPARATION, False)
    return _doubling_points(lo, hi)
