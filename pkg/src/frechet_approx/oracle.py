"""Desk-scale ground truth.

``exact_frechet`` searches the finite set of critical values (endpoint,
vertex-vertex, vertex-edge and monotonicity radii) with the exact BFS
decider.  The discrete variants are plain dynamic programs over vertex
sequences and serve as references for closed curves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import UsageError
from .freespace import decide_reachable
from .geometry import ClosedCurve, PolygonalCurve, check_same_dim

TAGS = ("endpoint", "vertex-vertex", "vertex-edge", "monotonicity")
DEFAULT_CAP = 200


@dataclass(frozen=True)
class CriticalValueSet:
    values: np.ndarray  # sorted ascending
    tags: np.ndarray  # index into TAGS, aligned with values

    def __len__(self):
        return self.values.size

    def count(self, tag: str) -> int:
        return int(np.sum(self.tags == TAGS.index(tag)))


def _vertex_edge(P: np.ndarray, S: np.ndarray) -> np.ndarray:
    """Distances from every point of P to every edge of polyline S."""
    a = S[:-1][None, :, :]
    v = (S[1:] - S[:-1])[None, :, :]
    w = P[:, None, :] - a
    vv = np.einsum("ijk,ijk->ij", v, v)
    t = np.clip(np.einsum("ijk,ijk->ij", w, v) / vv, 0.0, 1.0)
    diff = a + t[..., None] * v - P[:, None, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff)).ravel()


def _monotonicity(P: np.ndarray, S: np.ndarray) -> np.ndarray:
    """Bisector radii for all vertex pairs of P against all edges of S."""
    iu, ju = np.triu_indices(P.shape[0], k=1)
    p = P[iu]
    q = P[ju]
    distinct = np.any(p != q, axis=1)
    p, q = p[distinct], q[distinct]
    if p.shape[0] == 0:
        return np.empty(0)
    n = q - p
    mid = 0.5 * (p + q)
    a = S[:-1]
    b = S[1:]
    fa = np.einsum("ek,pk->pe", a, n) - np.einsum("pk,pk->p", mid, n)[:, None]
    fb = np.einsum("ek,pk->pe", b, n) - np.einsum("pk,pk->p", mid, n)[:, None]
    scale = max(1.0, float(np.max(np.abs(P))), float(np.max(np.abs(S))))
    tol = 1e-12 * scale * scale
    inside = (np.abs(fa) <= tol) & (np.abs(fb) <= tol)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = fa / (fa - fb)
    hit = (~inside) & (fa != fb) & (t >= 0.0) & (t <= 1.0)
    pi, ei = np.nonzero(hit)
    c = a[ei] + t[pi, ei][:, None] * (b[ei] - a[ei])
    out = [np.linalg.norm(c - p[pi], axis=1)]
    if np.any(inside):
        pi, ei = np.nonzero(inside)
        out.append(np.array([K.point_segment_distance(p[x], a[y], b[y]) for x, y in zip(pi, ei)]))
    return np.concatenate(out)


def critical_values(A: PolygonalCurve, B: PolygonalCurve) -> CriticalValueSet:
    """All candidate values for d_F(A, B), tagged by event type."""
    check_same_dim(A, B)
    VA, VB = A.vertices, B.vertices
    groups = [
        np.array([np.linalg.norm(VA[0] - VB[0]), np.linalg.norm(VA[-1] - VB[-1])]),
        np.linalg.norm(VA[:, None, :] - VB[None, :, :], axis=2).ravel(),
        np.concatenate([_vertex_edge(VA, VB), _vertex_edge(VB, VA)]),
        np.concatenate([_monotonicity(VA, VB), _monotonicity(VB, VA)]),
    ]
    values = np.concatenate(groups)
    tags = np.concatenate([np.full(g.size, k, dtype=np.int8) for k, g in enumerate(groups)])
    order = np.argsort(values, kind="mergesort")
    return CriticalValueSet(values[order], tags[order])


def exact_frechet(A: PolygonalCurve, B: PolygonalCurve, cap: int = DEFAULT_CAP) -> float:
    """Smallest critical value at which the exact decider says yes."""
    check_same_dim(A, B)
    if A.n_vertices + B.n_vertices > cap:
        raise UsageError(
            f"exact oracle limited to {cap} vertices in total; use the approximation pipeline"
        )
    cv = np.unique(critical_values(A, B).values)
    lo, hi = -1, cv.size - 1
    # The largest vertex-vertex distance bounds d_F, so cv[-1] is feasible.
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if decide_reachable(A, B, float(cv[mid]), record=False).endReachable:
            hi = mid
        else:
            lo = mid
    return float(cv[hi])


def discrete_frechet(P, Q, cyclic: bool = False) -> float:
    """Discrete Frechet distance of two point sequences.

    In cyclic mode both sequences are read as closed loops and the minimum
    is taken over all starting vertices of P (Q starts at its first vertex).
    """
    P = np.ascontiguousarray(np.asarray(P, dtype=float))
    Q = np.ascontiguousarray(np.asarray(Q, dtype=float))
    if P.ndim != 2 or Q.ndim != 2 or P.shape[0] < 1 or Q.shape[0] < 1:
        raise UsageError("sequences must be non-empty (n, d) arrays")
    if P.shape[1] != Q.shape[1]:
        raise UsageError("sequences live in different dimensions")
    if cyclic:
        return float(K.cyclic_discrete_frechet(P, Q))
    return float(K.discrete_frechet_dp(P, Q))


def densify(V: np.ndarray, eta: float) -> np.ndarray:
    """Subdivide every edge of the polyline V into pieces of length <= eta."""
    V = np.asarray(V, dtype=float)
    seg = np.diff(V, axis=0)
    lens = np.linalg.norm(seg, axis=1)
    k = np.maximum(np.ceil(lens / eta).astype(np.int64), 1)
    idx = np.repeat(np.arange(seg.shape[0]), k)
    frac = (np.arange(k.sum()) - np.repeat(np.cumsum(k) - k, k)) / np.repeat(k, k)
    pts = V[idx] + frac[:, None] * seg[idx]
    return np.vstack([pts, V[-1:]])


def diameter(V: np.ndarray) -> float:
    V = np.asarray(V, dtype=float)
    best = 0.0
    for k in range(0, V.shape[0], 1024):
        d = V[k:k + 1024, None, :] - V[None, :, :]
        best = max(best, float(np.max(np.einsum("ijk,ijk->ij", d, d))))
    return best ** 0.5


def cyclic_frechet_reference(A: ClosedCurve, B: ClosedCurve, eta: float = None):
    """Densified cyclic discrete Frechet of two closed curves.

    Returns (value, eta); the continuous closed-curve distance lies within
    [value - eta, value] up to the usual densification argument.  The
    default eta is the joint diameter divided by 1000.
    """
    check_same_dim(A, B)
    if eta is None:
        eta = diameter(np.vstack([A.vertices, B.vertices])) / 1000.0
    P = densify(A.loop().vertices, eta)[:-1]
    Q = densify(B.loop().vertices, eta)[:-1]
    return discrete_frechet(P, Q, cyclic=True), float(eta)
