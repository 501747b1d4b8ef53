"""Points, segments, curves, matchings and the basic free-space primitives."""

from __future__ import annotations

import math
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import _kernels as K
from .errors import UsageError


def as_point(p, dim: Optional[int] = None) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise UsageError(f"a point must be a non-empty coordinate vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise UsageError("point coordinates must be finite")
    if dim is not None and arr.size != dim:
        raise UsageError(f"dimension mismatch: expected {dim}, got {arr.size}")
    return arr


def _pair(p, q):
    p = as_point(p)
    q = as_point(q, p.size)
    return p, q


def distance(p, q) -> float:
    """Euclidean distance between two points of equal dimension."""
    p, q = _pair(p, q)
    return math.sqrt(K.dist2(p, q))


class Segment(NamedTuple):
    start: Sequence[float]
    end: Sequence[float]


class Interval(NamedTuple):
    """Closed subinterval of [0, 1]; emptiness is represented by ``None``."""

    lo: float
    hi: float

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, other: Optional["Interval"], slack: float = 0.0) -> bool:
        if other is None:
            return True
        return self.lo - slack <= other.lo and other.hi <= self.hi + slack


def make_interval(lo: float, hi: float) -> Optional[Interval]:
    """Build an Interval from kernel output, mapping the empty code to None."""
    if lo > hi:
        return None
    return Interval(float(lo), float(hi))


def _segment(p, seg):
    p = as_point(p)
    a = as_point(seg[0], p.size)
    b = as_point(seg[1], p.size)
    return p, a, b


def free_space_interval(p, seg, delta: float) -> Optional[Interval]:
    """{t in [0,1] : |seg(t) - p| <= delta} as a closed Interval, or None."""
    if delta < 0:
        raise UsageError("delta must be non-negative")
    p, a, b = _segment(p, seg)
    if np.array_equal(a, b):
        return Interval(0.0, 1.0) if math.sqrt(K.dist2(p, a)) <= delta else None
    return make_interval(*K.fs_interval(p, a, b, float(delta)))


def vertex_edge_event_radius(p, seg) -> float:
    """Distance from p to the segment: the radius at which the free interval appears."""
    p, a, b = _segment(p, seg)
    return float(K.point_segment_distance(p, a, b))


def monotonicity_event_radius(p, q, seg) -> Optional[float]:
    """Radius at which the segment meets the bisector of p and q, or None.

    The bisector point c solves |c - p| = |c - q| on the segment.  When the
    whole segment lies in the bisector, the point of the segment closest to
    p is used.
    """
    p, a, b = _segment(p, seg)
    q = as_point(q, p.size)
    n = q - p
    if not np.any(n):
        raise UsageError("monotonicity event needs two distinct points")
    mid = 0.5 * (p + q)
    fa = float(np.dot(a - mid, n))
    fb = float(np.dot(b - mid, n))
    scale = max(float(np.max(np.abs(np.concatenate([p, q, a, b])))), 1.0)
    tol = 1e-12 * scale * scale
    if abs(fa) <= tol and abs(fb) <= tol:
        return float(K.point_segment_distance(p, a, b))
    if fa == fb:
        return None
    t = fa / (fa - fb)
    if t < 0.0 or t > 1.0:
        return None
    c = a + t * (b - a)
    return math.sqrt(K.dist2(p, c))


def segment_length_in_ball(seg, center, r: float) -> float:
    """Length of seg ∩ B(center, r)."""
    if r < 0:
        raise UsageError("radius must be non-negative")
    c, a, b = _segment(center, seg)
    length = math.sqrt(K.dist2(a, b))
    if length == 0.0:
        return 0.0
    lo, hi = K.fs_interval(c, a, b, float(r))
    if lo > hi:
        return 0.0
    return (hi - lo) * length


def segments_length_in_ball(V: np.ndarray, center, r: float) -> float:
    """Total length of the polyline with vertex array V inside B(center, r).

    Vectorised form of :func:`segment_length_in_ball`; the per-segment chord
    is computed from the same closest-point formula.
    """
    c = np.asarray(center, dtype=float)
    a = V[:-1]
    v = V[1:] - a
    w = a - c
    vv = np.einsum("ij,ij->i", v, v)
    t0 = -np.einsum("ij,ij->i", w, v) / vv
    foot = a + t0[:, None] * v - c
    h2 = np.einsum("ij,ij->i", foot, foot)
    disc = r * r - h2
    half = np.sqrt(np.clip(disc, 0.0, None) / vv)
    lo = np.clip(t0 - half, 0.0, 1.0)
    hi = np.clip(t0 + half, 0.0, 1.0)
    chord = np.where(disc >= 0.0, hi - lo, 0.0)
    return float(np.sum(chord * np.sqrt(vv)))


def point_segment_distances(P: np.ndarray, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Row-wise distances from points P[k] to segments A[k]B[k]."""
    v = B - A
    w = P - A
    vv = np.einsum("ij,ij->i", v, v)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(vv > 0, np.einsum("ij,ij->i", w, v) / vv, 0.0)
    t = np.clip(t, 0.0, 1.0)
    diff = A + t[:, None] * v - P
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


def _as_vertex_array(vertices) -> np.ndarray:
    arr = np.array(vertices, dtype=float)
    if arr.ndim != 2 or arr.shape[1] < 1:
        raise UsageError(f"vertices must form an (n, d) array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise UsageError("vertex coordinates must be finite")
    return arr


class PolygonalCurve:
    """Open polygonal curve; edge i joins vertex i to vertex i + 1."""

    __slots__ = ("_v",)
    closed = False

    def __init__(self, vertices):
        v = _as_vertex_array(vertices)
        if v.shape[0] < 2:
            raise UsageError("a polygonal curve needs at least 2 vertices")
        if np.any(np.all(v[1:] == v[:-1], axis=1)):
            raise UsageError("consecutive vertices must be distinct")
        self._v = np.ascontiguousarray(v)
        self._v.setflags(write=False)

    @classmethod
    def _trusted(cls, arr: np.ndarray) -> "PolygonalCurve":
        obj = cls.__new__(cls)
        obj._v = np.ascontiguousarray(arr, dtype=float)
        obj._v.setflags(write=False)
        return obj

    @property
    def vertices(self) -> np.ndarray:
        return self._v

    @property
    def dim(self) -> int:
        return self._v.shape[1]

    @property
    def n_vertices(self) -> int:
        return self._v.shape[0]

    @property
    def n_edges(self) -> int:
        return self._v.shape[0] - 1

    def __len__(self):
        return self._v.shape[0]

    def edge_lengths(self) -> np.ndarray:
        return np.linalg.norm(np.diff(self._v, axis=0), axis=1)

    def length(self) -> float:
        return float(self.edge_lengths().sum())

    def edge(self, i: int) -> Segment:
        return Segment(self._v[i], self._v[i + 1])

    def points_at(self, s) -> np.ndarray:
        """Evaluate the curve at edge coordinates s (array of values in [0, n_edges])."""
        s = np.asarray(s, dtype=float)
        idx = np.clip(np.floor(s).astype(np.int64), 0, self.n_edges - 1)
        frac = s - idx
        a = self._v[idx]
        return a + frac[..., None] * (self._v[idx + 1] - a)

    def point_at(self, s: float) -> np.ndarray:
        return self.points_at(np.array([s]))[0]

    def reversed(self) -> "PolygonalCurve":
        return type(self)._trusted(self._v[::-1])

    def __eq__(self, other):
        return type(other) is type(self) and np.array_equal(self._v, other._v)

    def __hash__(self):
        return hash((type(self).__name__, self._v.tobytes()))

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n_vertices}, dim={self.dim})"


class ClosedCurve:
    """Closed polygonal curve; the closing edge runs from the last vertex to the first."""

    __slots__ = ("_v",)
    closed = True

    def __init__(self, vertices):
        v = _as_vertex_array(vertices)
        if v.shape[0] >= 2 and np.array_equal(v[0], v[-1]):
            v = v[:-1]
        if v.shape[0] < 3:
            raise UsageError("a closed curve needs at least 3 distinct vertices")
        if np.any(np.all(v == np.roll(v, -1, axis=0), axis=1)):
            raise UsageError("consecutive vertices must be distinct")
        self._v = np.ascontiguousarray(v)
        self._v.setflags(write=False)

    @classmethod
    def _trusted(cls, arr: np.ndarray) -> "ClosedCurve":
        obj = cls.__new__(cls)
        obj._v = np.ascontiguousarray(arr, dtype=float)
        obj._v.setflags(write=False)
        return obj

    @property
    def vertices(self) -> np.ndarray:
        return self._v

    @property
    def dim(self) -> int:
        return self._v.shape[1]

    @property
    def n_vertices(self) -> int:
        return self._v.shape[0]

    @property
    def n_edges(self) -> int:
        return self._v.shape[0]

    def __len__(self):
        return self._v.shape[0]

    def loop(self) -> PolygonalCurve:
        """The open curve V0, ..., V_{n-1}, V0."""
        return PolygonalCurve._trusted(np.vstack([self._v, self._v[:1]]))

    def opened_at(self, k: int) -> PolygonalCurve:
        """Open loop starting (and ending) at vertex k."""
        rolled = np.roll(self._v, -k, axis=0)
        return PolygonalCurve._trusted(np.vstack([rolled, rolled[:1]]))

    def rotated(self, k: int) -> "ClosedCurve":
        return ClosedCurve._trusted(np.roll(self._v, -k, axis=0))

    def edge_lengths(self) -> np.ndarray:
        return self.loop().edge_lengths()

    def length(self) -> float:
        return float(self.edge_lengths().sum())

    def points_at(self, s) -> np.ndarray:
        return self.loop().points_at(s)

    def point_at(self, s: float) -> np.ndarray:
        return self.loop().point_at(s)

    def __eq__(self, other):
        return type(other) is type(self) and np.array_equal(self._v, other._v)

    def __hash__(self):
        return hash((type(self).__name__, self._v.tobytes()))

    def __repr__(self):
        return f"ClosedCurve(n={self.n_vertices}, dim={self.dim})"


def check_same_dim(A, B):
    if A.dim != B.dim:
        raise UsageError(f"curves live in different dimensions ({A.dim} vs {B.dim})")


class Matching:
    """Monotone piecewise-linear matching given by breakpoints (s_k, t_k).

    s is an edge coordinate on curve A, t on curve B; both sequences are
    non-decreasing, start at 0 and end at the respective edge counts.
    """

    __slots__ = ("s", "t")

    def __init__(self, s, t, *, check: bool = True):
        s = np.array(s, dtype=float)
        t = np.array(t, dtype=float)
        if check:
            if s.ndim != 1 or s.shape != t.shape or s.size < 1:
                raise UsageError("matching breakpoints must be two equal-length 1-D sequences")
            if np.any(np.diff(s) < 0) or np.any(np.diff(t) < 0):
                raise UsageError("matching is not monotone")
        s.setflags(write=False)
        t.setflags(write=False)
        self.s = s
        self.t = t

    @classmethod
    def identity(cls, n_edges: int) -> "Matching":
        k = np.arange(n_edges + 1, dtype=float)
        return cls(k, k.copy(), check=False)

    @classmethod
    def from_pairs(cls, pairs) -> "Matching":
        arr = np.asarray(pairs, dtype=float).reshape(-1, 2)
        return cls(arr[:, 0], arr[:, 1])

    @property
    def breakpoints(self) -> np.ndarray:
        return np.column_stack([self.s, self.t])

    def __len__(self):
        return self.s.size

    def inverse(self) -> "Matching":
        """The same matching seen from B to A."""
        return Matching(self.t, self.s, check=False)

    def refined(self) -> "Matching":
        """Insert breakpoints wherever either coordinate crosses an integer.

        Between consecutive breakpoints of the result both curve points move
        along a single edge, hence linearly.
        """
        s, t = self.s, self.t
        if s.size < 2:
            return self
        s0, s1, t0, t1 = s[:-1], s[1:], t[:-1], t[1:]
        nseg = s0.size
        seg_parts = [np.arange(nseg)]
        lam_parts = [np.zeros(nseg)]
        for c0, c1 in ((s0, s1), (t0, t1)):
            first = np.floor(c0) + 1.0
            last = np.ceil(c1) - 1.0
            cnt = np.maximum(last - first + 1.0, 0.0).astype(np.int64)
            total = int(cnt.sum())
            if total == 0:
                continue
            seg = np.repeat(np.arange(nseg), cnt)
            offs = np.arange(total) - np.repeat(np.cumsum(cnt) - cnt, cnt)
            vals = first[seg] + offs
            lam = (vals - c0[seg]) / (c1[seg] - c0[seg])
            seg_parts.append(seg)
            lam_parts.append(lam)
        seg = np.concatenate(seg_parts + [np.array([nseg - 1])])
        lam = np.concatenate(lam_parts + [np.array([1.0])])
        order = np.lexsort((lam, seg))
        seg, lam = seg[order], lam[order]
        ns = s0[seg] + lam * (s1[seg] - s0[seg])
        nt = t0[seg] + lam * (t1[seg] - t0[seg])
        # Snap values that are meant to be integers (rounding in the lerp).
        rs, rt = np.round(ns), np.round(nt)
        ns = np.where(np.abs(ns - rs) <= 1e-12 * np.maximum(1.0, np.abs(rs)), rs, ns)
        nt = np.where(np.abs(nt - rt) <= 1e-12 * np.maximum(1.0, np.abs(rt)), rt, nt)
        ns = np.maximum.accumulate(ns)
        nt = np.maximum.accumulate(nt)
        keep = np.ones(ns.size, dtype=bool)
        keep[1:] = (ns[1:] != ns[:-1]) | (nt[1:] != nt[:-1])
        return Matching(ns[keep], nt[keep], check=False)

    def __repr__(self):
        return f"Matching({self.s.size} breakpoints)"


def _check_matching_ends(M: Matching, A, B, tol: float = 1e-9):
    if M.s.size < 1:
        raise UsageError("empty matching")
    if abs(M.s[0]) > tol or abs(M.t[0]) > tol:
        raise UsageError("matching must start at (0, 0)")
    if abs(M.s[-1] - A.n_edges) > tol or abs(M.t[-1] - B.n_edges) > tol:
        raise UsageError(
            f"matching ends at ({M.s[-1]}, {M.t[-1]}), expected ({A.n_edges}, {B.n_edges})"
        )


def leash_lengths(M: Matching, A, B) -> np.ndarray:
    """Leash length at each breakpoint of the refined matching."""
    R = M.refined()
    pa = A.points_at(np.clip(R.s, 0, A.n_edges))
    pb = B.points_at(np.clip(R.t, 0, B.n_edges))
    diff = pa - pb
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


def matching_width(M: Matching, A, B) -> float:
    """Maximum leash length over the matching.

    After refining at integer crossings both points move linearly between
    breakpoints, and the distance of two linearly moving points is convex,
    so the maximum is attained at a breakpoint.
    """
    if np.any(np.diff(M.s) < 0) or np.any(np.diff(M.t) < 0):
        raise UsageError("matching is not monotone")
    check_same_dim(A, B)
    _check_matching_ends(M, A, B)
    return float(np.max(leash_lengths(M, A, B)))
