"""Curve families, sampled checkers for the realistic-input models, and quadtree covers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import UsageError
from .freespace import decide_reachable
from .geometry import ClosedCurve, PolygonalCurve, point_segment_distances
from .simplify import simplify
from .wspd import approx_distances

FAMILIES = ("grid", "koch", "zigzag", "straight", "spiral", "spiral-pair", "random-walk")


# ---------------------------------------------------------------- generators

def grid_curve(m: int, d: int) -> PolygonalCurve:
    """Boustrophedon path through the integer grid {0..m-1}^d with unit edges."""
    if m < 2 or d < 1:
        raise UsageError("grid needs m >= 2 and d >= 1")
    pts = np.arange(m, dtype=float)[:, None]
    for _ in range(1, d):
        layers = []
        for k in range(m):
            layer = pts if k % 2 == 0 else pts[::-1]
            layers.append(np.hstack([layer, np.full((layer.shape[0], 1), float(k))]))
        pts = np.vstack(layers)
    return PolygonalCurve(pts)


def koch_curve(k: int) -> ClosedCurve:
    """k-th iterate of the Koch snowflake, counter-clockwise, bumps outward."""
    if k < 0:
        raise UsageError("koch level must be non-negative")
    ang = np.pi / 2 + np.array([0.0, 2.0, 4.0]) * np.pi / 3
    V = np.c_[np.cos(ang), np.sin(ang)]
    rot = np.array([[0.5, math.sqrt(3) / 2], [-math.sqrt(3) / 2, 0.5]])  # -60 degrees
    for _ in range(k):
        a = V
        b = np.roll(V, -1, axis=0)
        step = (b - a) / 3.0
        p1 = a + step
        p3 = a + 2 * step
        p2 = p1 + step @ rot.T
        V = np.stack([a, p1, p2, p3], axis=1).reshape(-1, 2)
    return ClosedCurve(V)


def zigzag_curve(n: int, h: float) -> PolygonalCurve:
    """Comb with n vertices alternating between heights 0 and h over [0, 1]."""
    if n < 2 or h <= 0:
        raise UsageError("zigzag needs n >= 2 and h > 0")
    x = np.linspace(0.0, 1.0, n)
    y = np.where(np.arange(n) % 2 == 0, 0.0, h)
    return PolygonalCurve(np.c_[x, y])


def straight_curve(n: int) -> PolygonalCurve:
    """Unit segment along the x axis subdivided into n - 1 equal edges."""
    if n < 2:
        raise UsageError("straight needs n >= 2")
    return PolygonalCurve(np.c_[np.linspace(0.0, 1.0, n), np.zeros(n)])


def spiral_curve(n: int, turns: float = 4.0, growth: float = 0.15, phase: float = 0.0) -> PolygonalCurve:
    """Logarithmic spiral r = exp(growth * theta) sampled at n equally spaced angles.

    A ball around the centre holds about sqrt(1 + growth**2) / growth times
    its radius in curve length, so the default growth keeps the packedness
    near 7.5.
    """
    if n < 2 or turns <= 0 or growth <= 0:
        raise UsageError("spiral needs n >= 2, turns > 0, growth > 0")
    theta_max = 2.0 * np.pi * turns
    theta = (np.arange(n) + phase) * (theta_max / (n - 1))
    # The phase shifts interior samples only; both ends stay on the spiral's ends.
    theta[0] = 0.0
    theta[-1] = theta_max
    r = np.exp(growth * theta)
    return PolygonalCurve(np.c_[r * np.cos(theta), r * np.sin(theta)])


def spiral_pair(n: int, seed: int = 0, turns: Optional[float] = None, growth: Optional[float] = None,
                noise: float = 0.2) -> Tuple[PolygonalCurve, PolygonalCurve]:
    """Two samplings of the same spiral: the second is shifted by half a step
    and its interior vertices are perturbed by noise proportional to the
    local edge length.  Both curves share their endpoints, so the distance
    is decided by the whole curve rather than by one endpoint offset.

    Unless given, ``turns`` is drawn from [3.5, 4.5] and ``growth`` from
    [0.09, 0.11], so different seeds give differently shaped instances while
    a fixed seed gives the same shape at every n.
    """
    rng = np.random.default_rng(seed)
    shape = rng.uniform(-0.5, 0.5, size=2)
    turns = 4.0 + shape[0] if turns is None else turns
    growth = 0.1 + 0.02 * shape[1] if growth is None else growth
    A = spiral_curve(n, turns, growth)
    B = spiral_curve(n, turns, growth, phase=0.5)
    V = B.vertices.copy()
    local = np.linalg.norm(np.diff(V, axis=0), axis=1)
    local = np.concatenate([local[:1], local])
    V[1:-1] += noise * local[1:-1, None] * rng.uniform(-1.0, 1.0, size=(n - 2, V.shape[1]))
    return A, PolygonalCurve(V)


def random_walk(n: int, d: int = 2, seed: int = 0) -> PolygonalCurve:
    rng = np.random.default_rng(seed)
    return PolygonalCurve(np.cumsum(rng.normal(size=(n, d)), axis=0))


def generate(family: str, params: Optional[dict] = None, seed: int = 0):
    """Build a curve of the named family; deterministic for a fixed seed."""
    p = dict(params or {})
    try:
        if family == "grid":
            return grid_curve(int(p.get("m", 3)), int(p.get("d", 2)))
        if family == "koch":
            return koch_curve(int(p.get("k", 2)))
        if family == "zigzag":
            return zigzag_curve(int(p.get("n", 16)), float(p.get("h", 0.5)))
        if family == "straight":
            return straight_curve(int(p.get("n", 16)))
        if family == "spiral":
            return spiral_curve(int(p.get("n", 1024)), float(p.get("turns", 4.0)),
                                float(p.get("growth", 0.15)), float(p.get("phase", 0.0)))
        if family == "spiral-pair":
            which = int(p.get("which", 1))
            turns = float(p["turns"]) if "turns" in p else None
            growth = float(p["growth"]) if "growth" in p else None
            pair = spiral_pair(int(p.get("n", 1024)), seed, turns, growth, float(p.get("noise", 0.2)))
            return pair[which]
        if family == "random-walk":
            return random_walk(int(p.get("n", 32)), int(p.get("d", 2)), seed)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad parameters for {family}: {exc}") from exc
    raise UsageError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")


# ------------------------------------------------------------------ checkers

def _polyline(P) -> np.ndarray:
    return P.loop().vertices if isinstance(P, ClosedCurve) else P.vertices


def _lengths_in_balls(V: np.ndarray, centers: np.ndarray, radii: np.ndarray) -> np.ndarray:
    """Length of polyline V inside each ball B(centers[k], radii[k])."""
    a = V[:-1]
    v = V[1:] - a
    vv = np.einsum("ij,ij->i", v, v)
    seg_len = np.sqrt(vv)
    out = np.empty(centers.shape[0])
    chunk = max(1, 2_000_000 // max(1, a.shape[0]))
    for s in range(0, centers.shape[0], chunk):
        c = centers[s:s + chunk][:, None, :]
        r = radii[s:s + chunk][:, None]
        w = a[None, :, :] - c
        t0 = -np.einsum("bij,ij->bi", w, v) / vv
        foot = w + t0[..., None] * v
        h2 = np.einsum("bij,bij->bi", foot, foot)
        disc = r * r - h2
        half = np.sqrt(np.clip(disc, 0.0, None) / vv)
        lo = np.clip(t0 - half, 0.0, 1.0)
        hi = np.clip(t0 + half, 0.0, 1.0)
        chord = np.where(disc >= 0.0, hi - lo, 0.0)
        out[s:s + chunk] = chord @ seg_len
    return out


def sample_balls(P, trials: int, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    """Balls centred at vertices and edge midpoints with radii equal to the
    distance from the centre to some vertex.  All such balls are used when
    there are at most ``trials`` of them, otherwise a seeded uniform sample."""
    V = _polyline(P)
    centers = np.vstack([V, 0.5 * (V[1:] + V[:-1])])
    nc, nv = centers.shape[0], V.shape[0]
    if nc * nv <= trials:
        ci, vi = np.divmod(np.arange(nc * nv), nv)
    else:
        rng = np.random.default_rng(seed)
        ci = rng.integers(0, nc, trials)
        vi = rng.integers(0, nv, trials)
    C = centers[ci]
    r = np.linalg.norm(V[vi] - C, axis=1)
    keep = r > 0
    return C[keep], r[keep]


@dataclass
class PackednessReport:
    lower_bound_c: float
    witness: Tuple[np.ndarray, float]
    samples: int


def estimate_packedness(P, trials: int = 2000, seed: int = 0, balls=None) -> PackednessReport:
    """Sampled lower bound on c for which P is c-packed (max length-in-ball / radius)."""
    if trials < 1:
        raise UsageError("trials must be >= 1")
    C, r = balls if balls is not None else sample_balls(P, trials, seed)
    if r.size == 0:
        return PackednessReport(0.0, (np.zeros(P.dim), 0.0), 0)
    ratio = _lengths_in_balls(_polyline(P), C, r) / r
    k = int(np.argmax(ratio))
    return PackednessReport(float(ratio[k]), (C[k], float(r[k])), int(r.size))


@dataclass
class DensityReport:
    max_count: int
    witness: Tuple[np.ndarray, float]
    samples: int


def check_low_density(P, trials: int = 2000, seed: int = 0) -> DensityReport:
    """Sampled lower bound on phi: edges longer than r meeting a ball of radius r."""
    if trials < 1:
        raise UsageError("trials must be >= 1")
    V = _polyline(P)
    C, r = sample_balls(P, trials, seed)
    a, b = V[:-1], V[1:]
    elen = np.linalg.norm(b - a, axis=1)
    best, wit = 0, (V[0], 0.0)
    for k in range(r.size):
        long_ = elen > r[k]
        if not np.any(long_):
            continue
        d = point_segment_distances(np.repeat(C[k][None, :], int(long_.sum()), axis=0), a[long_], b[long_])
        cnt = int(np.sum(d <= r[k]))
        if cnt > best:
            best, wit = cnt, (C[k], float(r[k]))
    return DensityReport(best, wit, int(r.size))


def check_kappa_straight(P, samples: int = 2000, seed: int = 0) -> float:
    """Sampled lower bound on kappa: max arclength / distance over point pairs.

    All vertex pairs are used when affordable, otherwise a seeded sample of
    them; ``samples`` random interior point pairs are added.
    """
    V = _polyline(P)
    if V.shape[0] < 2:
        raise UsageError("need at least 2 vertices")
    lens = np.linalg.norm(np.diff(V, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(lens)])
    n = V.shape[0]
    rng = np.random.default_rng(seed)
    if n * (n - 1) // 2 <= 200_000:
        i, j = np.triu_indices(n, k=1)
    else:
        i = rng.integers(0, n, 200_000)
        j = rng.integers(0, n, 200_000)
        i, j = np.minimum(i, j), np.maximum(i, j)
    best = 1.0
    arc = cum[j] - cum[i]
    dist = np.linalg.norm(V[i] - V[j], axis=1)
    ok = dist > 0
    if np.any(ok):
        best = max(best, float(np.max(arc[ok] / dist[ok])))
    total_edges = n - 1
    u = np.sort(rng.uniform(0, total_edges, size=(samples, 2)), axis=1)
    curve = PolygonalCurve._trusted(V)
    pu, pv = curve.points_at(u[:, 0]), curve.points_at(u[:, 1])

    def arclen(x):
        k = np.clip(np.floor(x).astype(np.int64), 0, total_edges - 1)
        return cum[k] + (x - k) * lens[k]

    arc = arclen(u[:, 1]) - arclen(u[:, 0])
    dist = np.linalg.norm(pu - pv, axis=1)
    ok = dist > 1e-12 * max(1.0, float(cum[-1]))
    if np.any(ok):
        best = max(best, float(np.max(arc[ok] / dist[ok])))
    return best


# ------------------------------------------------------------ quadtree cover

@dataclass
class CubeCover:
    corners: np.ndarray  # (k, d) lower corners
    uppers: np.ndarray  # (k, d) upper corners
    assignment: np.ndarray  # leaf index of every input point
    root: Tuple[np.ndarray, float]
    reduced_splits: int = 0
    proper_splits: int = 0
    max_depth: int = 0
    stats: dict = field(default_factory=dict)

    @property
    def sides(self) -> np.ndarray:
        return np.max(self.uppers - self.corners, axis=1)

    @property
    def count(self) -> int:
        return self.corners.shape[0]

    def contains(self, X: np.ndarray, open_: bool = False) -> np.ndarray:
        """Boolean matrix [point, cube] of (closed or open) containment."""
        lo = self.corners[None, :, :]
        hi = self.uppers[None, :, :]
        X = X[:, None, :]
        if open_:
            return np.all((X > lo) & (X < hi), axis=2)
        return np.all((X >= lo) & (X <= hi), axis=2)

    def multiplicity(self, X: np.ndarray) -> int:
        return int(self.contains(X).sum(axis=1).max())


def reduced_quadtree_cover(points, root_corner, root_side: float) -> CubeCover:
    """Cover the root cube by axis-parallel cubes, each holding at most one point.

    Proper split: the cube is halved in every axis when at least two
    orthants are occupied.  Reduced split: when all points fall in one
    orthant, the cube anchored at that orthant's outer corner is shrunk to
    the smallest side s holding all points, and the other 2^d - 1 regions
    are covered by cubes of side L - s anchored at the remaining corners of
    the parent.  Points are assigned half-open (lower faces inclusive), and
    every leaf's open interior contains at most one point.

    Cubes are kept as (lower, upper) corner pairs, and neighbouring cubes
    share their cut coordinates as identical floats, so the union and
    containment properties hold exactly in floating point.
    """
    P = np.asarray(points, dtype=float)
    corner0 = np.asarray(root_corner, dtype=float)
    if P.ndim != 2 or P.shape[1] != corner0.size:
        raise UsageError("points and root must share the dimension")
    if root_side <= 0:
        raise UsageError("root side must be positive")
    upper0 = corner0 + root_side
    if np.any(P < corner0) or np.any(P > upper0):
        raise UsageError("a point lies outside the root cube")
    P_unique, inverse = np.unique(P, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    d = P.shape[1]
    signs = ((np.arange(1 << d)[:, None] >> np.arange(d)) & 1).astype(bool)
    lows: List[np.ndarray] = []
    highs: List[np.ndarray] = []
    leaf_of = np.full(P_unique.shape[0], -1, dtype=np.int64)
    reduced = proper = depth_max = 0
    stack = [(corner0, upper0, np.arange(P_unique.shape[0]), 0)]
    while stack:
        lo, hi, idx, depth = stack.pop()
        depth_max = max(depth_max, depth)
        if idx.size <= 1:
            if idx.size == 1:
                leaf_of[idx[0]] = len(lows)
            lows.append(lo)
            highs.append(hi)
            continue
        mid = 0.5 * (lo + hi)
        Q = P_unique[idx]
        orth = (Q >= mid).astype(np.int64) @ (1 << np.arange(d))
        occupied = np.unique(orth)
        if occupied.size >= 2:
            proper += 1
            for o in range(1 << d):
                up = signs[o]
                stack.append((np.where(up, mid, lo), np.where(up, hi, mid), idx[orth == o], depth + 1))
            continue
        reduced += 1
        bit = signs[int(occupied[0])]
        anchor = np.where(bit, hi, lo)
        s = min(float(np.max(np.abs(Q - anchor))), float(np.min(hi - lo)) / 2.0)
        # Per axis the parent is cut at lo + s and hi - s; the cut on the
        # occupied side is moved, if rounding requires, so it still holds
        # every point, and the two cuts never cross.
        low_cut = np.maximum(lo + s, np.where(bit, -np.inf, Q.max(axis=0)))
        high_cut = np.minimum(hi - s, np.where(bit, Q.min(axis=0), np.inf))
        low_cut = np.where(bit, np.minimum(low_cut, high_cut), low_cut)
        high_cut = np.where(bit, high_cut, np.maximum(high_cut, low_cut))
        stack.append((np.where(bit, high_cut, lo), np.where(bit, hi, low_cut), idx, depth + 1))
        for q in range(1 << d):
            up = signs[q]
            if np.array_equal(up, bit):
                continue
            lows.append(np.where(up, low_cut, lo))
            highs.append(np.where(up, hi, high_cut))
    return CubeCover(np.array(lows), np.array(highs), leaf_of[inverse],
                     (corner0, float(root_side)), reduced, proper, depth_max)


def _segments_meet_open_boxes(a: np.ndarray, b: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Matrix [box, segment]: does the segment meet the open box?"""
    v = b - a
    t_lo = np.zeros((lo.shape[0], a.shape[0]))
    t_hi = np.ones((lo.shape[0], a.shape[0]))
    ok = np.ones((lo.shape[0], a.shape[0]), dtype=bool)
    for k in range(a.shape[1]):
        vk = v[None, :, k]
        ak = a[None, :, k]
        l = lo[:, None, k]
        h = hi[:, None, k]
        flat = vk == 0
        inside = (ak > l) & (ak < h)
        ok &= ~flat | inside
        with np.errstate(divide="ignore", invalid="ignore"):
            t1 = (l - ak) / vk
            t2 = (h - ak) / vk
        enter = np.where(flat, 0.0, np.minimum(t1, t2))
        leave = np.where(flat, 1.0, np.maximum(t1, t2))
        t_lo = np.maximum(t_lo, enter)
        t_hi = np.minimum(t_hi, leave)
    return ok & (t_lo < t_hi)


def curve_quadtree_cover(P, root_corner, root_side: float):
    """Cover seeded with the corners of each edge's bounding cube.

    Returns (cover, per_leaf_counts) where per_leaf_counts[k] is the number
    of edges meeting the open interior of leaf k.
    """
    V = _polyline(P)
    c0 = np.asarray(root_corner, dtype=float)
    d = V.shape[1]
    signs = ((np.arange(1 << d)[:, None] >> np.arange(d)) & 1).astype(float)
    a, b = V[:-1], V[1:]
    lo = np.minimum(a, b)
    side = np.max(np.abs(b - a), axis=1)
    pts = (lo[:, None, :] + side[:, None, None] * signs[None, :, :]).reshape(-1, d)
    pts = np.clip(pts, c0, c0 + root_side)
    cover = reduced_quadtree_cover(np.unique(pts, axis=0), c0, root_side)
    counts = _segments_meet_open_boxes(a, b, cover.corners, cover.uppers).sum(axis=1)
    return cover, counts


# --------------------------------------------------------------- resemblance

def resemblance_profile(A: PolygonalCurve, B: PolygonalCurve, eps: float, samples: int = 16):
    """Visited-cell counts of the decider on eps*delta simplifications over log-spaced delta.

    Returns (profile, max_cells) with profile a list of (delta, cells).
    """
    if samples < 1:
        raise UsageError("need at least one delta sample")
    Z = approx_distances(np.vstack([A.vertices, B.vertices]))
    Z = Z[Z > 0]
    if Z.size == 0:
        return [], 0
    deltas = np.geomspace(Z[0] / 2.0, 2.0 * Z[-1], samples)
    prof = []
    for delta in deltas:
        RA = simplify(A, eps * delta)
        RB = simplify(B, eps * delta)
        D = decide_reachable(RA.simplified, RB.simplified, float(delta), record=False)
        prof.append((float(delta), D.visitedCount))
    return prof, max(n for _, n in prof)
