"""Acceptance criteria, one test each.  Every test prints a single
PASS/FAIL line with the measured numbers before asserting."""

import itertools
import math
import statistics
import time

import numpy as np
import pytest

from frechet_approx import (ClosedCurve, PolygonalCurve, SearchStats, approx_distances, approx_frechet,
                            approx_frechet_cascade, decide_reachable, exact_frechet, matching_width,
                            simplification_matching, simplify)
from frechet_approx.closed import approx_frechet_closed
from frechet_approx.freespace import naive_decide
from frechet_approx.geometry import monotonicity_event_radius, segment_length_in_ball, vertex_edge_event_radius
from frechet_approx.models import (estimate_packedness, grid_curve, koch_curve, reduced_quadtree_cover,
                                   sample_balls, spiral_curve, spiral_pair, straight_curve, zigzag_curve)
from frechet_approx.oracle import critical_values, cyclic_frechet_reference

from _reference import full_grid_decide
from conftest import star_closed
from test_models import assert_cover_properties

REL = 1e-9


def report(capsys, number, ok, detail):
    with capsys.disabled():
        print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def _lift(V, d, rng):
    if V.shape[1] == d:
        return V
    return np.hstack([V, 0.05 * rng.normal(size=(V.shape[0], d - V.shape[1]))])


def _pair(k, rng):
    """Mixed families, d in {2, 3}, 4 to 40 vertices per curve."""
    d = 2 + k % 2
    n = int(rng.integers(4, 41))
    m = int(rng.integers(4, 41))
    family = k % 5
    if family == 0:
        A = np.cumsum(rng.normal(size=(n, d)), axis=0)
        B = np.cumsum(rng.normal(size=(m, d)), axis=0)
    elif family == 1:
        A = _lift(zigzag_curve(n, rng.uniform(0.1, 1.0)).vertices, d, rng)
        B = _lift(straight_curve(m).vertices, d, rng)
    elif family == 2:
        a, b = spiral_pair(n, seed=k, turns=1.5)
        A, B = _lift(a.vertices, d, rng), _lift(b.vertices, d, rng)
    elif family == 3:
        side = 3 if d == 2 else 2
        G = grid_curve(side, d).vertices
        A = G + 0.1 * rng.normal(size=G.shape)
        B = G + 0.3 * rng.normal(size=G.shape)
    else:
        s = np.linspace(0, 2 * np.pi, n)
        t = np.linspace(0, 2 * np.pi, m)
        A = _lift(np.c_[s, np.sin(s)], d, rng)
        B = _lift(np.c_[t, np.sin(t + rng.uniform(0, 1))] + 0.1 * rng.normal(size=(m, 2)), d, rng)
    return PolygonalCurve(A), PolygonalCurve(B)


def test_criterion_01_oracle_approximation(capsys):
    rng = np.random.default_rng(101)
    worst = 0.0
    bad = []
    runs = 0
    t0 = time.perf_counter()
    for k in range(200):
        A, B = _pair(k, rng)
        exact = exact_frechet(A, B)
        for eps in (0.99, 0.25, 0.01):
            for fn in (approx_frechet, approx_frechet_cascade):
                r = fn(A, B, eps, exact_fallback=False)
                runs += 1
                if exact == 0.0:
                    ok = r.value == 0.0
                else:
                    ratio = r.value / exact
                    worst = max(worst, (ratio - 1.0) / eps)
                    ok = 1.0 - REL <= ratio <= (1.0 + eps) * (1.0 + REL)
                if not ok:
                    bad.append((k, eps, fn.__name__, r.value, exact))
    secs = time.perf_counter() - t0
    report(capsys, 1, not bad,
           f"{runs} runs on 200 pairs, worst (ratio-1)/eps = {worst:.3f}, failures {bad[:3]}, {secs:.0f}s")


def test_criterion_02_decision_exactness(capsys):
    rng = np.random.default_rng(202)
    disagree = []
    at_critical = 0
    for k in range(200):
        d = 2 + k % 2
        A = PolygonalCurve(np.cumsum(rng.normal(size=(int(rng.integers(2, 10)), d)), axis=0))
        B = PolygonalCurve(np.cumsum(rng.normal(size=(int(rng.integers(2, 10)), d)), axis=0))
        if k % 2 == 0:
            cv = critical_values(A, B).values
            delta = float(cv[rng.integers(cv.size)])
            at_critical += 1
        else:
            delta = float(rng.uniform(0.1, 4.0))
        got = decide_reachable(A, B, delta, record=False).endReachable
        want = full_grid_decide(A.vertices, B.vertices, delta)
        if got != want:
            disagree.append((k, delta, got, want))
    report(capsys, 2, not disagree,
           f"200 comparisons ({at_critical} at critical values), disagreements {disagree[:3]}")


def test_criterion_03_simplification(capsys):
    rng = np.random.default_rng(303)
    worst = -np.inf
    short = []
    for k in range(100):
        d = int(rng.integers(2, 4))
        P = PolygonalCurve(np.cumsum(rng.normal(size=(int(rng.integers(2, 60)), d)), axis=0))
        mu = float(np.median(P.edge_lengths()) * 10 ** rng.uniform(-1.5, 1.0))
        R = simplify(P, mu)
        w = matching_width(simplification_matching(P, R), P, R.simplified)
        worst = max(worst, w - mu)
        lens = R.simplified.edge_lengths()[:-1]
        if np.any(lens < mu):
            short.append(k)
    ok = worst <= 1e-12 and not short
    report(capsys, 3, ok, f"100 instances, max(width - mu) = {worst:.3g}, short edges in {short}")


def test_criterion_04_wspd_covering(capsys):
    rng = np.random.default_rng(404)
    worst_ratio = 0.0
    uncovered = 0
    checked = 0
    for k in range(24):
        d = 1 + k % 4
        n = int(rng.integers(2, 301))
        kind = k % 3
        if kind == 0:
            P = rng.uniform(size=(n, d))
        elif kind == 1:
            P = np.cumsum(rng.normal(size=(n, d)), axis=0)
        else:
            centers = rng.uniform(-100, 100, size=(4, d))
            P = centers[rng.integers(0, 4, n)] + rng.normal(scale=1e-3, size=(n, d))
        Z = approx_distances(P)
        worst_ratio = max(worst_ratio, Z.size / n)
        diff = P[:, None, :] - P[None, :, :]
        Y = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))[np.triu_indices(n, 1)]
        Y = Y[Y > 0]
        i = np.searchsorted(Z, Y, side="right") - 1
        j = np.searchsorted(Z, Y, side="left")
        good = (i >= 0) & (j < Z.size)
        good[good] &= Z[j[good]] <= 2.0 * Z[i[good]]
        uncovered += int((~good).sum())
        checked += Y.size
    ok = uncovered == 0 and worst_ratio <= 64
    report(capsys, 4, ok, f"{checked} distances, uncovered {uncovered}, max |Z|/n = {worst_ratio:.2f}")


def _foot(u, a, b):
    ab = b - a
    return min(max(float(np.dot(u - a, ab) / np.dot(ab, ab)), 0.0), 1.0)


def test_criterion_05_monotonicity_sandwich(capsys):
    rng = np.random.default_rng(505)
    found = 0
    failures = []
    while found < 500:
        d = int(rng.integers(2, 4))
        scale = 10 ** rng.uniform(-3, 3)
        p, q, a, b = rng.normal(size=(4, d)) * scale * rng.uniform(0.01, 1.0, size=(4, 1))
        x = monotonicity_event_radius(p, q, (a, b))
        if x is None:
            continue
        # A monotonicity event: the bisector point lies between the feet of p and q.
        n = q - p
        mid = 0.5 * (p + q)
        fa, fb = float(np.dot(a - mid, n)), float(np.dot(b - mid, n))
        if fa == fb:
            continue
        t = fa / (fa - fb)
        tp, tq = _foot(p, a, b), _foot(q, a, b)
        if not min(tp, tq) <= t <= max(tp, tq):
            continue
        found += 1
        ys = [float(np.linalg.norm(u - v)) for u, v in itertools.combinations((p, q, a, b), 2)]
        ys += [vertex_edge_event_radius(p, (a, b)), vertex_edge_event_radius(q, (a, b))]
        if not any(y / 2 <= x <= 3 * y for y in ys):
            failures.append((p, q, a, b, x))
    report(capsys, 5, not failures, f"{found} event triples, {len(failures)} without a sandwiching value")


def _length_in_ball(V, c, r):
    return sum(segment_length_in_ball((V[k], V[k + 1]), c, r) for k in range(len(V) - 1))


def test_criterion_06_hippodrome_and_packedness(capsys):
    rng = np.random.default_rng(606)
    worst = -np.inf
    instances = [PolygonalCurve(np.cumsum(rng.normal(size=(40, 2)), axis=0)),
                 PolygonalCurve(np.cumsum(rng.normal(size=(40, 3)), axis=0)),
                 spiral_curve(300), zigzag_curve(30, 0.3), koch_curve(2).loop()]
    for P in instances:
        C, R = sample_balls(P, 200, int(rng.integers(1 << 30)))
        for mu in np.median(P.edge_lengths()) * np.array([0.5, 2.0, 8.0]):
            S = simplify(P, mu).simplified.vertices
            for c, r in zip(C, R):
                worst = max(worst, _length_in_ball(S, c, r) - _length_in_ball(P.vertices, c, r + mu))
    ratios = []
    for growth in (0.1, 0.15, 0.3):
        P = spiral_curve(1024, growth=growth)
        balls = sample_balls(P, 4000, 0)
        c = estimate_packedness(P, balls=balls).lower_bound_c
        for mu in (0.01, 0.1, 1.0):
            S = simplify(P, mu).simplified
            ratios.append(estimate_packedness(S, balls=balls).lower_bound_c / c)
    ok = worst <= 1e-12 and max(ratios) <= 6
    report(capsys, 6, ok, f"max hippodrome excess {worst:.3g}; simplified/original packedness "
                          f"max {max(ratios):.3f}")


def test_criterion_07_near_linear_scaling(capsys):
    eps = 0.1
    sizes = [2 ** k for k in range(12, 18)]
    A, B = spiral_pair(256, 0)
    approx_frechet_cascade(A, B, eps, exact_fallback=False)  # compile kernels
    med_t, med_c = [], []
    for n in sizes:
        ts, cs = [], []
        for seed in range(5):
            A, B = spiral_pair(n, seed)
            stats = SearchStats()
            t0 = time.perf_counter()
            approx_frechet_cascade(A, B, eps, stats=stats, exact_fallback=False)
            ts.append(time.perf_counter() - t0)
            cs.append(stats.cells)
        med_t.append(statistics.median(ts))
        med_c.append(statistics.median(cs))
    t_ratio = [b / a for a, b in zip(med_t, med_t[1:])]
    c_ratio = [b / a for a, b in zip(med_c, med_c[1:])]
    naive_sizes = [2 ** k for k in range(9, 13)]
    naive_t = []
    for n in naive_sizes:
        ts = []
        for seed in range(5):
            A, B = spiral_pair(n, seed)
            delta = approx_frechet(A, B, eps, exact_fallback=False).value
            t0 = time.perf_counter()
            naive_decide(A, B, delta)
            ts.append(time.perf_counter() - t0)
        naive_t.append(statistics.median(ts))
    n_ratio = [b / a for a, b in zip(naive_t, naive_t[1:])]
    ok = max(t_ratio) <= 2.6 and max(c_ratio) <= 2.3 and min(n_ratio) >= 3.5
    fmt = lambda xs: "[" + ", ".join(f"{x:.2f}" for x in xs) + "]"
    report(capsys, 7, ok, f"time ratios {fmt(t_ratio)} (<= 2.6), cell ratios {fmt(c_ratio)} (<= 2.3), "
                          f"naive ratios {fmt(n_ratio)} (>= 3.5); median cells {[int(c) for c in med_c]}")


# Calibrated once: the smallest ratio over the checked grids is 9/16 at
# grid(3, 2); the constant is that value rounded down.
VERTEX_BOUND_C = 0.5


def test_criterion_08_low_density_vertex_bound(capsys):
    ratios = {}
    for d in (2, 3):
        for m in range(3, 9):
            P = grid_curve(m, d)
            side = m - 1
            ratios[(m, d)] = P.n_vertices / (P.length() / side) ** (d / (d - 1))
    worst = min(ratios, key=ratios.get)
    ok = ratios[worst] >= VERTEX_BOUND_C
    report(capsys, 8, ok, f"min vertices / (length/side)^(d/(d-1)) = {ratios[worst]:.4f} at grid{worst}, "
                          f"C = {VERTEX_BOUND_C}")


def test_criterion_09_quadtree_cover(capsys):
    rng = np.random.default_rng(909)
    stats = []
    for k in range(50):
        d = 1 + k % 3
        n = int(rng.integers(1, 501))
        X = rng.random((n, d))
        if k % 4 == 3:
            X = 0.3 + 1e-6 * X
        cover = reduced_quadtree_cover(X, np.zeros(d), 1.0)
        assert_cover_properties(cover, X, np.zeros(d), 1.0, rng)
        stats.append(cover.count / (2 ** (d + 1) * d * n))
    report(capsys, 9, True, f"50 point sets, properties (A)-(D) hold; max count / bound = {max(stats):.3f}")


def test_criterion_10_closed_curves(capsys):
    K = koch_curve(2)
    zero = approx_frechet_closed(K, K.rotated(11), 0.1).value
    outer = ClosedCurve([(-2, -2), (2, -2), (2, 2), (-2, 2)])
    inner = ClosedCurve([(-1, -1), (1, -1), (1, 1), (-1, 1)])
    sq = approx_frechet_closed(outer, inner, 0.1).value
    rng = np.random.default_rng(1010)
    eps = 0.1
    bad = []
    worst = 0.0
    for k in range(50):
        A = star_closed(rng, int(rng.integers(3, 9)))
        B = star_closed(rng, int(rng.integers(3, 9)), center=0.3 * rng.normal(size=2))
        ref, eta = cyclic_frechet_reference(A, B, eta=0.01)
        v = approx_frechet_closed(A, B, eps).value
        worst = max(worst, v / (ref + eta))
        if not (ref - eta <= v <= (1 + eps) * (ref + eta)):
            bad.append((k, v, ref))
    ok = zero <= 1e-9 and math.sqrt(2) <= sq <= 1.1 * math.sqrt(2) and not bad
    report(capsys, 10, ok, f"rotated copy {zero:.3g}; squares {sq:.6f} in [{math.sqrt(2):.6f}, "
                           f"{1.1 * math.sqrt(2):.6f}]; 50 random pairs, max value/(oracle+eta) "
                           f"{worst:.4f}, failures {bad[:3]}")
