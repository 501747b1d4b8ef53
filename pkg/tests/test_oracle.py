import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from frechet_approx import (PolygonalCurve, UsageError, critical_values, decide_reachable, discrete_frechet,
                            exact_frechet)
from frechet_approx.oracle import densify

from conftest import curves, random_curve

SEG_A = PolygonalCurve([(0, 0), (1, 0)])
SEG_B = PolygonalCurve([(0, 1), (1, 1)])


def test_exact_examples():
    assert exact_frechet(SEG_A, SEG_B) == pytest.approx(1.0)
    P = random_curve(np.random.default_rng(1), 9)
    assert exact_frechet(P, P) == 0.0
    A = PolygonalCurve([(0, 0), (2, 0)])
    B = PolygonalCurve([(0, 0), (1, 1e-4), (2, 0)])
    assert exact_frechet(A, B) == pytest.approx(1e-4)


def test_backtracking_forces_monotonicity_event():
    # B doubles back: the distance is set by a bisector event, above every
    # vertex-edge distance between the curves.
    A = PolygonalCurve([(0, 0), (4, 0)])
    B = PolygonalCurve([(0, 0), (3, 0.5), (1, 0.5), (4, 0)])
    d = exact_frechet(A, B)
    cv = critical_values(A, B)
    k = np.searchsorted(cv.values, d)
    assert cv.tags[k] == 3 or np.isclose(cv.values[cv.tags == 3], d).any()
    assert d == pytest.approx(np.hypot(1.0, 0.5))


def test_critical_values_of_two_segments():
    A = PolygonalCurve([(0, 0), (2, 0)])
    B = PolygonalCurve([(0, 1), (3, 2)])
    cv = critical_values(A, B)
    assert cv.count("endpoint") == 2
    assert cv.count("vertex-edge") == 4
    assert cv.count("monotonicity") <= 4
    assert critical_values(A, A).values[0] == 0.0


@given(st.integers(2, 9), st.integers(2, 9), st.integers(0, 2**31 - 1))
def test_critical_value_counts(n, m, seed):
    rng = np.random.default_rng(seed)
    A, B = random_curve(rng, n), random_curve(rng, m)
    cv = critical_values(A, B)
    assert cv.count("endpoint") == 2
    assert cv.count("vertex-vertex") == n * m
    assert cv.count("vertex-edge") == n * (m - 1) + m * (n - 1)
    assert cv.count("monotonicity") <= (n * (n - 1) // 2) * (m - 1) + (m * (m - 1) // 2) * (n - 1)


def test_exact_cap():
    rng = np.random.default_rng(0)
    with pytest.raises(UsageError):
        exact_frechet(random_curve(rng, 150), random_curve(rng, 60))


@given(curves(max_n=7), curves(max_n=7))
def test_exact_is_smallest_feasible_critical_value(A, B):
    d = exact_frechet(A, B)
    assert decide_reachable(A, B, d).endReachable
    cv = np.unique(critical_values(A, B).values)
    below = cv[cv < d]
    if below.size:
        assert not decide_reachable(A, B, float(below[-1])).endReachable


@given(curves(max_n=7, d=3), curves(max_n=7, d=3), st.integers(0, 2**31 - 1))
def test_symmetric_and_rigid_invariant(A, B, seed):
    d = exact_frechet(A, B)
    assert exact_frechet(B, A) == pytest.approx(d, rel=1e-9, abs=1e-12)
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    shift = rng.normal(size=3)
    A2 = PolygonalCurve(A.vertices @ Q.T + shift)
    B2 = PolygonalCurve(B.vertices @ Q.T + shift)
    assert exact_frechet(A2, B2) == pytest.approx(d, rel=1e-9, abs=1e-12)


@given(curves(max_n=6), curves(max_n=6), curves(max_n=6))
def test_triangle_inequality(A, B, C):
    assert exact_frechet(A, C) <= exact_frechet(A, B) + exact_frechet(B, C) + 1e-9


def test_discrete_examples():
    P = np.random.default_rng(0).normal(size=(6, 2))
    assert discrete_frechet(P, P) == 0.0
    assert discrete_frechet([(0, 0), (1, 0)], [(0, 1), (1, 1)]) == pytest.approx(1.0)


@given(curves(max_n=5), curves(max_n=5))
def test_densified_discrete_sandwich(A, B):
    eta = 0.05
    cont = exact_frechet(A, B)
    disc = discrete_frechet(densify(A.vertices, eta), densify(B.vertices, eta))
    assert cont <= disc + 1e-9
    assert disc <= cont + eta + 1e-9


def test_cyclic_discrete_tries_every_rotation():
    P = np.array([(0, 0), (1, 0), (1, 1), (0, 1)], dtype=float)
    Q = np.roll(P, 2, axis=0)
    assert discrete_frechet(P, Q, cyclic=True) == 0.0
    assert discrete_frechet(P, Q) > 0.0
