import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from frechet_approx import (Matching, PolygonalCurve, UsageError, compose_matchings, matching_width,
                            simplification_matching, simplify)
from frechet_approx.simplify import compose_chain

from conftest import curves, random_curve

EXAMPLE = PolygonalCurve([(0, 0), (0.5, 0), (2, 0), (2.5, 0)])


def test_example_scan():
    R = simplify(EXAMPLE, 1.0)
    assert R.simplified.vertices.tolist() == [[0, 0], [2, 0], [2.5, 0]]
    assert list(R.kept_indices) == [0, 2, 3]
    M = simplification_matching(EXAMPLE, R)
    assert matching_width(M, EXAMPLE, R.simplified) == pytest.approx(0.5)


def test_zero_radius_keeps_everything(rng):
    P = random_curve(rng, 10)
    R = simplify(P, 0.0)
    assert R.simplified == P
    M = simplification_matching(P, R)
    assert matching_width(M, P, R.simplified) == 0.0


def test_all_within_mu_gives_first_and_last():
    P = PolygonalCurve([(0, 0), (0.1, 0.1), (-0.2, 0.1), (0.3, 0)])
    R = simplify(P, 1.0)
    assert R.simplified.vertices.tolist() == [[0, 0], [0.3, 0]]


def test_last_vertex_on_kept_vertex_replaces_it():
    P = PolygonalCurve([(0, 0), (2, 0), (2.5, 0), (2, 0)])
    R = simplify(P, 1.0)
    assert R.simplified.vertices.tolist() == [[0, 0], [2, 0]]
    assert R.tail_start == 1
    M = simplification_matching(P, R)
    assert matching_width(M, P, R.simplified) <= 1.0


def test_closed_loop_returning_to_start_is_unchanged():
    P = PolygonalCurve([(0, 0), (0.2, 0), (0, 0.2), (0, 0)])
    R = simplify(P, 1.0)
    assert R.simplified == P


def test_negative_radius_rejected():
    with pytest.raises(UsageError):
        simplify(EXAMPLE, -1.0)


@given(curves(max_n=25, d=3), st.floats(0.0, 3.0))
def test_simplification_lemma(P, mu):
    R = simplify(P, mu)
    S = R.simplified.vertices
    lens = np.linalg.norm(np.diff(S, axis=0), axis=1)
    assert np.all(lens[:-1] >= mu)
    M = simplification_matching(P, R)
    assert matching_width(M, P, R.simplified) <= mu + 1e-12


@given(curves(max_n=8))
def test_simplification_stable_between_vertex_distances(P):
    V = P.vertices
    d = np.unique([np.linalg.norm(V[i] - V[j]) for i, j in itertools.combinations(range(len(V)), 2)])
    d = np.concatenate([[0.0], d, [d[-1] + 1.0]])
    for lo, hi in zip(d[:-1], d[1:]):
        if hi - lo < 1e-9:
            continue
        a = simplify(P, lo + 0.25 * (hi - lo))
        b = simplify(P, lo + 0.75 * (hi - lo))
        assert np.array_equal(a.kept_indices, b.kept_indices)


@given(curves(max_n=15))
def test_tiny_radius_is_identity(P):
    mu = 0.5 * float(np.min(P.edge_lengths()))
    assert simplify(P, mu).simplified == P


def test_compose_with_identity(rng):
    A = random_curve(rng, 6)
    B = random_curve(rng, 8)
    M = Matching([0, 1.5, 2, 5], [0, 3, 3, 7])
    left = compose_matchings(Matching.identity(5), M)
    right = compose_matchings(M, Matching.identity(7))
    w = matching_width(M, A, B)
    assert matching_width(left, A, B) == pytest.approx(w)
    assert matching_width(right, A, B) == pytest.approx(w)


def test_compose_explicit():
    # A~B: A holds at 0 while B runs to 1, then both move.
    M1 = Matching([0, 0, 2], [0, 1, 2])
    # B~C: plain linear map B in [0,2] -> C in [0,4]
    M2 = Matching([0, 2], [0, 4])
    M = compose_matchings(M1, M2)
    assert M.breakpoints.tolist() == [[0, 0], [0, 2], [2, 4]]


@given(curves(max_n=15), curves(max_n=15), st.floats(0.0, 2.0), st.floats(0.0, 2.0))
def test_composed_simplification_width_bound(A, B, mu_a, mu_b):
    RA, RB = simplify(A, mu_a), simplify(B, mu_b)
    # any matching between the simplifications, here a straight diagonal
    mid = Matching([0, RA.simplified.n_edges], [0, RB.simplified.n_edges])
    full = compose_chain(simplification_matching(A, RA), mid, simplification_matching(B, RB).inverse())
    bound = matching_width(mid, RA.simplified, RB.simplified) + mu_a + mu_b
    assert matching_width(full, A, B) <= bound + 1e-9
