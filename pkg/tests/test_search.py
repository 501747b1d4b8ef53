import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from frechet_approx import (PolygonalCurve, SearchStats, UsageError, approx_binary_search, approx_frechet,
                            approx_frechet_cascade, exact_decide, exact_frechet,
                            fixed_simplification_search, fuzzy_decide, interval_search, matching_width)
from frechet_approx.models import spiral_pair, straight_curve, zigzag_curve
from frechet_approx.search import (AtMost, Approximation, Bracket, Greater, GreaterThan, Less, Outside,
                                   grid_search)

from conftest import curves, random_curve

SEG_A = PolygonalCurve([(0, 0), (1, 0)])
SEG_B = PolygonalCurve([(0, 1), (1, 1)])


@pytest.mark.parametrize("eps", [0.1, 0.5, 1.0])
def test_fuzzy_translated_segments(eps):
    r = fuzzy_decide(SEG_A, SEG_B, 2.0, eps)
    assert isinstance(r, AtMost)
    assert matching_width(r.matching, SEG_A, SEG_B) <= (1 + eps) * 2.0
    assert fuzzy_decide(SEG_A, SEG_B, 0.4, 0.25) == GreaterThan(0.4)


def test_fuzzy_rejects_bad_arguments():
    with pytest.raises(UsageError):
        fuzzy_decide(SEG_A, SEG_B, 0.0, 0.5)
    with pytest.raises(UsageError):
        fuzzy_decide(SEG_A, SEG_B, 1.0, 1.5)


@given(curves(max_n=10), curves(max_n=10), st.floats(0.05, 1.0), st.floats(0.1, 3.0))
def test_fuzzy_sound_outside_band(A, B, eps, scale):
    d = exact_frechet(A, B)
    delta = max(d * scale, 1e-6)
    r = fuzzy_decide(A, B, delta, eps)
    if isinstance(r, AtMost):
        assert d <= (1 + eps) * delta * (1 + 1e-9)
        assert matching_width(r.matching, A, B) <= (1 + eps) * delta * (1 + 1e-9)
    else:
        assert d > delta


def test_exact_decide_far_from_distance():
    assert isinstance(exact_decide(SEG_A, SEG_B, 0.2, 0.1), Greater)
    r = exact_decide(SEG_A, SEG_B, 5.0, 0.1)
    assert isinstance(r, Less)
    assert matching_width(r.matching, SEG_A, SEG_B) <= 5.0


@given(curves(max_n=10), curves(max_n=10), st.floats(0.05, 0.9), st.floats(0.0, 1.0))
def test_exact_decide_three_way(A, B, eps, frac):
    d = exact_frechet(A, B)
    if d == 0:
        return
    delta = d * (1 + frac * eps)
    r = exact_decide(A, B, delta, eps)
    if isinstance(r, Approximation):
        assert d <= r.value <= (1 + eps) * d * (1 + 1e-9)
    elif isinstance(r, Less):
        assert matching_width(r.matching, A, B) <= delta * (1 + 1e-9)
    else:
        pytest.fail("d_F <= delta cannot be reported as greater")


def test_interval_search_examples():
    r = interval_search(SEG_A, SEG_B, 0.5, 4.0, 0.1)
    assert isinstance(r, Approximation) and 1.0 - 1e-12 <= r.value <= 1.1
    assert interval_search(SEG_A, SEG_B, 2.0, 4.0, 0.1) == Outside("below")
    assert interval_search(SEG_A, SEG_B, 0.1, 0.5, 0.1) == Outside("above")
    r = interval_search(SEG_A, SEG_B, 1.0, 1.0, 0.1)
    assert isinstance(r, Approximation) and r.value == pytest.approx(1.0)
    r = interval_search(SEG_A, SEG_B, 0.5, 4.0, 0.1, mode="direct")
    assert 1.0 - 1e-12 <= r.value <= 1.1


def test_grid_search_is_generic():
    calls = []

    def test(x):
        calls.append(x)
        return None if x < 3.0 else (lambda: "witness")

    assert grid_search(test, 1.0, 10.0, 0.5) == "witness"
    assert min(c for c in calls if c >= 3.0) < 3.0 * 1.5


def test_approx_binary_search_brackets():
    r = approx_binary_search(SEG_A, SEG_B, np.array([0.75, 1.5]), 0.1)
    assert r == Bracket(0.75, 1.5) or isinstance(r, Approximation)
    r = approx_binary_search(SEG_A, SEG_B, np.array([0.1, 0.2]), 0.1)
    assert r == Bracket(0.2, None)


def test_approx_binary_search_can_stop_early():
    # Z sits inside the fuzzy band of the only probe, so the decider
    # returns an approximation straight away.
    r = approx_binary_search(SEG_A, SEG_B, np.array([1.0 / (1 + 0.1 / 6)]), 0.1)
    assert isinstance(r, (Approximation, Bracket))
    if isinstance(r, Approximation):
        assert r.value <= 1.1


def test_fixed_search_degenerate_interval():
    r = fixed_simplification_search(SEG_A, SEG_B, 1.0, 1.0, 0.1)
    assert r.value == pytest.approx(1.0)
    r = fixed_simplification_search(SEG_A, SEG_B, 0.3, 3.0, 0.1)
    assert 1.0 - 1e-12 <= r.value <= 1.1


def test_fixed_search_on_monotonicity_event():
    A = PolygonalCurve([(0, 0), (4, 0)])
    B = PolygonalCurve([(0, 0), (3, 0.5), (1, 0.5), (4, 0)])
    d = exact_frechet(A, B)
    r = fixed_simplification_search(A, B, 0.5 * d, 2.0 * d, 0.05)
    assert d * (1 - 1e-9) <= r.value <= 1.05 * d * (1 + 1e-9)


def test_pipeline_trivial_cases():
    P = random_curve(np.random.default_rng(4), 20)
    assert approx_frechet(P, P, 0.1).value == 0.0
    assert approx_frechet_cascade(P, P, 0.1).value == 0.0
    for fn in (approx_frechet, approx_frechet_cascade):
        r = fn(SEG_A, SEG_B, 0.1)
        assert 1.0 - 1e-12 <= r.value <= 1.1
    with pytest.raises(UsageError):
        approx_frechet(SEG_A, SEG_B, 1.0)


@given(curves(max_n=16, d=3), curves(max_n=16, d=3), st.sampled_from([0.99, 0.5, 0.1, 0.02]),
       st.booleans())
def test_pipeline_sandwich(A, B, eps, cascade):
    fn = approx_frechet_cascade if cascade else approx_frechet
    d = exact_frechet(A, B)
    r = fn(A, B, eps, exact_fallback=False)
    assert r.value == pytest.approx(matching_width(r.matching, A, B), rel=1e-12, abs=1e-15)
    assert d * (1 - 1e-9) <= r.value <= (1 + eps) * d * (1 + 1e-9)


def test_exact_fallback_for_tiny_eps():
    rng = np.random.default_rng(8)
    A, B = random_curve(rng, 6), random_curve(rng, 6)
    r = approx_frechet(A, B, 0.01)
    assert r.value == pytest.approx(exact_frechet(A, B), rel=1e-9)


def test_zigzag_stress_pair():
    A, B = zigzag_curve(30, 0.5), straight_curve(30)
    d = exact_frechet(A, B)
    for fn in (approx_frechet, approx_frechet_cascade):
        r = fn(A, B, 0.1, exact_fallback=False)
        assert d * (1 - 1e-9) <= r.value <= 1.1 * d * (1 + 1e-9)


def test_cascade_round_instrumentation():
    A, B = spiral_pair(512, seed=1)
    stats = SearchStats()
    eps = 0.1
    approx_frechet_cascade(A, B, eps, stats=stats)
    assert len(stats.round_cells) == math.ceil(math.log2(1 / eps))
    assert all(c > 0 for c in stats.round_cells)
    assert sum(stats.phase_cells.values()) == stats.cells
