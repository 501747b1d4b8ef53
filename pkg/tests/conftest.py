import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from frechet_approx import ClosedCurve, PolygonalCurve

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")


def random_curve(rng, n, d=2, scale=1.0):
    V = np.cumsum(rng.normal(scale=scale, size=(n, d)), axis=0)
    return PolygonalCurve(V)


def star_closed(rng, n, center=(0.0, 0.0), r0=1.0, wobble=0.3):
    """Star-shaped closed curve: random radii around sorted angles."""
    ang = np.sort(rng.uniform(0, 2 * np.pi, n))
    r = r0 * (1.0 + wobble * rng.uniform(-1, 1, n))
    return ClosedCurve(np.c_[center[0] + r * np.cos(ang), center[1] + r * np.sin(ang)])


@st.composite
def curves(draw, min_n=2, max_n=12, d=2):
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**31 - 1))
    return random_curve(np.random.default_rng(seed), n, d)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
