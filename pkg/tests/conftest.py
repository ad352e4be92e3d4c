import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from intdelay import benchmark_systems as bs
from intdelay.oracle import random_bounds

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@st.composite
def spline_bounds(draw, max_n=2, max_n0=2, max_N=6, spread=(0.0, 0.3)):
    """Random validated bounds with a tail-free midpoint."""
    n = draw(st.integers(1, max_n))
    n0 = draw(st.integers(0, max_n0))
    N = draw(st.integers(n0 + 1, max(n0 + 1, max_N)))
    h = draw(st.floats(0.1, 1.5))
    scale = draw(st.floats(0.1, 5.0))
    sp = draw(st.floats(*spread))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_bounds(np.random.default_rng(seed), n, n0, N, h=h, scale=scale, spread=sp)


@pytest.fixture
def hat():
    return bs.scalar_hat_kernel()


@pytest.fixture
def expo():
    return bs.exponential_kernel_2x2()


@pytest.fixture
def gain():
    return bs.linear_gain_kernel()


@pytest.fixture
def demo():
    return bs.band_demo_2x2()


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
