import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from unistoq.core import TimeGrid
from unistoq.generators import random_stochastic_system

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def record_acceptance(name: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE_RESULTS.append((name, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")


@st.composite
def random_systems(draw, max_n=5, max_times=6, n_variables=0):
    n = draw(st.integers(1, max_n))
    k = draw(st.integers(1, max_times))
    seed = draw(st.integers(0, 2**32 - 1))
    times = [0.0] + [0.25 * (i + 1) for i in range(k - 1)]
    return random_stochastic_system(n, TimeGrid(times), seed, n_variables=n_variables)


@st.composite
def stochastic_matrices(draw, min_n=1, max_n=5):
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    g = 1.0 - rng.random((n, n))
    # sprinkle exact zeros so boundary cases get exercised
    g[rng.random((n, n)) < 0.2] = 0.0
    g[0, g.sum(axis=0) == 0] = 1.0
    return g / g.sum(axis=0, keepdims=True)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
