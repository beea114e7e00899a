import numpy as np
import pytest

from homgeo import InnerProduct, RandersNorm

ACCEPTANCE_LINES: list[str] = []


def random_spd(rng, n, spread=0.5):
    B = rng.standard_normal((n, n)) * spread
    return B @ B.T + 0.5 * np.eye(n)


def random_randers(rng, n, max_drift=0.9):
    a = InnerProduct(random_spd(rng, n))
    d = rng.standard_normal(n)
    d *= rng.uniform(0.0, max_drift) / a.norm(d)
    return RandersNorm(a, d)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
