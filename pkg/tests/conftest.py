import numpy as np
import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_ball_points(rng, count, n, rmax=0.95):
    g = rng.normal(size=(count, 2 * n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    rad = rmax * rng.uniform(size=count) ** (1.0 / (2 * n))
    z = g[:, 0::2] + 1j * g[:, 1::2]
    return z * rad[:, None]


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
