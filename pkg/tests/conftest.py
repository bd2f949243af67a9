import numpy as np
import pytest

from embezzle.states import DensityMatrix, sample_random_state

ACCEPTANCE_LINES = []


@pytest.fixture
def pure0():
    return DensityMatrix.from_diag([1.0, 0.0])


@pytest.fixture
def mixed():
    return DensityMatrix.maximally_mixed(2)


@pytest.fixture
def random_pairs():
    """Seeded (rho, sigma) pairs of random rank over d in {2, 3}."""
    rng = np.random.default_rng(20191022)
    pairs = []
    for _ in range(12):
        d = int(rng.choice([2, 3]))
        pairs.append(
            tuple(
                sample_random_state(d, rank=int(rng.integers(1, d + 1)), seed=int(rng.integers(2**32)))
                for _ in range(2)
            )
        )
    return pairs


def random_hermitian(d, rng):
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (a + a.conj().T)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
