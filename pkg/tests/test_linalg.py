import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from embezzle.linalg import (
    NotHermitianError,
    hermitian_eigenvalues,
    hermitian_eigh,
    jacobi_eigh,
    offdiag_norm,
    trace_norm,
)

from conftest import random_hermitian


def charpoly_roots(a, tol=1e-13):
    """Roots of det(a - x I) by sign changes and bisection (no eigensolver)."""
    a = np.asarray(a)
    d = a.shape[0]
    radius = np.max(np.sum(np.abs(a), axis=1))
    eye = np.eye(d)

    def g(x):
        return np.linalg.det(a - x * eye).real

    grid = np.linspace(-radius - 1, radius + 1, 20001)
    vals = np.array([g(x) for x in grid])
    roots = []
    for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
        lo, hi = grid[i], grid[i + 1]
        glo = vals[i]
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            gm = g(mid)
            if np.sign(gm) == np.sign(glo):
                lo, glo = mid, gm
            else:
                hi = mid
        roots.append(0.5 * (lo + hi))
    return np.sort(roots)[::-1]


def test_diag_spectrum():
    assert np.allclose(hermitian_eigenvalues(np.diag([0.5, 0.5])), [0.5, 0.5])


def test_pauli_x_spectrum():
    x = np.array([[0, 1], [1, 0]]) / 2
    for method in ("jacobi", "lapack", "auto"):
        assert np.allclose(hermitian_eigenvalues(x, method=method), [0.5, -0.5], atol=1e-15)


def test_jacobi_matches_charpoly_oracle():
    rng = np.random.default_rng(6)
    a = random_hermitian(6, rng)
    roots = charpoly_roots(a)
    assert roots.size == 6
    assert np.max(np.abs(jacobi_eigh(a) - roots)) < 1e-9


def test_jacobi_reconstruction():
    rng = np.random.default_rng(7)
    a = random_hermitian(9, rng)
    w, v = jacobi_eigh(a, vectors=True)
    assert np.max(np.abs(v @ np.diag(w) @ v.conj().T - a)) < 1e-9
    assert np.max(np.abs(v.conj().T @ v - np.eye(9))) < 1e-12
    assert abs(w.sum() - np.trace(a).real) < 1e-9


@pytest.mark.parametrize("d", [1, 2, 5, 33, 40])
def test_jacobi_and_lapack_agree(d):
    rng = np.random.default_rng(d)
    a = random_hermitian(d, rng)
    assert np.allclose(hermitian_eigh(a, method="jacobi"), hermitian_eigh(a, method="lapack"), atol=1e-10)


def test_auto_returns_diagonal_of_diagonal_input():
    a = np.diag(np.arange(5000, dtype=float))
    w = hermitian_eigenvalues(a)
    assert w[0] == 4999 and w[-1] == 0


def test_offdiag_norm_is_exact_for_diagonal():
    rng = np.random.default_rng(0)
    a = np.diag(rng.random(700) * 1e8)
    assert offdiag_norm(a) == 0.0
    a[3, 600] = a[600, 3] = 1e-3
    assert offdiag_norm(a) == pytest.approx(np.sqrt(2) * 1e-3)


def test_non_hermitian_rejected():
    with pytest.raises(NotHermitianError):
        hermitian_eigenvalues(np.array([[0, 1], [0, 0]]))
    with pytest.raises(NotHermitianError):
        trace_norm(np.array([[1, 1j], [1j, 1]]))


@pytest.mark.parametrize(
    "a, expected",
    [
        (np.zeros((3, 3)), 0.0),
        (np.diag([1.0, 0.0]) - np.diag([0.0, 1.0]), 2.0),
        (np.diag([1.0, 0.0]) - np.diag([0.5, 0.5]), 1.0),
    ],
)
def test_trace_norm_examples(a, expected):
    assert trace_norm(a) == pytest.approx(expected, abs=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_trace_norm_properties(d, seed):
    rng = np.random.default_rng(seed)
    a = random_hermitian(d, rng)
    assert trace_norm(a) == pytest.approx(trace_norm(-a), abs=1e-12)
    # agrees with the nuclear norm (sum of singular values)
    assert trace_norm(a) == pytest.approx(np.linalg.norm(a, "nuc"), rel=1e-10, abs=1e-12)
