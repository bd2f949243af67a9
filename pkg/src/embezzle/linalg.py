"""Hermitian eigendecomposition and trace norms.

Small matrices are diagonalised with cyclic complex Jacobi rotations.
Larger ones go to LAPACK (``numpy.linalg.eigh``) unless they already pass
the Jacobi convergence test, in which case the diagonal is returned as is.
That short circuit is what lets the dense paths handle the (diagonal)
catalyst differences of commuting pairs at several thousand dimensions.
"""
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "NotHermitianError",
    "ConvergenceError",
    "JACOBI_MAX_DIM",
    "hermiticity_residual",
    "offdiag_norm",
    "jacobi_eigh",
    "hermitian_eigh",
    "hermitian_eigenvalues",
    "trace_norm",
]

#: Dimension above which ``method="auto"`` hands non-diagonal input to LAPACK.
JACOBI_MAX_DIM = 32

_JACOBI_REL_THRESHOLD = 1e-12
_JACOBI_MAX_SWEEPS = 100


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances shared by validation and spectral routines."""

    herm: float = 1e-10
    psd: float = 1e-8
    trace: float = 1e-10
    eig: float = 1e-9


DEFAULT_TOL = Tolerances()


class NotHermitianError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


def hermiticity_residual(a):
    """max |a_ij - conj(a_ji)|."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - a.conj().T)))


def _check_square(a):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def _check_hermitian(a, tol):
    a = _check_square(a)
    res = hermiticity_residual(a)
    if res > tol:
        raise NotHermitianError(f"matrix is not Hermitian (residual {res:.3e} > {tol:.1e})")
    return a


def offdiag_norm(a, chunk=256):
    """Frobenius norm of the off-diagonal part, computed without cancellation.

    Works in row blocks so that a large matrix is never copied whole.
    """
    a = np.asarray(a)
    dim = a.shape[0]
    total = 0.0
    for start in range(0, dim, chunk):
        stop = min(start + chunk, dim)
        block = np.array(a[start:stop], copy=True)
        rows = np.arange(stop - start)
        block[rows, rows + start] = 0
        total += float(np.vdot(block, block).real)
    return float(np.sqrt(total))


def _rotate(a, v, p, q):
    apq = a[p, q]
    mag = abs(apq)
    if mag == 0.0:
        return
    phase = apq / mag
    tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
    # hypot avoids overflowing tau**2 when the off-diagonal entry is tiny
    t = np.copysign(1.0, tau) / (abs(tau) + np.hypot(1.0, tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    # J = diag(1, conj(phase)) @ [[c, s], [-s, c]] acting on columns p, q
    jpp, jpq = c, s
    jqp, jqq = -s * np.conj(phase), c * np.conj(phase)

    col_p = a[:, p].copy()
    col_q = a[:, q].copy()
    a[:, p] = col_p * jpp + col_q * jqp
    a[:, q] = col_p * jpq + col_q * jqq
    row_p = a[p, :].copy()
    row_q = a[q, :].copy()
    a[p, :] = np.conj(jpp) * row_p + np.conj(jqp) * row_q
    a[q, :] = np.conj(jpq) * row_p + np.conj(jqq) * row_q
    a[p, q] = 0.0
    a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real

    if v is not None:
        vp = v[:, p].copy()
        vq = v[:, q].copy()
        v[:, p] = vp * jpp + vq * jqp
        v[:, q] = vp * jpq + vq * jqq


def jacobi_eigh(a, vectors=False, max_sweeps=_JACOBI_MAX_SWEEPS, rel_threshold=_JACOBI_REL_THRESHOLD):
    """Cyclic Jacobi diagonalisation of a Hermitian matrix.

    Sweeps over all pairs ``p < q`` in row order until the off-diagonal
    Frobenius norm drops below ``rel_threshold * ||a||_F``.

    Returns eigenvalues in descending order, and the matching eigenvectors
    as columns when ``vectors`` is true.
    """
    a = _check_square(a)
    work = np.array(a, dtype=np.complex128, copy=True)
    dim = work.shape[0]
    v = np.eye(dim, dtype=np.complex128) if vectors else None
    target = rel_threshold * float(np.linalg.norm(work))

    for _ in range(max_sweeps + 1):
        if offdiag_norm(work) <= target:
            break
        for p in range(dim - 1):
            for q in range(p + 1, dim):
                _rotate(work, v, p, q)
    else:
        raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")

    w = work.diagonal().real.copy()
    order = np.argsort(-w, kind="stable")
    if vectors:
        return w[order], v[:, order]
    return w[order]


def hermitian_eigh(a, vectors=False, method="auto", tol=DEFAULT_TOL):
    """Eigenvalues (descending) and optionally eigenvectors of a Hermitian matrix.

    ``method`` is ``"jacobi"``, ``"lapack"`` or ``"auto"``.  Raises
    :class:`NotHermitianError` when the input is not Hermitian within
    ``tol.herm``.
    """
    a = _check_hermitian(a, tol.herm)
    dim = a.shape[0]
    if method not in ("auto", "jacobi", "lapack"):
        raise ValueError(f"unknown eigensolver method {method!r}")
    if dim == 0:
        w = np.zeros(0)
        return (w, np.zeros((0, 0), dtype=np.complex128)) if vectors else w

    if method == "auto":
        if offdiag_norm(a) <= _JACOBI_REL_THRESHOLD * float(np.linalg.norm(a)):
            w = np.asarray(a.diagonal().real, dtype=float)
            order = np.argsort(-w, kind="stable")
            if vectors:
                return w[order], np.eye(dim, dtype=np.complex128)[:, order]
            return w[order]
        method = "jacobi" if dim <= JACOBI_MAX_DIM else "lapack"

    if method == "jacobi":
        return jacobi_eigh(a, vectors=vectors)

    herm = 0.5 * (a + a.conj().T)
    if vectors:
        w, v = np.linalg.eigh(herm)
        return w[::-1].copy(), v[:, ::-1].copy()
    return np.linalg.eigvalsh(herm)[::-1].copy()


def hermitian_eigenvalues(a, method="auto", tol=DEFAULT_TOL):
    return hermitian_eigh(a, vectors=False, method=method, tol=tol)


def trace_norm(a, method="auto", tol=DEFAULT_TOL):
    """Schatten 1-norm of a Hermitian matrix, the sum of |eigenvalues|."""
    return float(np.sum(np.abs(hermitian_eigenvalues(a, method=method, tol=tol))))
