"""Dense density matrices on tensor-product registers.

A :class:`DensityMatrix` carries its register shape ``(d_1, ..., d_k)``.
Register permutations and partial traces are done by reshaping the matrix
into a ``2k``-index tensor and relabelling axes (mixed-radix index
arithmetic); no permutation matrix is ever built.
"""
from dataclasses import dataclass
from functools import reduce
from math import prod

import numpy as np

from .linalg import DEFAULT_TOL, hermiticity_residual, hermitian_eigenvalues, trace_norm

__all__ = [
    "DensityMatrix",
    "Partition",
    "Permutation",
    "ValidationReport",
    "InvalidStateError",
    "validate",
    "require_valid",
    "tensor",
    "tensor_power",
    "permute_registers",
    "partial_trace",
    "trace_distance",
    "TraceDistance",
    "entropy",
    "binary_entropy",
    "sample_random_state",
    "mixed_radix_decode",
    "mixed_radix_encode",
]


class InvalidStateError(ValueError):
    """Raised when a matrix fails the density-matrix conditions."""


def _as_shape(shape, dim):
    if shape is None:
        return (dim,)
    shape = tuple(int(s) for s in np.atleast_1d(shape))
    if any(s < 1 for s in shape):
        raise ValueError(f"register dimensions must be positive, got {shape}")
    if prod(shape) != dim:
        raise ValueError(f"register shape {shape} has product {prod(shape)}, matrix side is {dim}")
    return shape


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Square complex matrix plus its register shape.

    Construction only checks that the matrix is square and matches
    ``shape``; use :func:`validate` for the Hermitian/PSD/trace conditions.
    The stored array is read-only.
    """

    entries: np.ndarray
    shape: tuple = None

    def __post_init__(self):
        m = np.array(self.entries, copy=True)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"entries must be a square matrix, got shape {m.shape}")
        if not np.iscomplexobj(m):
            m = m.astype(float)
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)
        object.__setattr__(self, "shape", _as_shape(self.shape, m.shape[0]))

    @property
    def dim(self):
        return self.entries.shape[0]

    @property
    def n_registers(self):
        return len(self.shape)

    @classmethod
    def from_diag(cls, probs, shape=None):
        return cls(np.diag(np.asarray(probs, dtype=float)), shape)

    @classmethod
    def pure(cls, vector, shape=None):
        psi = np.asarray(vector, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()), shape)

    @classmethod
    def maximally_mixed(cls, d, shape=None):
        return cls(np.eye(d) / d, shape)

    def with_shape(self, shape):
        return DensityMatrix(self.entries, shape)

    def allclose(self, other, atol=1e-12):
        return self.shape == other.shape and np.allclose(self.entries, other.entries, rtol=0, atol=atol)

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim}, shape={self.shape})"


@dataclass(frozen=True)
class Permutation:
    """Register permutation: input register ``i`` ends up at position ``image[i]``."""

    image: tuple

    def __post_init__(self):
        image = tuple(int(i) for i in self.image)
        if sorted(image) != list(range(len(image))):
            raise ValueError(f"{image} is not a permutation of 0..{len(image) - 1}")
        object.__setattr__(self, "image", image)

    def __len__(self):
        return len(self.image)

    @classmethod
    def identity(cls, k):
        return cls(tuple(range(k)))

    @classmethod
    def cyclic(cls, k, shift=1):
        """The cycle ``i -> i + shift (mod k)``."""
        return cls(tuple((i + shift) % k for i in range(k)))

    def inverse(self):
        inv = [0] * len(self.image)
        for i, j in enumerate(self.image):
            inv[j] = i
        return Permutation(tuple(inv))

    def compose(self, other):
        """Apply ``other`` first, then ``self``."""
        if len(other) != len(self):
            raise ValueError("cannot compose permutations of different length")
        return Permutation(tuple(self.image[other.image[i]] for i in range(len(self))))


@dataclass(frozen=True)
class Partition:
    """Register shape plus the party that owns each register."""

    shape: tuple
    parties: tuple = None

    def __post_init__(self):
        shape = tuple(int(s) for s in self.shape)
        if not shape:
            raise ValueError("a partition needs at least one register")
        parties = tuple(range(len(shape))) if self.parties is None else tuple(int(p) for p in self.parties)
        if len(parties) != len(shape):
            raise ValueError("every register must be assigned exactly one party")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "parties", parties)

    @property
    def n_parties(self):
        return len(set(self.parties))

    @property
    def dim(self):
        return prod(self.shape)

    def registers_of(self, party):
        return tuple(i for i, p in enumerate(self.parties) if p == party)

    def tensor(self, other):
        """Partition of ``R (x) T``; party ``j`` owns ``R_j`` and ``T_j``."""
        return Partition(self.shape + other.shape, self.parties + other.parties)

    def copies(self, n):
        return Partition(self.shape * n, self.parties * n)


@dataclass(frozen=True)
class ValidationReport:
    hermitian: bool
    psd: bool
    unit_trace: bool
    herm_residual: float
    min_eigenvalue: float
    trace_residual: float

    @property
    def ok(self):
        return self.hermitian and self.psd and self.unit_trace

    def __bool__(self):
        return self.ok


def _validate(state, tol):
    if not isinstance(state, DensityMatrix):
        raise TypeError("validate expects a DensityMatrix")
    m = state.entries
    herm_res = hermiticity_residual(m)
    trace_res = abs(complex(np.trace(m)) - 1.0)
    hermitian = herm_res <= tol.herm
    w = hermitian_eigenvalues(m, tol=tol) if hermitian else None
    if w is None:
        min_eig = float("nan")
    else:
        min_eig = float(w[-1]) if w.size else 0.0
    report = ValidationReport(
        hermitian=hermitian,
        psd=hermitian and min_eig >= -tol.psd,
        unit_trace=trace_res <= tol.trace,
        herm_residual=herm_res,
        min_eigenvalue=min_eig,
        trace_residual=trace_res,
    )
    return report, w


def validate(state, tol=DEFAULT_TOL):
    """Check the density-matrix conditions and report residuals.

    The PSD test is skipped (reported as failed, ``min_eigenvalue = nan``)
    when the matrix is not Hermitian.
    """
    return _validate(state, tol)[0]


def require_valid(state, tol=DEFAULT_TOL):
    report = validate(state, tol)
    if not report.ok:
        raise InvalidStateError(f"not a density matrix: {report}")
    return report


def tensor(a, b):
    """Kronecker product; register shapes concatenate."""
    return DensityMatrix(np.kron(a.entries, b.entries), a.shape + b.shape)


def tensor_power(a, n):
    if n < 1:
        raise ValueError("tensor power needs n >= 1")
    return reduce(tensor, [a] * n)


def mixed_radix_decode(index, radices):
    """Flat index -> digits, most significant first."""
    digits = []
    for r in reversed(radices):
        index, digit = divmod(index, r)
        digits.append(digit)
    if index:
        raise ValueError("index out of range for the given radices")
    return tuple(reversed(digits))


def mixed_radix_encode(digits, radices):
    index = 0
    for digit, r in zip(digits, radices):
        if not 0 <= digit < r:
            raise ValueError(f"digit {digit} out of range for radix {r}")
        index = index * r + digit
    return index


def _permute_array(m, shape, perm):
    k = len(shape)
    inv = perm.inverse().image
    new_shape = tuple(shape[inv[a]] for a in range(k))
    t = m.reshape(shape + shape)
    t = t.transpose(inv + tuple(k + i for i in inv))
    dim = m.shape[0]
    return np.ascontiguousarray(t).reshape(dim, dim), new_shape


def permute_registers(state, perm):
    """``U_p M U_p^dagger`` by relabelling register indices.

    Register ``i`` of the input becomes register ``perm.image[i]`` of the
    output, so ``Permutation.cyclic(3)`` maps ``a (x) b (x) c`` to
    ``c (x) a (x) b``.
    """
    if not isinstance(perm, Permutation):
        perm = Permutation(perm)
    if len(perm) != state.n_registers:
        raise ValueError(
            f"permutation acts on {len(perm)} registers, state has {state.n_registers}"
        )
    m, new_shape = _permute_array(state.entries, state.shape, perm)
    return DensityMatrix(m, new_shape)


def partial_trace(state, keep):
    """Reduced state on the registers in ``keep`` (kept in ascending order)."""
    keep = sorted(set(int(i) for i in np.atleast_1d(keep)))
    k = state.n_registers
    if not keep:
        raise ValueError("keep must name at least one register; use np.trace for the full trace")
    if keep[0] < 0 or keep[-1] >= k:
        raise ValueError(f"register index out of range for {k} registers")
    shape = state.shape
    t = state.entries.reshape(shape + shape)
    # einsum subscripts: traced registers share their row and column letter
    letters = iter("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ")
    rows = [next(letters) for _ in range(k)]
    cols = [rows[i] if i not in keep else next(letters) for i in range(k)]
    out = "".join(rows[i] for i in keep) + "".join(cols[i] for i in keep)
    reduced = np.einsum("".join(rows) + "".join(cols) + "->" + out, t)
    kept_shape = tuple(shape[i] for i in keep)
    d = prod(kept_shape)
    return DensityMatrix(reduced.reshape(d, d), kept_shape)


@dataclass(frozen=True)
class TraceDistance:
    """``norm`` is ``||A - B||_1``; ``half`` is the conventional trace distance."""

    norm: float

    @property
    def half(self):
        return 0.5 * self.norm


def trace_distance(a, b, method="auto"):
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return TraceDistance(trace_norm(a.entries - b.entries, method=method))


def binary_entropy(p):
    """h(p) in bits."""
    p = float(p)
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return float(-p * np.log2(p) - (1 - p) * np.log2(1 - p))


def entropy(state, tol=DEFAULT_TOL):
    """Von Neumann entropy in bits.

    Eigenvalues below ``tol.eig`` contribute nothing (``0 log 0 = 0``).
    Raises :class:`InvalidStateError` on input that is not a density matrix.
    """
    report, w = _validate(state, tol)
    if not report.ok:
        raise InvalidStateError(f"entropy of an invalid state: {report}")
    w = w[w > tol.eig]
    s = float(-np.sum(w * np.log2(w)))
    return max(s, 0.0)


def sample_random_state(d, rank=None, seed=None, shape=None):
    """Random density matrix ``G G^dagger / tr(G G^dagger)`` of the given rank.

    ``G`` is ``d x rank`` with standard complex Gaussian entries drawn from
    ``numpy.random.default_rng(seed)`` (PCG64), so equal seeds give equal
    states.
    """
    rank = d if rank is None else int(rank)
    if not 1 <= rank <= d:
        raise ValueError(f"rank must lie in [1, {d}], got {rank}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    m = g @ g.conj().T
    m = 0.5 * (m + m.conj().T)
    return DensityMatrix(m / np.trace(m).real, shape)
