"""Quantities on density matrices and audits of their structural claims.

A :class:`MeasureDescriptor` wraps an evaluator together with the
properties it claims (additivity over tensor products, invariance under
register permutations, non-constancy).  The audits here check those claims
numerically on concrete states.
"""
from dataclasses import dataclass, field
from itertools import permutations as _all_permutations

import numpy as np

from .catalyst import DENSE_CAP, DenseCapError, per_party_cyclic_shift
from .states import (
    DensityMatrix,
    Partition,
    Permutation,
    entropy,
    partial_trace,
    permute_registers,
    sample_random_state,
    tensor,
)

__all__ = [
    "MeasureDescriptor",
    "NegativeValueError",
    "NonconstancyWitness",
    "AuditReport",
    "builtin_measures",
    "get_measure",
    "MEASURE_NAMES",
    "marginal_entropy",
    "find_nonconstancy_witness",
    "audit_additivity",
    "audit_permutation_invariance",
    "audit_cyclic_invariance",
    "evaluate_mixture",
    "evaluate_product",
]

ADDITIVITY_TOL = 1e-8
PERMUTATION_TOL = 1e-9
NONCONSTANCY_TOL = 1e-9


class NegativeValueError(ValueError):
    """The evaluator left the non-negative reals."""


@dataclass(frozen=True)
class MeasureDescriptor:
    name: str
    evaluate: object
    additive: bool = False
    permutation_invariant: bool = False
    nonconstant: bool = False
    partition_aware: bool = False
    description: str = ""

    def __call__(self, state, partition=None):
        if self.partition_aware:
            value = self.evaluate(state, partition)
        else:
            value = self.evaluate(state)
        value = float(value)
        if value < 0:
            raise NegativeValueError(f"{self.name} returned {value!r} < 0")
        return value

    @property
    def claims(self):
        return {
            "additive": self.additive,
            "permutation_invariant": self.permutation_invariant,
            "nonconstant": self.nonconstant,
        }


def _default_partition(state):
    # first register is party 0, everything else party 1
    return Partition(state.shape, (0,) + (1,) * (state.n_registers - 1))


def marginal_entropy(state, partition=None):
    """Entropy of the reduced state of party 0."""
    if partition is None:
        partition = _default_partition(state)
    if partition.shape != state.shape:
        raise ValueError(f"partition shape {partition.shape} does not match state {state.shape}")
    keep = partition.registers_of(0)
    if len(keep) == state.n_registers:
        return entropy(state)
    return entropy(partial_trace(state, keep))


def _entropy_squared(state):
    return entropy(state) ** 2


def builtin_measures():
    return [
        MeasureDescriptor(
            "entropy",
            entropy,
            additive=True,
            permutation_invariant=True,
            nonconstant=True,
            description="von Neumann entropy in bits",
        ),
        MeasureDescriptor(
            "marginal-entropy",
            marginal_entropy,
            additive=True,
            permutation_invariant=True,
            nonconstant=True,
            partition_aware=True,
            description="entropy of party 0's reduced state (cyclic-permutation invariant)",
        ),
        MeasureDescriptor(
            "entropy-squared",
            _entropy_squared,
            additive=False,
            permutation_invariant=True,
            nonconstant=True,
            description="S(rho)^2, deliberately not additive",
        ),
    ]


MEASURE_NAMES = tuple(m.name for m in builtin_measures())


def get_measure(name):
    for m in builtin_measures():
        if m.name == name:
            return m
    raise KeyError(f"unknown measure {name!r}; choose from {', '.join(MEASURE_NAMES)}")


@dataclass(frozen=True)
class NonconstancyWitness:
    d: int
    rho: DensityMatrix
    sigma: DensityMatrix
    c: float


def find_nonconstancy_witness(f, d=2, samples=16, seed=0, states=None, partition=None):
    """Pair among sampled states that maximises ``|f(rho) - f(sigma)|``.

    Samples cycle through ranks ``1..d``; ``|0><0|`` and ``I/d`` are always
    added.  Pass ``states`` to search a fixed list instead.  Returns
    ``None`` if every pair agrees to within 1e-9.
    """
    if states is None:
        if d < 2 or samples < 2:
            raise ValueError("need d >= 2 and samples >= 2")
        rng = np.random.default_rng(seed)
        shape = partition.shape if partition is not None else None
        states = [
            sample_random_state(d, rank=1 + i % d, seed=int(rng.integers(2**63)), shape=shape)
            for i in range(samples)
        ]
        basis0 = np.zeros(d)
        basis0[0] = 1.0
        states += [DensityMatrix.from_diag(basis0, shape), DensityMatrix.maximally_mixed(d, shape)]
    values = [f(s, partition) for s in states]
    lo = int(np.argmin(values))
    hi = int(np.argmax(values))
    c = values[hi] - values[lo]
    if c <= NONCONSTANCY_TOL:
        return None
    return NonconstancyWitness(states[0].dim, states[lo], states[hi], c)


@dataclass(frozen=True)
class AuditReport:
    name: str
    max_residual: float
    tolerance: float
    worst_index: int = -1
    residuals: tuple = field(default=(), repr=False)

    @property
    def passed(self):
        return self.max_residual <= self.tolerance


def audit_additivity(f, pairs, partitions=None, dense_cap=DENSE_CAP):
    """Max of ``|f(mu (x) nu) - f(mu) - f(nu)|`` over ``pairs``.

    For partition-aware measures ``partitions`` gives one ``(P_mu, P_nu)``
    per pair; the composite is evaluated on ``P_mu.tensor(P_nu)``.
    """
    residuals = []
    for i, (mu, nu) in enumerate(pairs):
        if mu.dim * nu.dim > dense_cap:
            raise DenseCapError(f"composite dimension {mu.dim * nu.dim} exceeds dense_cap={dense_cap}")
        pm, pn = partitions[i] if partitions is not None else (None, None)
        joint = pm.tensor(pn) if pm is not None else None
        residuals.append(abs(f(tensor(mu, nu), joint) - f(mu, pm) - f(nu, pn)))
    worst = int(np.argmax(residuals)) if residuals else -1
    return AuditReport(
        "additivity",
        max(residuals, default=0.0),
        ADDITIVITY_TOL,
        worst,
        tuple(residuals),
    )


def audit_permutation_invariance(f, state, perms=None, partition=None):
    """Max of ``|f(U_p mu U_p^dagger) - f(mu)|`` over ``perms`` (default: all of S_k)."""
    k = state.n_registers
    if perms is None:
        perms = [Permutation(p) for p in _all_permutations(range(k))]
    base = f(state, partition)
    residuals = []
    for p in perms:
        p = p if isinstance(p, Permutation) else Permutation(p)
        if len(p) != k:
            raise ValueError(f"permutation of length {len(p)} for a {k}-register state")
        moved = permute_registers(state, p)
        mp = None
        if partition is not None:
            inv = p.inverse().image
            mp = Partition(moved.shape, tuple(partition.parties[inv[a]] for a in range(k)))
        residuals.append(abs(f(moved, mp) - base))
    worst = int(np.argmax(residuals)) if residuals else -1
    return AuditReport(
        "permutation-invariance",
        max(residuals, default=0.0),
        PERMUTATION_TOL,
        worst,
        tuple(residuals),
    )


def audit_cyclic_invariance(f, state, partition, n_copies):
    """Residual of ``f`` under the per-party cyclic shift across copies."""
    full = partition.copies(n_copies)
    base = f(state, full)
    shifts = [per_party_cyclic_shift(state, partition, n_copies)]
    shifts += [per_party_cyclic_shift(state, partition, n_copies, parties=[j]) for j in sorted(set(partition.parties))]
    residuals = [abs(f(s, full) - base) for s in shifts]
    return AuditReport(
        "cyclic-invariance",
        max(residuals),
        PERMUTATION_TOL,
        int(np.argmax(residuals)),
        tuple(residuals),
    )


def evaluate_mixture(f, mixture, partition=None, dense_cap=DENSE_CAP):
    """``f`` on the dense form of a :class:`~embezzle.catalyst.WordMixture`."""
    if mixture.dim > dense_cap:
        raise DenseCapError(f"mixture dimension {mixture.dim} exceeds dense_cap={dense_cap}")
    return f(mixture.densify(), partition)


def evaluate_product(f, factors, additivity=None):
    """``f(A_1 (x) ... (x) A_k)`` as ``sum f(A_i)``.

    Only allowed for a measure that claims additivity and whose
    ``additivity`` audit report (if given) passed.
    """
    if not f.additive:
        raise ValueError(f"{f.name} does not claim additivity")
    if additivity is not None and not additivity.passed:
        raise ValueError(f"{f.name} failed its additivity audit (residual {additivity.max_residual:.3e})")
    return float(sum(f(a) for a in factors))
