"""Catalytic embezzlement by cyclic register shifts, and why additive
permutation-invariant quantities cannot beat asymptotic continuity.

Modules
-------
linalg     Jacobi/LAPACK Hermitian eigensolver, trace norm
states     DensityMatrix, register permutations, partial trace, entropy
io         JSON state format
catalyst   Gamma, Gamma', the cyclic-shift protocol, trace distances
measures   measure registry and additivity/permutation audits
audit      continuity bounds, theorem demo table, exponent fit
cli        ``embezzle`` command
"""
__version__ = "0.1.0"

from .linalg import DEFAULT_TOL, Tolerances, hermitian_eigenvalues, hermitian_eigh, trace_norm
from .states import (
    DensityMatrix,
    Partition,
    Permutation,
    entropy,
    partial_trace,
    permute_registers,
    sample_random_state,
    tensor,
    trace_distance,
    validate,
)
from .catalyst import (
    WordMixture,
    apply_protocol,
    build_catalyst,
    catalyst_difference,
    catalyst_trace_distance,
    per_party_cyclic_shift,
    shift_catalyst,
)
from .measures import builtin_measures, find_nonconstancy_witness, get_measure
from .audit import (
    ContinuityParams,
    EtaModel,
    continuity_rhs,
    demo_csv,
    fit_continuity_exponent,
    run_audits,
    theorem_demo,
)
