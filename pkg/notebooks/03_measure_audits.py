# %% [markdown]
# # Auditing what a measure claims
#
# The argument needs additivity, invariance under register permutations
# and a pair of states with different values.  Entropy has all three;
# its square is not additive.

# %%
from embezzle import DensityMatrix, get_measure, run_audits
from embezzle.measures import audit_additivity

for name in ("entropy", "entropy-squared", "marginal-entropy"):
    print(run_audits(get_measure(name), seed=0).format())

# %% [markdown]
# The smallest counterexample for the square: two maximally mixed qubits.
# `S^2(I/4) = 4` while `S^2(I/2) + S^2(I/2) = 2`.

# %%
half = DensityMatrix.maximally_mixed(2)
print(audit_additivity(get_measure("entropy-squared"), [(half, half)]).max_residual)
