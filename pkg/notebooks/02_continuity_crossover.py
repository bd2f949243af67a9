# %% [markdown]
# # Where a sublinear continuity bound breaks
#
# With `f = S`, `rho = |0><0|` and `sigma = I/2` the gap `c = 1` never
# shrinks, while the catalyst moves by at most `2/(n-1)`.  Any bound of
# the form `K T (log2 D)^alpha` with `alpha < 1` is eventually too small.

# %%
from embezzle import DensityMatrix, demo_csv, get_measure, theorem_demo

rho = DensityMatrix.from_diag([1.0, 0.0])
sigma = DensityMatrix.maximally_mixed(2)
n_list = [2, 3, 4, 5, 6, 7, 8, 9, 16, 64, 256, 1024, 4096, 65536]
table = theorem_demo(rho, sigma, get_measure("entropy"), n_list)

# %%
print("c =", table.c)
for alpha, n_star in table.crossovers.items():
    print(f"alpha={alpha:<5} first crossing n = {n_star}")

# %% [markdown]
# At `alpha = 1` the bound tends to `2 K log2 d = 2`, which stays above
# `c = 1`: plain asymptotic continuity survives.

# %%
for row in table.by_alpha(1.0)[-4:]:
    print(row.n, round(row.rhs_paper, 6))

# %% [markdown]
# The same table as CSV, ready for plotting elsewhere.

# %%
print(demo_csv(table)[:600])
