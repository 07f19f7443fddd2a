# %% [markdown]
# # Stochastic orders
#
# Three comparisons: the usual stochastic order, the convex transform
# order and the inverted-subadditive order.  Comparing a law against the
# Frechet and Pareto benchmarks in the last one reproduces the
# super-heavy-tailed and InvSub tests.

# %%
from invsub import (FRECHET, PARETO, default_catalog, is_invsub, is_super_heavy_tailed, leq_c,
                    leq_isb, leq_st, parse_spec)

# %%
print("frechet <=i-sb pareto:", leq_isb(FRECHET, PARETO).status.value)
print("frechet <=c pareto:   ", leq_c(FRECHET, PARETO).status.value)
print("frechet <=c exp:      ", leq_c(FRECHET, parse_spec("exp:rate=1")).status.value)
print("shifted <=st pareto:  ", leq_st(parse_spec("shifted-pareto"), PARETO).status.value)

# %% [markdown]
# Benchmark agreement across the catalog.

# %%
print(f"{'distribution':28s} {'<=isb frechet':>14s} {'super-heavy':>12s} {'<=isb pareto':>13s} {'invsub':>10s}")
for d in default_catalog():
    cols = (leq_isb(d, FRECHET).status, is_super_heavy_tailed(d).status,
            leq_isb(d, PARETO).status, is_invsub(d).status)
    print(f"{d.spec:28s} " + " ".join(f"{c.value:>13s}" for c in cols))

# %% [markdown]
# The order is not shift invariant: Pareto sits below itself, Pareto + 1
# does not.

# %%
print(leq_isb(PARETO, PARETO).status.value,
      leq_isb(parse_spec("transform(affine:1,1,pareto)"), PARETO).status.value)
