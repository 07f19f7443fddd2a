# %% [markdown]
# # Classifying the catalog
#
# Every named distribution is run through all class tests on the default
# lattice (2001 log-spaced points on [1e-6, 1e6], 199 weights).  A verdict
# is "supported on the grid", never a proof.

# %%
import numpy as np

from invsub import FRECHET, PARETO, classify_all, default_catalog, parse_spec
from invsub.classifiers import CLASSES, invsub_residual

# %%
short = {"invsub": "inv", "super_heavy_tailed": "shv", "nwu": "nwu", "super_pareto": "spa",
         "ior": "ior", "super_frechet": "sfr", "super_cauchy": "sca", "hazard_bound": "haz"}
mark = {"supported": "+", "violated": "-", "not_applicable": "."}

print(f"{'distribution':28s} " + " ".join(short[c] for c in CLASSES))
for d in default_catalog():
    rep = classify_all(d)
    row = " ".join(f"{mark[rep.verdicts[c].status.value]:>3s}" for c in CLASSES)
    flag = "  implication violated!" if rep.implication_violations else ""
    print(f"{d.spec:28s} {row}{flag}")

# %% [markdown]
# The two-copy residual `F(x/t) + F(x/(1-t)) - F(x) - 1` is identically
# zero for the Pareto law once `x >= 1`, negative for Frechet and positive
# somewhere for the exponential.

# %%
x = np.array([1.0, 2.0, 4.0])
for name, d in (("pareto", PARETO), ("frechet", FRECHET), ("exp", parse_spec("exp:rate=1"))):
    print(name, np.round(invsub_residual(d, x, 0.5), 6))

# %% [markdown]
# Witnesses locate a violation.  For the log-odds family neither the
# concave nor the convex odds test holds:

# %%
rep = classify_all(parse_spec("oddslog:b=0.5"))
for c in ("super_pareto", "ior"):
    v = rep.verdicts[c]
    print(c, v.status.value, "witness", v.witness, "residual", f"{v.worst_residual:.3g}")
