"""Heavy-tail classes, stochastic orders and diversification dominance.

Numerical checks that classify distributions into inverted-subadditive
(InvSub), super-heavy-tailed, NWU, super-Pareto, super-Frechet and
super-Cauchy families, compare distributions in the usual stochastic,
convex transform and inverted-subadditive orders, and test whether a
weighted average of iid copies stochastically dominates a single copy.
"""

from .catalog import CAUCHY, CATALOG, FRECHET, PARETO, CatalogEntry, default_catalog, parse_spec
from .classifiers import (ClassificationReport, classify_all, hazard_sufficient_invsub,
                          is_dor_super_pareto, is_invsub, is_ior, is_nwu, is_super_cauchy,
                          is_super_frechet, is_super_heavy_tailed)
from .distribution import (Distribution, TransformSpec, make_transformed, sample,
                           validate_distribution)
from .dominance import (DominanceReport, WeightVector, check_dominance_exact2, check_dominance_mc,
                        mean_diagnostic, mixture_survival_exact2)
from .errors import (AccuracyError, EvaluationError, InvalidDistributionError,
                     InvalidTransformError, InvalidWeightsError, InvsubError, SpecError)
from .numerics import (GridSpec, Status, Verdict, check_anti_star_shaped, check_concave,
                       check_convex, check_star_shaped, check_subadditive, stieltjes_integral)
from .orders import OrderCheck, compare, leq_c, leq_isb, leq_st

__version__ = "0.1.0"

__all__ = [
    "AccuracyError", "CATALOG", "CAUCHY", "CatalogEntry", "ClassificationReport", "Distribution",
    "DominanceReport", "EvaluationError", "FRECHET", "GridSpec", "InvalidDistributionError",
    "InvalidTransformError", "InvalidWeightsError", "InvsubError", "OrderCheck", "PARETO",
    "SpecError", "Status", "TransformSpec", "Verdict", "WeightVector", "check_anti_star_shaped",
    "check_concave", "check_convex", "check_dominance_exact2", "check_dominance_mc",
    "check_star_shaped", "check_subadditive", "classify_all", "compare", "default_catalog",
    "hazard_sufficient_invsub", "is_dor_super_pareto", "is_invsub", "is_ior", "is_nwu",
    "is_super_cauchy", "is_super_frechet", "is_super_heavy_tailed", "leq_c", "leq_isb", "leq_st",
    "make_transformed", "mean_diagnostic", "mixture_survival_exact2", "parse_spec", "sample",
    "stieltjes_integral", "validate_distribution",
]
