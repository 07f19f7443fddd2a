"""Membership tests for the heavy-tail classes and the implication report.

Every predicate takes a :class:`~invsub.distribution.Distribution` and a
:class:`~invsub.numerics.GridSpec` and returns a
:class:`~invsub.numerics.Verdict`.  The two-copy inequalities share one
``(x, theta)`` lattice; shape tests on compositions are restricted to the
points where ``F`` lies in ``[1e-9, 1 - 1e-9]`` so the transforms stay
finite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .catalog import CAUCHY, FRECHET
from .distribution import Distribution, quantile_composition
from .numerics import GridSpec, Verdict, check_concave, check_concave_convex, dumps, scan_pairs

__all__ = [
    "CLASSES",
    "IMPLICATIONS",
    "ClassificationReport",
    "invsub_residual",
    "super_heavy_residual",
    "nwu_residual",
    "scan_points",
    "interior_points",
    "is_invsub",
    "is_super_heavy_tailed",
    "is_nwu",
    "odds_shape",
    "is_dor_super_pareto",
    "is_ior",
    "is_super_frechet",
    "is_super_cauchy",
    "hazard_sufficient_invsub",
    "classify_all",
]

PROB_CLIP = 1e-9
_MAX_JUMP_POINTS = 500

CLASSES = ("invsub", "super_heavy_tailed", "nwu", "super_pareto", "ior",
           "super_frechet", "super_cauchy", "hazard_bound")

# (antecedent, consequent); super-Pareto => InvSub is only checked for
# nonnegative laws, which is automatic since InvSub is not applicable otherwise
IMPLICATIONS = (
    ("super_heavy_tailed", "invsub"),
    ("super_pareto", "invsub"),
    ("super_pareto", "super_frechet"),
    ("super_frechet", "super_cauchy"),
    ("hazard_bound", "invsub"),
)


# ---------------------------------------------------------------------------
# lattices


def scan_points(d: Distribution, g: GridSpec):
    """Grid abscissae for ``d``: ``g.xs()``, mirrored for real-line laws,
    plus the largest atoms of a discrete law that fall inside the grid."""
    xs = g.xs()
    if d.support_lo < 0:
        xs = np.concatenate([-xs[::-1], xs])
    if not d.is_continuous:
        pts = d.jumps[0][:_MAX_JUMP_POINTS]
        pts = pts[(pts >= g.x_lo) & (pts <= g.x_hi)]
        xs = np.union1d(xs, pts)
    return xs


def interior_points(d: Distribution, g: GridSpec, clip=PROB_CLIP):
    """Grid points where ``clip <= F(x) <= 1 - clip``."""
    xs = scan_points(d, g)
    F, S = d.cdf(xs), d.sf(xs)
    return xs[(F >= clip) & (S >= clip)]


def _nonnegative(d: Distribution, tol):
    return d.support_lo >= 0 and d.cdf(0.0) <= tol


# ---------------------------------------------------------------------------
# two-copy inequalities


def invsub_residual(d: Distribution, x, theta):
    """``F(x/t) + F(x/(1-t)) - F(x) - 1`` written with survival functions."""
    x, theta = np.asarray(x, dtype=float), np.asarray(theta, dtype=float)
    return d.sf(x) - d.sf(x / theta) - d.sf(x / (1.0 - theta))


def super_heavy_residual(d: Distribution, x, theta):
    """``F(x/t) F(x/(1-t)) - F(x)``, switching to survival form where ``F(x) > 1/2``."""
    x, theta = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(theta, dtype=float))
    a, b = x / theta, x / (1.0 - theta)
    direct = d.cdf(a) * d.cdf(b) - d.cdf(x)
    sa, sb = d.sf(a), d.sf(b)
    tail = d.sf(x) - sa - sb + sa * sb
    return np.where(d.cdf(x) < 0.5, direct, tail)


def nwu_residual(d: Distribution, x, y):
    return d.sf(x) * d.sf(y) - d.sf(np.asarray(x) + np.asarray(y))


def _lattice_scan(residual, d, g):
    xs, ts = scan_points(d, g), g.thetas()
    X, T = np.meshgrid(xs, ts, indexing="ij")
    with np.errstate(all="ignore"):
        res = np.asarray(residual(d, X, T), dtype=float)
    if np.isnan(res).any():
        res = np.where(np.isnan(res), np.inf, res)
    k = np.unravel_index(int(np.argmax(res)), res.shape)
    return Verdict.from_scan(float(res[k]), (float(X[k]), float(T[k])), g, g.tol)


def is_invsub(d: Distribution, g: GridSpec | None = None) -> Verdict:
    g = g or GridSpec()
    if not _nonnegative(d, g.tol):
        return Verdict.not_applicable("needs F(0) = 0 and nonnegative support", g)
    return _lattice_scan(invsub_residual, d, g)


def is_super_heavy_tailed(d: Distribution, g: GridSpec | None = None) -> Verdict:
    g = g or GridSpec()
    if not _nonnegative(d, g.tol):
        return Verdict.not_applicable("needs F(0) = 0 and nonnegative support", g)
    return _lattice_scan(super_heavy_residual, d, g)


def is_nwu(d: Distribution, g: GridSpec | None = None, workers=1) -> Verdict:
    """New worse than used: ``S(x) S(y) <= S(x + y)``."""
    g = g or GridSpec()
    if d.support_lo < 0:
        return Verdict.not_applicable("needs nonnegative support", g)
    return scan_pairs(lambda x, y: nwu_residual(d, x, y), g, xs=scan_points(d, g), workers=workers)


# ---------------------------------------------------------------------------
# transform-order classes


def odds_shape(d: Distribution, g: GridSpec | None = None, workers=1):
    """``(concave, convex)`` verdicts for ``1 / S(x)`` on the interior points."""
    g = g or GridSpec()
    xs = interior_points(d, g)
    return check_concave_convex(lambda x: 1.0 / d.sf(x), g, xs=xs, workers=workers)


def is_dor_super_pareto(d: Distribution, g: GridSpec | None = None, workers=1) -> Verdict:
    """Decreasing odds rate, equivalently super-Pareto: ``1/S`` concave."""
    return odds_shape(d, g, workers)[0]


def is_ior(d: Distribution, g: GridSpec | None = None, workers=1) -> Verdict:
    """Increasing odds rate: ``1/S`` convex."""
    return odds_shape(d, g, workers)[1]


def is_super_frechet(d: Distribution, g: GridSpec | None = None, workers=1) -> Verdict:
    """Frechet precedes ``d`` in the convex transform order.

    Tested as concavity of ``-1/log F(x)``, the Frechet quantile applied to
    ``F``; this is equivalent to convexity of ``F^{-1}`` composed with the
    Frechet distribution function.
    """
    g = g or GridSpec()
    xs = interior_points(d, g)
    return check_concave(lambda x: quantile_composition(FRECHET, d, x), g, xs=xs, workers=workers)


def is_super_cauchy(d: Distribution, g: GridSpec | None = None, workers=1) -> Verdict:
    """Cauchy precedes ``d`` in the convex transform order (concavity of ``C^{-1}(F)``)."""
    g = g or GridSpec()
    xs = interior_points(d, g)
    return check_concave(lambda x: quantile_composition(CAUCHY, d, x), g, xs=xs, workers=workers)


def hazard_sufficient_invsub(d: Distribution, g: GridSpec | None = None) -> Verdict:
    """Sufficient condition ``x r(x) <= 1`` for InvSub."""
    g = g or GridSpec()
    if not d.has_density:
        return Verdict.not_applicable("no density available", g)
    if not _nonnegative(d, g.tol):
        return Verdict.not_applicable("needs nonnegative support", g)
    xs = scan_points(d, g)
    xs = xs[(xs > 0) & (d.sf(xs) > 0)]
    res = xs * d.hazard(xs) - 1.0
    res = np.where(np.isnan(res), np.inf, res)
    k = int(np.argmax(res))
    return Verdict.from_scan(float(res[k]), (float(xs[k]),), g, g.tol)


# ---------------------------------------------------------------------------
# report


@dataclass(frozen=True)
class ClassificationReport:
    distribution: Distribution
    verdicts: dict
    implication_violations: list = field(default_factory=list)
    grid: GridSpec | None = None

    def to_dict(self):
        return {
            "distribution": {"spec": self.distribution.spec, **self.distribution.to_dict()},
            "verdicts": {name: v.to_dict() for name, v in self.verdicts.items()},
            "implication_violations": [
                {"antecedent": a, "consequent": c,
                 "witness": None if w is None else [float(t) for t in w]}
                for a, c, w in self.implication_violations
            ],
            "grid": None if self.grid is None else self.grid.to_dict(),
        }

    def to_json(self):
        return dumps(self)


def implication_violations(verdicts):
    out = []
    for ante, cons in IMPLICATIONS:
        a, c = verdicts.get(ante), verdicts.get(cons)
        if a is not None and c is not None and a.supported and c.violated:
            out.append((ante, cons, c.witness))
    return out


def classify_all(d: Distribution, g: GridSpec | None = None, workers=1) -> ClassificationReport:
    """Run every predicate on ``d`` and cross-check the implication chain."""
    g = g or GridSpec()
    dor, ior = odds_shape(d, g, workers)
    verdicts = {
        "invsub": is_invsub(d, g),
        "super_heavy_tailed": is_super_heavy_tailed(d, g),
        "nwu": is_nwu(d, g, workers),
        "super_pareto": dor,
        "ior": ior,
        "super_frechet": is_super_frechet(d, g, workers),
        "super_cauchy": is_super_cauchy(d, g, workers),
        "hazard_bound": hazard_sufficient_invsub(d, g),
    }
    return ClassificationReport(d, verdicts, implication_violations(verdicts), g)
