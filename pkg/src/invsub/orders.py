"""Pairwise comparisons: usual stochastic order, convex transform order and
the inverted-subadditive order."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classifiers import PROB_CLIP, interior_points, scan_points
from .distribution import Distribution, quantile_composition
from .numerics import GridSpec, Verdict, check_convex, check_subadditive, dumps

__all__ = ["ORDERS", "OrderCheck", "leq_st", "leq_c", "leq_isb", "compare", "isb_composition"]

ORDERS = ("st", "c", "i-sb")
_EVIDENCE_POINTS = 101


@dataclass(frozen=True)
class OrderCheck:
    """Outcome of ``left <= right`` in one order.

    ``composition`` holds ``(x, value)`` samples of the transform whose
    shape decides the order (the survival difference for ``st``).
    ``clipped`` is set when probabilities had to be held inside
    ``[1e-9, 1 - 1e-9]`` to keep the composition finite.
    """

    left: Distribution
    right: Distribution
    order: str
    verdict: Verdict
    composition: tuple = ()
    clipped: bool = False
    warnings: tuple = field(default=())

    @property
    def status(self):
        return self.verdict.status

    def to_dict(self):
        return {
            "left": self.left.spec,
            "right": self.right.spec,
            "order": self.order,
            "verdict": self.verdict.to_dict(),
            "composition": [[float(x), float(v)] for x, v in self.composition],
            "warnings": list(self.warnings),
            "grid": None if self.verdict.grid is None else self.verdict.grid.to_dict(),
        }

    def to_json(self):
        return dumps(self)


def _evidence(fn, xs):
    if xs.size == 0:
        return ()
    idx = np.unique(np.linspace(0, xs.size - 1, min(_EVIDENCE_POINTS, xs.size)).astype(int))
    with np.errstate(all="ignore"):
        vals = np.asarray(fn(xs[idx]), dtype=float)
    return tuple(zip(xs[idx].tolist(), vals.tolist()))


def leq_st(left: Distribution, right: Distribution, g: GridSpec | None = None) -> OrderCheck:
    """``S_left(x) <= S_right(x)`` on the grid."""
    g = g or GridSpec()
    xs = np.union1d(scan_points(left, g), scan_points(right, g))

    def diff(x):
        return left.sf(x) - right.sf(x)

    res = diff(xs)
    k = int(np.argmax(res))
    verdict = Verdict.from_scan(float(res[k]), (float(xs[k]),), g, g.tol)
    return OrderCheck(left, right, "st", verdict, _evidence(diff, xs))


def leq_c(left: Distribution, right: Distribution, g: GridSpec | None = None, workers=1) -> OrderCheck:
    """Convex transform order: ``right.quantile(left.cdf(x))`` convex."""
    g = g or GridSpec()
    xs = interior_points(left, g)

    def comp(x):
        return quantile_composition(right, left, x)

    # an atom at +inf in ``right`` makes the composition infinite on a tail
    with np.errstate(all="ignore"):
        xs = xs[np.isfinite(comp(xs))]

    verdict = check_convex(comp, g, xs=xs, workers=workers)
    return OrderCheck(left, right, "c", verdict, _evidence(comp, xs))


def isb_composition(left: Distribution, right: Distribution, flag=None):
    """``x -> 1 / right.quantile(left.cdf_left(1/x))`` with probabilities clipped
    to ``[1e-9, 1 - 1e-9]``; ``flag`` (a list) records whether clipping bit."""

    def comp(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            t = 1.0 / x
            u = np.atleast_1d(np.asarray(left.cdf_left(t), dtype=float))
            s = 1.0 - u if not left.is_continuous else np.atleast_1d(np.asarray(left.sf(t), dtype=float))
        hit = (u < PROB_CLIP) | (s < PROB_CLIP)
        if flag is not None and hit.any():
            flag.append(True)
        u, s = np.clip(u, PROB_CLIP, 1 - PROB_CLIP), np.clip(s, PROB_CLIP, 1 - PROB_CLIP)
        low = u < 0.5
        q = np.empty(u.shape)
        if low.any():
            q[low] = right.quantile(u[low])
        if (~low).any():
            q[~low] = right.isf(s[~low])
        return (1.0 / q).reshape(np.shape(x))

    return comp


def leq_isb(left: Distribution, right: Distribution, g: GridSpec | None = None, workers=1) -> OrderCheck:
    """Inverted-subadditive order: ``1 / right.quantile(left.cdf_left(1/x))`` subadditive."""
    g = g or GridSpec()
    if left.support_lo < 0 or left.cdf(0.0) > g.tol:
        verdict = Verdict.not_applicable("left distribution must have F(0) = 0", g)
        return OrderCheck(left, right, "i-sb", verdict)
    flag = []
    comp = isb_composition(left, right, flag)
    verdict = check_subadditive(comp, g, workers=workers)
    evidence = _evidence(comp, g.xs())
    warnings = ("probabilities clipped to [1e-9, 1-1e-9] in the composition",) if flag else ()
    return OrderCheck(left, right, "i-sb", verdict, evidence, bool(flag), warnings)


def compare(left: Distribution, right: Distribution, order: str, g: GridSpec | None = None,
            workers=1) -> OrderCheck:
    if order == "st":
        return leq_st(left, right, g)
    if order == "c":
        return leq_c(left, right, g, workers)
    if order in ("i-sb", "isb", "i_sb"):
        return leq_isb(left, right, g, workers)
    raise ValueError(f"unknown order {order!r}; expected one of {', '.join(ORDERS)}")
