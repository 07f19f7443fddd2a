"""Does a weighted average of iid copies dominate a single copy?

``check_dominance_exact2`` answers this for two copies by computing the
survival function of ``t X1 + (1-t) X2`` with Stieltjes quadrature;
``check_dominance_mc`` handles any number of copies by simulation, with a
DKW band on each empirical survival curve.
"""

from __future__ import annotations

import csv
import io
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .distribution import Distribution
from .errors import InvalidWeightsError
from .numerics import GridSpec, Verdict, dumps, stieltjes_integral

__all__ = [
    "WeightVector",
    "DominanceReport",
    "MeanDiagnostic",
    "DOMINANCE_GRID",
    "mixture_survival_exact2",
    "check_dominance_exact2",
    "check_dominance_mc",
    "mc_evaluation_points",
    "dkw_epsilon",
    "mean_diagnostic",
]

# quadrature is accurate to about 1e-8, so dominance uses a coarser grid and tolerance
DOMINANCE_GRID = GridSpec(x_lo=1e-3, x_hi=1e4, n_x=141, tol=1e-6)
MC_CHUNK = 16384


@dataclass(frozen=True)
class WeightVector:
    """Positive weights summing to one."""

    theta: tuple

    def __post_init__(self):
        theta = tuple(float(t) for t in self.theta)
        object.__setattr__(self, "theta", theta)
        if len(theta) < 1:
            raise InvalidWeightsError("need at least one weight")
        if any(not np.isfinite(t) or t <= 0 for t in theta):
            raise InvalidWeightsError("weights must be positive")
        if abs(sum(theta) - 1.0) > 1e-12:
            raise InvalidWeightsError(f"weights must sum to 1 (got {sum(theta)!r})")

    @classmethod
    def parse(cls, text):
        try:
            values = [float(v) for v in text.split(",")]
        except ValueError:
            raise InvalidWeightsError(f"cannot parse weights {text!r}") from None
        return cls(tuple(values))

    def __len__(self):
        return len(self.theta)

    def __iter__(self):
        return iter(self.theta)


@dataclass(frozen=True)
class DominanceReport:
    distribution: Distribution
    weights: WeightVector
    method: str
    eval_points: np.ndarray
    gap: np.ndarray
    verdict: Verdict
    mixture_survival: np.ndarray
    survival: np.ndarray
    band: float | None = None
    n_samples: int | None = None
    seed: int | None = None
    alpha: float | None = None
    extra: dict = field(default_factory=dict)

    @property
    def status(self):
        return self.verdict.status

    def to_dict(self):
        return {
            "distribution": self.distribution.spec,
            "weights": list(self.weights.theta),
            "method": self.method,
            "points": [{"x": float(x), "gap": float(gp), "band": self.band}
                       for x, gp in zip(self.eval_points, self.gap)],
            "verdict": self.verdict.to_dict(),
            "n_samples": self.n_samples,
            "seed": self.seed,
            "alpha": self.alpha,
            **self.extra,
        }

    def to_json(self):
        return dumps(self)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "gap", "band", "mixture_survival", "survival"])
        band = "" if self.band is None else repr(float(self.band))
        for row in zip(self.eval_points, self.gap, self.mixture_survival, self.survival):
            x, gp, ms, s = (repr(float(v)) for v in row)
            w.writerow([x, gp, band, ms, s])
        return buf.getvalue()


def _weights(w):
    return w if isinstance(w, WeightVector) else WeightVector(tuple(w))


# ---------------------------------------------------------------------------
# two copies, quadrature


def mixture_survival_exact2(d: Distribution, theta: float, x, *, cache=None):
    """``P(theta X1 + (1-theta) X2 > x)`` for iid nonnegative ``X1, X2``.

    Conditioning on one copy gives ``1 - int F((x - theta t)/(1-theta)) dF(t)``
    over ``t <= x/theta``, but that integrand turns into a step near the
    upper limit.  The line ``theta t + (1-theta) u = x`` is therefore split
    where both terms equal ``x/2``; with ``a = x/(2 theta)`` and
    ``b = x/(2 (1-theta))``::

        P = int_{t<=a} S((x - theta t)/(1-theta)) dF(t)
          + int_{u<=b} S((x - (1-theta) u)/theta) dF(u) + S(a) S(b)

    Each integrand stays smooth on its range.  ``x`` may be an array, in
    which case integrator quantiles are shared across its points;
    ``cache`` (a dict) extends that sharing across calls, see
    :func:`~invsub.numerics.stieltjes_integral`.
    """
    if not 0 < theta < 1:
        raise InvalidWeightsError(f"theta must lie in (0, 1), got {theta}")
    if d.support_lo < 0:
        raise ValueError(f"{d.spec} is not nonnegative")
    w1, w2 = theta, 1.0 - theta
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(xs.shape)
    if cache is None and xs.size > 1:
        cache = {}

    def half(xk, w_cond, w_other):
        lim = xk / (2.0 * w_cond)
        if lim < d.support_lo:
            return 0.0
        return stieltjes_integral(lambda t: d.sf((xk - w_cond * t) / w_other), d, -np.inf, lim,
                                  cache=cache)

    for k, xk in enumerate(xs):
        if xk < d.support_lo:
            out[k] = 1.0
            continue
        joint = float(d.sf(xk / (2.0 * w1))) * float(d.sf(xk / (2.0 * w2)))
        out[k] = min(1.0, half(xk, w1, w2) + half(xk, w2, w1) + joint)
    return float(out[0]) if np.ndim(x) == 0 else out


def _gap_verdict(xs, gap, g, tol, note=""):
    res = -np.asarray(gap)
    k = int(np.argmax(res))
    return Verdict.from_scan(float(res[k]), (float(xs[k]),), g, tol, note)


def check_dominance_exact2(d: Distribution, theta: float, g: GridSpec | None = None) -> DominanceReport:
    """Gap ``P(theta X1 + (1-theta) X2 > x) - S(x)`` on the grid; supported iff
    it never drops below ``-tol``."""
    g = g or DOMINANCE_GRID
    xs = g.xs()
    mix = mixture_survival_exact2(d, theta, xs, cache={})
    surv = np.asarray(d.sf(xs), dtype=float)
    gap = mix - surv
    return DominanceReport(d, WeightVector((theta, 1.0 - theta)), "exact2", xs, gap,
                           _gap_verdict(xs, gap, g, g.tol), mix, surv)


# ---------------------------------------------------------------------------
# any number of copies, simulation


def dkw_epsilon(n, alpha):
    """Half-width of the two-sided DKW band for ``n`` samples at level ``alpha``."""
    return float(np.sqrt(np.log(2.0 / alpha) / (2.0 * n)))


def mc_evaluation_points(d: Distribution, n_tail=25):
    """Quantiles 0.01, ..., 0.99 of ``d`` plus log-spaced points up to
    ``Q(1 - 1e-4)``; infinite points are dropped."""
    body = np.atleast_1d(d.quantile(np.arange(1, 100) / 100.0))
    top = float(d.quantile(1.0 - 1e-4))
    body_max = float(np.max(body[np.isfinite(body)])) if np.isfinite(body).any() else np.nan
    pts = [body]
    if np.isfinite(top) and np.isfinite(body_max) and body_max > 0 and top > body_max:
        pts.append(np.geomspace(body_max, top, n_tail))
    pts = np.concatenate(pts)
    return np.unique(pts[np.isfinite(pts)])


def _chunk_draws(d, weights, seed, chunk, size):
    """Draws for one chunk: ``X`` and the weighted sum of fresh copies."""
    rngs = [np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk, c)))
            for c in range(len(weights) + 1)]
    x = d.sample(size, rngs[0])
    mix = np.zeros(size)
    with np.errstate(invalid="ignore"):
        for wt, rng in zip(weights, rngs[1:]):
            mix += wt * d.sample(size, rng)
    return x, mix


def _empirical_sf(sorted_values, xs):
    n = sorted_values.size
    return (n - np.searchsorted(sorted_values, xs, side="right")) / n


def check_dominance_mc(d: Distribution, w, n_samples=100_000, seed=0, alpha=0.01,
                       g: GridSpec | None = None, workers=1, eval_points=None) -> DominanceReport:
    """Simulated gap with DKW bands: supported iff ``gap >= -2 eps`` everywhere.

    The sample is cut into chunks of ``MC_CHUNK`` draws; chunk ``c`` and
    copy ``j`` (``j = 0`` for ``X`` itself) use the stream
    ``SeedSequence(seed, spawn_key=(c, j))``, so the result does not depend
    on ``workers``.
    """
    w = _weights(w)
    if n_samples < 10_000:
        raise ValueError("n_samples must be at least 10000")
    g = g or DOMINANCE_GRID
    sizes = [min(MC_CHUNK, n_samples - s) for s in range(0, n_samples, MC_CHUNK)]

    def run(c):
        return _chunk_draws(d, w.theta, seed, c, sizes[c])

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(c) for c in range(len(sizes))]
    x = np.sort(np.concatenate([p[0] for p in parts]))
    mix = np.sort(np.concatenate([p[1] for p in parts]))

    xs = mc_evaluation_points(d) if eval_points is None else np.asarray(eval_points, dtype=float)
    s_x, s_mix = _empirical_sf(x, xs), _empirical_sf(mix, xs)
    gap = s_mix - s_x
    eps = dkw_epsilon(n_samples, alpha)
    verdict = _gap_verdict(xs, gap, g, 2.0 * eps, note="threshold is twice the DKW half-width")
    extra = {"inf_frequency": float(np.mean(np.isposinf(x)))}
    return DominanceReport(d, w, "monte_carlo", xs, gap, verdict, s_mix, s_x, band=eps,
                           n_samples=int(n_samples), seed=int(seed), alpha=float(alpha), extra=extra)


# ---------------------------------------------------------------------------
# truncated means


@dataclass(frozen=True)
class MeanDiagnostic:
    cutoffs: tuple
    means: tuple
    growth_per_decade: float
    label: str

    def to_dict(self):
        return {"cutoffs": list(self.cutoffs), "means": list(self.means),
                "growth_per_decade": self.growth_per_decade, "label": self.label}


def _integral_sf(d, lo, hi):
    """``int_lo^hi S(x) dx`` by adaptive quadrature in ``log x``."""
    def f(s):
        return float(d.sf(np.exp(s))) * np.exp(s)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, _ = integrate.quad(f, np.log(lo), np.log(hi), limit=200)
    return value


def mean_diagnostic(d: Distribution, cutoffs=None) -> MeanDiagnostic:
    """Truncated means ``m(c) = int_0^c S(x) dx`` and a finiteness label.

    ``appears_infinite`` when ``m`` still grows by more than 1% per decade
    at the largest cutoff, ``appears_finite`` below 0.1%, otherwise
    ``inconclusive``.  An atom at ``+inf`` means an infinite mean outright.
    """
    if d.support_lo < 0:
        raise ValueError(f"{d.spec} is not nonnegative")
    cutoffs = np.asarray(10.0 ** np.arange(2, 11) if cutoffs is None else cutoffs, dtype=float)
    if cutoffs.size < 2 or np.any(np.diff(cutoffs) <= 0) or cutoffs[0] <= 0:
        raise ValueError("cutoffs must be increasing positive reals (at least two)")
    start = 1e-12
    # decade breakpoints keep each quad call on a modest range
    edges = np.unique(np.concatenate([10.0 ** np.arange(-12, np.ceil(np.log10(cutoffs[-1])) + 1), cutoffs]))
    edges = edges[edges <= cutoffs[-1]]
    pieces = [_integral_sf(d, a, b) for a, b in zip(edges[:-1], edges[1:])]
    running = start * float(d.sf(0.0)) + np.concatenate([[0.0], np.cumsum(pieces)])
    means = np.interp(np.log(cutoffs), np.log(edges), running)
    decades = np.log10(cutoffs[-1] / cutoffs[-2])
    growth = float((means[-1] - means[-2]) / means[-2] / decades) if means[-2] > 0 else np.inf
    if d.atom_at_inf > 0 or growth > 0.01:
        label = "appears_infinite"
    elif growth <= 0.001:
        label = "appears_finite"
    else:
        label = "inconclusive"
    return MeanDiagnostic(tuple(cutoffs.tolist()), tuple(float(m) for m in means), growth, label)
