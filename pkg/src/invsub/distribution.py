"""The distribution abstraction, validity checking, transforms and sampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidDistributionError, InvalidTransformError
from .numerics import GridSpec, Verdict, check_convex, check_star_shaped

__all__ = [
    "Distribution",
    "TransformSpec",
    "validate_distribution",
    "make_transformed",
    "sample",
    "generalized_inverse",
    "quantile_composition",
]

_EPS = np.finfo(float).eps
_BIG = 1e300


def _as_array(x):
    return np.asarray(x, dtype=float)


def _out(value, like):
    value = np.asarray(value, dtype=float)
    return float(value) if np.ndim(like) == 0 else value


def generalized_inverse(fn, target, lo=-np.inf, hi=np.inf, iterations=200):
    """``sup{x in [lo, hi] : fn(x) <= target}`` for increasing ``fn``.

    Vectorised bisection in the ``asinh`` coordinate, which behaves like a
    log scale far from the origin and is linear near it, so both tails and
    tiny quantiles are resolved to close to machine precision.
    """
    scalar = np.ndim(target) == 0
    target = np.atleast_1d(_as_array(target))
    y_lo = np.arcsinh(max(lo, -_BIG))
    y_hi = np.arcsinh(min(hi, _BIG))
    a = np.full(target.shape, y_lo)
    b = np.full(target.shape, y_hi)
    with np.errstate(all="ignore"):
        for _ in range(iterations):
            m = 0.5 * (a + b)
            ok = _as_array(fn(np.sinh(m))) <= target
            a = np.where(ok, m, a)
            b = np.where(ok, b, m)
            xa, xb = np.sinh(a), np.sinh(b)
            if np.all(xb - xa <= 2 * _EPS * np.maximum(np.abs(xa), np.abs(xb)) + 1e-300):
                break
        x = np.sinh(0.5 * (a + b))
    return float(x[0]) if scalar else x


class Distribution:
    """Univariate distribution described by its distribution function.

    Only ``cdf`` is required.  The survival function, left limits,
    quantile (generalised inverse ``sup{x : F(x) <= u}``) and inverse
    survival function fall back to generic constructions when not given;
    closed forms should be supplied whenever available since the
    classifiers evaluate compositions deep in both tails.

    ``atom_at_inf`` is the probability that the variable equals ``+inf``;
    then ``F(x) <= 1 - atom_at_inf`` for every finite ``x`` and
    ``quantile(u)`` is ``+inf`` for ``u >= 1 - atom_at_inf``.

    ``jumps`` lists atoms at finite points as ``(points, masses)`` (or a
    zero-argument callable producing them lazily).  Set ``discrete=True``
    when the atoms carry all the finite mass.
    """

    __slots__ = ("name", "params", "support_lo", "support_hi", "atom_at_inf", "is_discrete",
                 "_cdf", "_sf", "_cdf_left", "_quantile", "_isf", "_density", "_jumps")

    def __init__(self, name, cdf, *, sf=None, cdf_left=None, quantile=None, isf=None,
                 support=(-np.inf, np.inf), atom_at_inf=0.0, density=None, jumps=None,
                 discrete=False, params=None):
        if not 0.0 <= atom_at_inf < 1.0:
            raise InvalidDistributionError(f"atom_at_inf must lie in [0, 1), got {atom_at_inf}")
        self.name = name
        self.params = dict(params or {})
        self.support_lo, self.support_hi = float(support[0]), float(support[1])
        self.atom_at_inf = float(atom_at_inf)
        self.is_discrete = bool(discrete)
        self._cdf, self._sf, self._cdf_left = cdf, sf, cdf_left
        self._quantile, self._isf = quantile, isf
        self._density = density
        self._jumps = jumps

    def __setattr__(self, key, value):
        if hasattr(self, "_jumps") and key != "_jumps":
            raise AttributeError("Distribution objects are immutable")
        object.__setattr__(self, key, value)

    def __repr__(self):
        return f"Distribution({self.spec!r})"

    @property
    def spec(self):
        """Spec string in the catalog mini-language."""
        if not self.params:
            return self.name
        if self.name == "transform":
            return f"transform({self.params['h']},{self.params['base']})"
        if self.name == "table":
            return f"table:{self.params['path']}"
        args = ",".join(f"{k}={_fmt(v)}" for k, v in self.params.items())
        return f"{self.name}:{args}"

    def to_dict(self):
        return {"name": self.name, "params": {k: _plain(v) for k, v in self.params.items()}}

    # -- distribution functions ------------------------------------------

    def cdf(self, x):
        xa = _as_array(x)
        with np.errstate(all="ignore"):
            return _out(self._cdf(xa), x)

    def sf(self, x):
        xa = _as_array(x)
        with np.errstate(all="ignore"):
            value = self._sf(xa) if self._sf is not None else 1.0 - _as_array(self._cdf(xa))
        return _out(value, x)

    def cdf_left(self, x):
        """Left limit ``P(X < x)``; equals ``cdf`` for continuous laws."""
        if self._cdf_left is None:
            return self.cdf(x)
        xa = _as_array(x)
        with np.errstate(all="ignore"):
            return _out(self._cdf_left(xa), x)

    def odds(self, x):
        xa = _as_array(x)
        with np.errstate(all="ignore"):
            return _out(_as_array(self.cdf(xa)) / _as_array(self.sf(xa)), x)

    def quantile(self, u):
        ua = _as_array(u)
        if self._quantile is not None:
            with np.errstate(all="ignore"):
                value = _as_array(self._quantile(ua))
        else:
            value = self._generic_quantile(ua)
        return _out(value, u)

    def isf(self, s):
        """Inverse survival function, ``quantile(1 - s)`` without cancellation."""
        sa = _as_array(s)
        if self._isf is not None:
            with np.errstate(all="ignore"):
                return _out(self._isf(sa), s)
        if self._quantile is not None:
            return self.quantile(1.0 - sa) if np.ndim(s) else float(self.quantile(1.0 - float(s)))
        flat = np.atleast_1d(sa)
        out = np.full(flat.shape, np.nan)
        inf_mask = flat <= self.atom_at_inf
        out[inf_mask] = np.inf
        ok = (flat > self.atom_at_inf) & (flat <= 1)
        if ok.any():
            out[ok] = generalized_inverse(lambda x: -_as_array(self.sf(x)), -flat[ok],
                                          self.support_lo, self.support_hi)
        return _out(out.reshape(np.shape(sa)), s)

    def _generic_quantile(self, ua):
        flat = np.atleast_1d(ua)
        out = np.full(flat.shape, np.nan)
        top = 1.0 - self.atom_at_inf
        out[(flat >= top) & (flat <= 1)] = np.inf
        out[flat == 0] = self.support_lo
        ok = (flat > 0) & (flat < top)
        if ok.any():
            out[ok] = generalized_inverse(self._cdf, flat[ok], self.support_lo, self.support_hi)
        return out.reshape(np.shape(ua))

    @property
    def has_density(self):
        return self._density is not None

    def density(self, x):
        if self._density is None:
            raise AttributeError(f"{self.spec} has no density")
        xa = _as_array(x)
        with np.errstate(all="ignore"):
            return _out(self._density(xa), x)

    def hazard(self, x):
        """Hazard rate ``f(x) / (1 - F(x))``."""
        xa = _as_array(x)
        with np.errstate(all="ignore"):
            return _out(_as_array(self.density(xa)) / _as_array(self.sf(xa)), x)

    @property
    def jumps(self):
        if callable(self._jumps):
            object.__setattr__(self, "_jumps", self._jumps())
        return self._jumps

    @property
    def is_continuous(self):
        return self._jumps is None

    def sample(self, n, seed=None):
        return sample(self, n, seed)


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float) and value.is_integer():
        return repr(value)
    return str(value)


def _plain(value):
    return value if isinstance(value, (bool, str)) else float(value)


def quantile_composition(right: Distribution, left: Distribution, x, clip=0.0):
    """``right.quantile(left.cdf(x))`` evaluated without cancellation.

    Upper-half probabilities go through ``right.isf(left.sf(x))``.  With
    ``clip > 0`` the probability is held inside ``[clip, 1 - clip]``.
    """
    x = _as_array(x)
    u = np.atleast_1d(_as_array(left.cdf(x)))
    s = np.atleast_1d(_as_array(left.sf(x)))
    if clip > 0:
        u, s = np.clip(u, clip, 1.0 - clip), np.clip(s, clip, 1.0 - clip)
    low = u < 0.5
    out = np.empty(u.shape)
    if low.any():
        out[low] = right.quantile(u[low])
    if (~low).any():
        out[~low] = right.isf(s[~low])
    return out.reshape(np.shape(x))


# ---------------------------------------------------------------------------
# validation


def _validation_points(d, g):
    xs = g.xs()
    if d.support_lo < 0:
        xs = np.concatenate([-xs[::-1], [0.0], xs])
    return xs


def _limit(fn, end):
    value = float(fn(end))
    return value if np.isfinite(value) else float(fn(np.copysign(_BIG, end)))


def validate_distribution(d: Distribution, g: GridSpec | None = None) -> Verdict:
    """Check the distribution-function axioms on a grid.

    Conditions scanned (violation-positive residual, worst one reported):
    values in ``[0, 1]``, monotonicity, limits ``0`` and ``1 - atom_at_inf``,
    ``cdf_left <= cdf`` and the quantile round trip ``|F(Q(u)) - u|`` at
    continuity points.  Values that overflow to ``+inf`` count as range
    violations; NaN or ``-inf`` raise :class:`InvalidDistributionError`.
    """
    g = g or GridSpec()
    tol = g.tol
    xs = _validation_points(d, g)
    F = np.atleast_1d(_as_array(d.cdf(xs)))
    FL = np.atleast_1d(_as_array(d.cdf_left(xs)))
    for arr in (F, FL):
        bad = np.isnan(arr) | (arr == -np.inf)
        if bad.any():
            raise InvalidDistributionError("non-finite distribution function value",
                                           float(xs[np.flatnonzero(bad)[0]]))

    checks = []  # (residual, witness, label)

    def worst_of(res, where, label):
        k = int(np.argmax(res))
        checks.append((float(res[k]), (float(where[k]),), label))

    with np.errstate(all="ignore"):
        worst_of(np.maximum(-F, F - 1.0), xs, "range")
        worst_of(np.nan_to_num(F[:-1] - F[1:], nan=np.inf), xs[1:], "monotone")
        worst_of(FL - F, xs, "left_limit")

    # limits: evaluate at the infinite end itself when the formula allows it
    lo = d.support_lo if np.isfinite(d.support_lo) else -np.inf
    f_lo = float(d.cdf_left(lo)) if np.isfinite(lo) else _limit(d.cdf, -np.inf)
    f_hi = _limit(d.cdf, np.inf) if d.atom_at_inf == 0 else float(d.cdf(_BIG))
    checks.append((abs(f_lo), (max(lo, -_BIG),), "lower_limit"))
    checks.append((abs(f_hi - (1.0 - d.atom_at_inf)), (_BIG,), "upper_limit"))

    u = g.thetas()
    u = u[u < 1.0 - d.atom_at_inf - tol]
    if u.size:
        q = np.atleast_1d(_as_array(d.quantile(u)))
        fin = np.isfinite(q)
        if fin.any():
            fq = np.atleast_1d(_as_array(d.cdf(q[fin])))
            fql = np.atleast_1d(_as_array(d.cdf_left(q[fin])))
            with np.errstate(invalid="ignore"):
                cont = (fq - fql) <= tol
            if cont.any():
                worst_of(np.abs(fq[cont] - u[fin][cont]), u[fin][cont], "quantile_roundtrip")

    worst, witness, label = max(checks, key=lambda c: c[0])
    return Verdict.from_scan(worst, witness, g, tol, note=label)


# ---------------------------------------------------------------------------
# transforms


@dataclass(frozen=True)
class TransformSpec:
    """Increasing transform ``h`` applied to a random variable.

    ``kind`` is one of ``"star_shaped"``, ``"increasing_convex"`` or
    ``"custom"``; it decides which shape checks ``make_transformed`` runs.
    ``domain_lo`` is the left end of the domain of ``h`` (``0`` for the
    star-shaped and convex kinds used on nonnegative variables).
    """

    kind: str
    h: object
    h_inverse: object = None
    dh: object = None
    name: str = "h"
    domain_lo: float = 0.0

    def __post_init__(self):
        if self.kind not in ("star_shaped", "increasing_convex", "custom"):
            raise InvalidTransformError(f"unknown transform kind {self.kind!r}")

    def inverse(self, y):
        y = _as_array(y)
        if self.h_inverse is not None:
            with np.errstate(all="ignore"):
                return _as_array(self.h_inverse(y))
        h0 = float(self.h(np.array([self.domain_lo]))[0])
        flat = np.atleast_1d(y)
        out = np.full(flat.shape, -np.inf)
        ok = flat >= h0
        if ok.any():
            out[ok] = generalized_inverse(self.h, flat[ok], self.domain_lo, np.inf)
        return out.reshape(np.shape(y))


_TRANSFORM_GRID = GridSpec(x_lo=1e-6, x_hi=1e6, n_x=401, tol=1e-9)


def _validate_transform(d, t, g):
    xs = g.xs()
    if d.support_lo < 0 and t.domain_lo < 0:
        xs = np.concatenate([-xs[::-1], [0.0], xs])
    with np.errstate(all="ignore"):
        hx = _as_array(t.h(xs))
    if not np.all(np.isfinite(hx)):
        keep = np.isfinite(hx)
        xs, hx = xs[keep], hx[keep]
    drops = np.flatnonzero(hx[1:] < hx[:-1])
    if drops.size:
        raise InvalidTransformError(f"transform {t.name} is not increasing near x={xs[drops[0] + 1]}")
    if t.kind == "star_shaped":
        xs_pos = xs[xs > 0]
        verdict = check_star_shaped(t.h, g, xs=xs_pos)
        if verdict.violated:
            raise InvalidTransformError(f"transform {t.name} is not star-shaped (witness {verdict.witness})")
    elif t.kind == "increasing_convex":
        verdict = check_convex(t.h, g.replace(n_x=201), xs=np.geomspace(g.x_lo, 1e2, 201))
        if verdict.violated:
            raise InvalidTransformError(f"transform {t.name} is not convex (witness {verdict.witness})")


def make_transformed(d: Distribution, t: TransformSpec, g: GridSpec | None = None) -> Distribution:
    """Distribution of ``h(X)``: ``F_{h(X)}(y) = F_X(h^{-1}(y))``."""
    g = g or _TRANSFORM_GRID
    if d.support_lo < t.domain_lo:
        raise InvalidTransformError(
            f"transform {t.name} is defined on [{t.domain_lo}, inf) but {d.spec} has support "
            f"starting at {d.support_lo}")
    _validate_transform(d, t, g)
    h, hinv = t.h, t.inverse

    def h_ext(x):
        x = _as_array(x)
        with np.errstate(all="ignore"):
            return np.where(np.isposinf(x), np.inf, np.where(np.isneginf(x), -np.inf, h(x)))

    density = None
    if d.has_density and t.dh is not None:
        def density(y):
            x = hinv(y)
            return np.where(np.isfinite(x), d.density(x) / _as_array(t.dh(x)), 0.0)

    jumps = None
    if not d.is_continuous:
        def jumps():
            pts, masses = d.jumps
            return h_ext(pts), masses

    lo = float(h_ext(np.array([d.support_lo]))[0]) if np.isfinite(d.support_lo) else -np.inf
    hi = float(h_ext(np.array([d.support_hi]))[0])
    return Distribution(
        "transform",
        lambda y: d.cdf(hinv(y)),
        sf=lambda y: d.sf(hinv(y)),
        cdf_left=None if d.is_continuous else (lambda y: d.cdf_left(hinv(y))),
        quantile=lambda u: h_ext(d.quantile(u)),
        isf=lambda s: h_ext(d.isf(s)),
        support=(lo, hi),
        atom_at_inf=d.atom_at_inf,
        density=density,
        jumps=jumps,
        discrete=d.is_discrete,
        params={"h": t.name, "base": d.spec},
    )


# ---------------------------------------------------------------------------
# sampling


def _uniforms(rng, n):
    u = rng.random(n)
    u[u == 0.0] = np.nextafter(0.0, 1.0)
    return u


def sample(d: Distribution, n: int, seed=None):
    """Inverse-transform sample of size ``n``; ``+inf`` appears with
    frequency ``d.atom_at_inf``.  ``seed`` may be an int, a
    ``numpy.random.SeedSequence`` or a ``Generator``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return np.atleast_1d(_as_array(d.quantile(_uniforms(rng, int(n)))))

