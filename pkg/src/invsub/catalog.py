"""Named distributions and the distribution-string mini-language.

Spec strings look like ``pareto``, ``oddslog:b=0.5``, ``burr:c=0.5,k=1.5``,
``table:path/to/file.csv`` or ``transform(pow:2,shifted-pareto)``.  The
grammar is documented in the README; :func:`parse_spec` is the single
entry point.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .distribution import Distribution, TransformSpec, make_transformed
from .errors import SpecError

__all__ = [
    "CatalogEntry",
    "CATALOG",
    "parse_spec",
    "parse_transform",
    "default_catalog",
    "pareto",
    "frechet",
    "cauchy",
    "abs_cauchy",
    "shifted_pareto",
    "odds_log",
    "ceil_geometric",
    "r_a",
    "v_dist",
    "exponential",
    "burr",
    "loglogistic",
    "gpd",
    "uniform",
    "table",
    "literal_r_a_cdf",
    "literal_v_cdf",
    "PARETO",
    "FRECHET",
    "CAUCHY",
]

_PI = np.pi
CEIL_GEOM_KMAX = 10**6


def _pos(x):
    return x > 0


# ---------------------------------------------------------------------------
# benchmarks


def pareto():
    """Pareto with shape 1: ``F(x) = 1 - 1/x`` on ``[1, inf)``."""
    return Distribution(
        "pareto",
        lambda x: np.where(x >= 1, 1.0 - 1.0 / x, 0.0),
        sf=lambda x: np.where(x >= 1, 1.0 / x, 1.0),
        quantile=lambda u: 1.0 / (1.0 - u),
        isf=lambda s: 1.0 / s,
        density=lambda x: np.where(x >= 1, 1.0 / x**2, 0.0),
        support=(1.0, np.inf),
    )


def frechet():
    """Frechet with shape 1: ``F(x) = exp(-1/x)`` on ``(0, inf)``."""
    return Distribution(
        "frechet",
        lambda x: np.where(_pos(x), np.exp(-1.0 / x), 0.0),
        sf=lambda x: np.where(_pos(x), -np.expm1(-1.0 / x), 1.0),
        quantile=lambda u: -1.0 / np.log(u),
        isf=lambda s: -1.0 / np.log1p(-s),
        density=lambda x: np.where(_pos(x), np.exp(-1.0 / x) / x**2, 0.0),
        support=(0.0, np.inf),
    )


def _cauchy_sf(x):
    return np.where(x > 0, np.arctan(1.0 / x) / _PI, 0.5 - np.arctan(x) / _PI)


def _cauchy_isf(s):
    return np.where(s < 0.5, 1.0 / np.tan(_PI * s), -1.0 / np.tan(_PI * (1.0 - s)))


def cauchy():
    """Standard Cauchy on the whole real line."""
    return Distribution(
        "cauchy",
        lambda x: _cauchy_sf(-x),
        sf=_cauchy_sf,
        quantile=lambda u: -_cauchy_isf(u),
        isf=_cauchy_isf,
        density=lambda x: 1.0 / (_PI * (1.0 + x**2)),
        support=(-np.inf, np.inf),
    )


def abs_cauchy():
    """Absolute value of a standard Cauchy variable."""
    def isf(s):
        return 1.0 / np.tan(0.5 * _PI * s)

    return Distribution(
        "abs-cauchy",
        lambda x: np.where(_pos(x), 2.0 / _PI * np.arctan(x), 0.0),
        sf=lambda x: np.where(_pos(x), 2.0 / _PI * np.arctan(1.0 / x), 1.0),
        quantile=lambda u: np.where(u <= 0.5, np.tan(0.5 * _PI * u), isf(1.0 - u)),
        isf=isf,
        density=lambda x: np.where(x >= 0, 2.0 / (_PI * (1.0 + x**2)), 0.0),
        support=(0.0, np.inf),
    )


def shifted_pareto():
    """``Z - 1`` for ``Z`` Pareto(1): ``F(x) = x / (x + 1)``."""
    return Distribution(
        "shifted-pareto",
        lambda x: np.where(_pos(x), 1.0 / (1.0 + 1.0 / x), 0.0),
        sf=lambda x: np.where(_pos(x), 1.0 / (1.0 + x), 1.0),
        quantile=lambda u: u / (1.0 - u),
        isf=lambda s: (1.0 - s) / s,
        density=lambda x: np.where(x >= 0, 1.0 / (1.0 + x) ** 2, 0.0),
        support=(0.0, np.inf),
    )


PARETO = pareto()
FRECHET = frechet()
CAUCHY = cauchy()


# ---------------------------------------------------------------------------
# examples and families


def odds_log(b=0.5):
    """Odds function ``x**b * log(1 + x)``, i.e. ``1 - F(x) = 1/(1 + x**b log(1+x))``."""
    if b < 0:
        raise SpecError(f"oddslog needs b >= 0, got {b}")

    def odds(x):
        return np.where(_pos(x), x**b * np.log1p(x), 0.0)

    def odds_prime(x):
        return b * x ** (b - 1.0) * np.log1p(x) + x**b / (1.0 + x)

    return Distribution(
        "oddslog",
        lambda x: 1.0 / (1.0 + 1.0 / odds(x)),
        sf=lambda x: 1.0 / (1.0 + odds(x)),
        density=lambda x: np.where(_pos(x), odds_prime(x) / (1.0 + odds(x)) ** 2, 0.0),
        support=(0.0, np.inf),
        params={"b": float(b)},
    )


def _jump_index(x, strict):
    """Smallest ``k >= 1`` with ``1.0/k <= x`` (``< x`` when ``strict``).

    Compared against the rounded jump points themselves so that the
    distribution function agrees with the jump list bit for bit.
    """
    below = np.less if strict else np.less_equal
    with np.errstate(all="ignore"):
        k = np.maximum(np.ceil(1.0 / x), 1.0)
        for _ in range(2):
            k = np.where(below(1.0 / k, x), k, k + 1.0)
            k = np.where((k > 1) & below(1.0 / (k - 1.0), x), k - 1.0, k)
    return k


def ceil_geometric(p=0.3, k_max=CEIL_GEOM_KMAX):
    """``F(x) = (1-p)**ceil(1/x)`` on ``(0, inf]`` with mass ``p`` at ``+inf``.

    Atoms of size ``p (1-p)**k`` sit at ``1/k``.  The jump list stops at
    ``k_max``; the remaining mass is added to the atom at ``1/k_max`` and
    underflowed atoms are dropped.
    """
    if not 0 < p < 1:
        raise SpecError(f"ceil-geom needs 0 < p < 1, got {p}")
    q = 1.0 - p

    def cdf(x):
        return np.where(_pos(x), q ** _jump_index(x, strict=False), 0.0)

    def cdf_left(x):
        return np.where(_pos(x), q ** _jump_index(x, strict=True), 0.0)

    def quantile(u):
        m = np.log(u) / np.log(q)
        return np.where(u >= q, np.inf, 1.0 / (np.ceil(m) - 1.0))

    def jumps():
        k = np.arange(1, k_max + 1, dtype=float)
        masses = p * q**k
        masses[-1] += q ** (k_max + 1)
        keep = masses > 0
        return 1.0 / k[keep], masses[keep]

    return Distribution(
        "ceil-geom", cdf, cdf_left=cdf_left, quantile=quantile,
        support=(0.0, np.inf), atom_at_inf=p, jumps=jumps, discrete=True,
        params={"p": float(p)},
    )


def literal_r_a_cdf(a):
    """The R_a formula exactly as printed, ``a**(-1/x) (1 + 1/(exp(2x) - 1))``.

    Not a distribution function for ``a`` in ``(0, 1)``; kept only so the
    validator can demonstrate the failure.
    """
    return lambda x: np.where(_pos(x), a ** (-1.0 / x) * (1.0 + 1.0 / np.expm1(2.0 * x)), 0.0)


def literal_v_cdf():
    """The V formula as printed, ``exp(-1/sqrt(x)) (1 + exp(2x - 1))``; exceeds 1."""
    return lambda x: np.where(_pos(x), np.exp(-1.0 / np.sqrt(x)) * (1.0 + np.exp(2.0 * x - 1.0)), 0.0)


def r_a(a=0.5, corrected=False):
    """Corrected R_a: ``F(x) = a**(1/x) / (1 - exp(-2x))`` for ``0 < a <= 0.7``.

    The printed formula has ``a**(-1/x)``, which exceeds one near zero; the
    sign-flipped exponent gives a valid distribution function whenever
    ``-log a`` exceeds ``max 2x**2/(exp(2x) - 1)`` (about 0.3245).
    """
    if not corrected:
        raise SpecError("the printed R_a formula is not a distribution function; "
                        "request the corrected variant with corrected=true")
    if not 0 < a <= 0.7:
        raise SpecError(f"r-a needs 0 < a <= 0.7, got {a}")
    c = -np.log(a)

    def cdf(x):
        return np.where(_pos(x), np.exp(-c / x) / -np.expm1(-2.0 * x), 0.0)

    def sf(x):
        return np.where(_pos(x), (-np.expm1(-c / x) - np.exp(-2.0 * x)) / -np.expm1(-2.0 * x), 1.0)

    def density(x):
        return np.where(_pos(x), cdf(x) * (c / x**2 - 2.0 / np.expm1(2.0 * x)), 0.0)

    return Distribution("r-a", cdf, sf=sf, density=density, support=(0.0, np.inf),
                        params={"a": float(a), "corrected": True})


def v_dist(corrected=False):
    """Corrected V: ``F(x) = exp(-1/sqrt(x)) (1 + exp(-x/2))``.

    No single sign change of the printed formula gives a distribution that
    is InvSub yet fails the super-Cauchy test, so the perturbation term is
    replaced by ``exp(-x/2)``; this keeps the ``exp(-1/sqrt(x))`` body and
    makes the Cauchy composition neither concave nor convex.
    """
    if not corrected:
        raise SpecError("the printed V formula is not a distribution function; "
                        "request the corrected variant with corrected=true")

    def body(x):
        return np.exp(-1.0 / np.sqrt(x))

    def cdf(x):
        return np.where(_pos(x), body(x) * (1.0 + np.exp(-0.5 * x)), 0.0)

    def sf(x):
        return np.where(_pos(x), -np.expm1(-1.0 / np.sqrt(x)) - body(x) * np.exp(-0.5 * x), 1.0)

    def density(x):
        e = np.exp(-0.5 * x)
        return np.where(_pos(x), body(x) * (0.5 * x**-1.5 * (1.0 + e) - 0.5 * e), 0.0)

    return Distribution("v-dist", cdf, sf=sf, density=density, support=(0.0, np.inf),
                        params={"corrected": True})


def exponential(rate=1.0):
    if rate <= 0:
        raise SpecError(f"exp needs rate > 0, got {rate}")
    return Distribution(
        "exp",
        lambda x: np.where(_pos(x), -np.expm1(-rate * x), 0.0),
        sf=lambda x: np.where(_pos(x), np.exp(-rate * x), 1.0),
        quantile=lambda u: -np.log1p(-u) / rate,
        isf=lambda s: -np.log(s) / rate,
        density=lambda x: np.where(x >= 0, rate * np.exp(-rate * x), 0.0),
        support=(0.0, np.inf),
        params={"rate": float(rate)},
    )


def burr(c=0.5, k=1.5):
    """Burr XII: ``1 - F(x) = (1 + x**c)**(-k)``."""
    if c <= 0 or k <= 0:
        raise SpecError(f"burr needs c, k > 0, got c={c}, k={k}")

    def log_sf(x):
        return -k * np.log1p(x**c)

    return Distribution(
        "burr",
        lambda x: np.where(_pos(x), -np.expm1(log_sf(x)), 0.0),
        sf=lambda x: np.where(_pos(x), np.exp(log_sf(x)), 1.0),
        quantile=lambda u: np.expm1(-np.log1p(-u) / k) ** (1.0 / c),
        isf=lambda s: np.expm1(-np.log(s) / k) ** (1.0 / c),
        density=lambda x: np.where(_pos(x), k * c * x ** (c - 1.0) * np.exp(log_sf(x)) / (1.0 + x**c), 0.0),
        support=(0.0, np.inf),
        params={"c": float(c), "k": float(k)},
    )


def loglogistic(a=0.5):
    if a <= 0:
        raise SpecError(f"loglogistic needs a > 0, got {a}")
    return Distribution(
        "loglogistic",
        lambda x: np.where(_pos(x), 1.0 / (1.0 + x**-a), 0.0),
        sf=lambda x: np.where(_pos(x), 1.0 / (1.0 + x**a), 1.0),
        quantile=lambda u: (u / (1.0 - u)) ** (1.0 / a),
        isf=lambda s: ((1.0 - s) / s) ** (1.0 / a),
        density=lambda x: np.where(_pos(x), a * x ** (a - 1.0) / (1.0 + x**a) ** 2, 0.0),
        support=(0.0, np.inf),
        params={"a": float(a)},
    )


def gpd(xi=2.0):
    """Generalised Pareto with shape ``xi > 0`` and unit scale."""
    if xi <= 0:
        raise SpecError(f"gpd needs xi > 0, got {xi}")

    def log_sf(x):
        return -np.log1p(xi * x) / xi

    return Distribution(
        "gpd",
        lambda x: np.where(_pos(x), -np.expm1(log_sf(x)), 0.0),
        sf=lambda x: np.where(_pos(x), np.exp(log_sf(x)), 1.0),
        quantile=lambda u: np.expm1(-xi * np.log1p(-u)) / xi,
        isf=lambda s: np.expm1(-xi * np.log(s)) / xi,
        density=lambda x: np.where(x >= 0, np.exp(log_sf(x)) / (1.0 + xi * x), 0.0),
        support=(0.0, np.inf),
        params={"xi": float(xi)},
    )


def uniform(a=0.0, b=1.0):
    if not a < b:
        raise SpecError(f"uniform needs a < b, got a={a}, b={b}")
    w = b - a
    return Distribution(
        "uniform",
        lambda x: np.clip((x - a) / w, 0.0, 1.0),
        sf=lambda x: np.clip((b - x) / w, 0.0, 1.0),
        quantile=lambda u: a + w * u,
        isf=lambda s: b - w * s,
        density=lambda x: np.where((x >= a) & (x <= b), 1.0 / w, 0.0),
        support=(a, b),
        params={"a": float(a), "b": float(b)},
    )


def table(path):
    """Piecewise-linear distribution function read from a CSV with header ``x,F``.

    ``F`` is zero left of the first row (an atom of size ``F_0`` sits at
    ``x_0`` when ``F_0 > 0``) and constant after the last row, the missing
    mass ``1 - F_last`` being placed at ``+inf``.
    """
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        header = [h.strip() for h in rows[0]]
        if header != ["x", "F"]:
            raise ValueError(f"header must be 'x,F', got {','.join(header)!r}")
        data = np.array([[float(v) for v in row] for row in rows[1:] if row], dtype=float)
    except (OSError, ValueError, IndexError) as exc:
        raise SpecError(f"cannot read distribution table {path!r}: {exc}") from exc
    if data.ndim != 2 or data.shape[0] < 2 or data.shape[1] != 2:
        raise SpecError(f"cannot read distribution table {path!r}: need at least two x,F rows")
    xs, fs = data[:, 0], data[:, 1]
    if np.any(np.diff(xs) <= 0) or np.any(np.diff(fs) <= 0):
        raise SpecError(f"distribution table {path!r}: x and F must be strictly increasing")
    if fs[0] < 0 or fs[-1] > 1:
        raise SpecError(f"distribution table {path!r}: F values must lie in [0, 1]")
    x0, f0, f_last = xs[0], fs[0], fs[-1]

    def cdf(x):
        return np.where(x < x0, 0.0, np.interp(x, xs, fs))

    def cdf_left(x):
        return np.where(x <= x0, 0.0, np.interp(x, xs, fs))

    def quantile(u):
        inner = np.interp(u, fs, xs)
        return np.where(u >= f_last, np.inf, np.where(u < f0, x0, inner))

    jumps = (np.array([x0]), np.array([f0])) if f0 > 0 else None
    return Distribution("table", cdf, cdf_left=cdf_left if f0 > 0 else None, quantile=quantile,
                        support=(x0, xs[-1]), atom_at_inf=1.0 - f_last, jumps=jumps,
                        params={"path": str(path)})


# ---------------------------------------------------------------------------
# registry and parser


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    build: object
    params: dict = field(default_factory=dict)
    summary: str = ""

    def make(self, **overrides):
        unknown = set(overrides) - set(self.params)
        if unknown:
            raise SpecError(f"unknown parameter(s) for {self.name}: {', '.join(sorted(unknown))}")
        kwargs = {**self.params, **overrides}
        return self.build(**kwargs)


CATALOG = {
    e.name: e for e in [
        CatalogEntry("pareto", pareto, {}, "Pareto, shape 1, support [1, inf)"),
        CatalogEntry("frechet", frechet, {}, "Frechet, shape 1"),
        CatalogEntry("cauchy", cauchy, {}, "standard Cauchy on the real line"),
        CatalogEntry("abs-cauchy", abs_cauchy, {}, "absolute value of a standard Cauchy"),
        CatalogEntry("shifted-pareto", shifted_pareto, {}, "Pareto(1) minus one, F(x) = x/(x+1)"),
        CatalogEntry("oddslog", odds_log, {"b": 0.5}, "odds function x^b log(1+x)"),
        CatalogEntry("ceil-geom", ceil_geometric, {"p": 0.3}, "(1-p)^ceil(1/x), mass p at +inf"),
        CatalogEntry("r-a", r_a, {"a": 0.5, "corrected": False}, "corrected R_a (needs corrected=true)"),
        CatalogEntry("v-dist", v_dist, {"corrected": False}, "corrected V (needs corrected=true)"),
        CatalogEntry("exp", exponential, {"rate": 1.0}, "exponential (finite-mean control)"),
        CatalogEntry("burr", burr, {"c": 0.5, "k": 1.5}, "Burr XII"),
        CatalogEntry("loglogistic", loglogistic, {"a": 0.5}, "log-logistic"),
        CatalogEntry("gpd", gpd, {"xi": 2.0}, "generalised Pareto, unit scale"),
        CatalogEntry("uniform", uniform, {"a": 0.0, "b": 1.0}, "uniform (finite-mean control)"),
    ]
}

DEFAULT_SPECS = (
    "pareto", "frechet", "cauchy", "abs-cauchy", "shifted-pareto", "oddslog:b=0.5",
    "ceil-geom:p=0.3", "r-a:a=0.5,corrected=true", "v-dist:corrected=true", "exp:rate=1",
    "burr:c=0.5,k=1.5", "loglogistic:a=0.5", "gpd:xi=2", "uniform:a=0,b=1",
)


def default_catalog():
    """One distribution per catalog entry, at the default parameters."""
    return [parse_spec(s) for s in DEFAULT_SPECS]


def _parse_value(key, text):
    low = text.strip().lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return float(low)
    except ValueError:
        raise SpecError(f"bad value for {key}: {text!r}") from None


def _parse_params(argstr):
    params = {}
    if not argstr.strip():
        return params
    for item in argstr.split(","):
        key, eq, value = item.partition("=")
        if not eq or not key.strip():
            raise SpecError(f"expected key=value, got {item!r}")
        params[key.strip()] = _parse_value(key.strip(), value)
    return params


def _split_top(text):
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]


_H_ARITY = {"pow": 1, "expm1": 0, "affine": 2}


def parse_transform(text):
    """Build a :class:`TransformSpec` from ``pow:k``, ``expm1`` or ``affine:a,b``."""
    kind, _, arg = text.partition(":")
    kind = kind.strip()
    if kind not in _H_ARITY:
        raise SpecError(f"unknown transform {kind!r}; expected one of pow:k, expm1, affine:a,b")
    try:
        args = [float(v) for v in arg.split(",")] if arg.strip() else []
    except ValueError:
        raise SpecError(f"bad transform arguments in {text!r}") from None
    if len(args) != _H_ARITY[kind]:
        raise SpecError(f"transform {kind} takes {_H_ARITY[kind]} argument(s), got {text!r}")
    if kind == "pow":
        (k,) = args
        if k <= 0:
            raise SpecError("pow:k needs k > 0")

        def inv(y, k=k):
            return np.where(y >= 0, np.abs(y) ** (1.0 / k), -np.inf)

        return TransformSpec("star_shaped" if k >= 1 else "custom", lambda x, k=k: x**k, inv,
                             lambda x, k=k: k * x ** (k - 1.0), name=f"pow:{_num(k)}")
    if kind == "expm1":
        return TransformSpec("star_shaped", np.expm1,
                             lambda y: np.where(y >= 0, np.log1p(np.maximum(y, 0.0)), -np.inf),
                             np.exp, name="expm1")
    a, b = args
    if a <= 0:
        raise SpecError("affine:a,b needs a > 0")
    return TransformSpec("star_shaped" if b == 0 else "increasing_convex",
                         lambda x: a * x + b, lambda y: (y - b) / a, lambda x: np.full_like(x, a),
                         name=f"affine:{_num(a)},{_num(b)}", domain_lo=-np.inf)


def _num(v):
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def parse_spec(text) -> Distribution:
    """Build a distribution from a spec string (see module docstring)."""
    text = text.strip()
    if text.startswith("transform(") and text.endswith(")"):
        parts = _split_top(text[len("transform("):-1])
        head = parts[0].partition(":")[0].strip()
        arity = _H_ARITY.get(head)
        if arity is None:
            raise SpecError(f"unknown transform {head!r} in {text!r}")
        n_tokens = max(1, arity)
        if len(parts) <= n_tokens:
            raise SpecError(f"transform needs a distribution spec: {text!r}")
        h_spec = ",".join(parts[:n_tokens])
        base = parse_spec(",".join(parts[n_tokens:]))
        return make_transformed(base, parse_transform(h_spec))
    name, _, argstr = text.partition(":")
    name = name.strip()
    if name == "table":
        if not argstr:
            raise SpecError("table needs a path: table:<path>")
        return table(argstr)
    entry = CATALOG.get(name)
    if entry is None:
        raise SpecError(f"unknown distribution {name!r}; known: {', '.join(sorted(CATALOG))}, table")
    return entry.make(**_parse_params(argstr))
