"""Grid-based shape checks and Riemann-Stieltjes quadrature.

Every check here scans a function on a finite lattice and returns a
:class:`Verdict`.  A ``supported`` verdict means "no violation larger than
the tolerance was found on the grid"; it is never a proof.

Residuals follow one sign convention throughout: positive means the
property is violated at that point.  Shape residuals (subadditivity,
midpoint concavity, star-shapedness) are divided by
``max(1, |values involved|)`` before being compared with ``tol``, so the
tolerance acts absolutely on O(1) values and relatively on large ones.
"""

from __future__ import annotations

import enum
import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import qmc

from .errors import AccuracyError, EvaluationError

__all__ = [
    "Status",
    "GridSpec",
    "Verdict",
    "check_subadditive",
    "scan_pairs",
    "subadditivity_residual",
    "check_concave",
    "check_convex",
    "check_concave_convex",
    "midpoint_residual",
    "check_star_shaped",
    "check_anti_star_shaped",
    "check_increasing",
    "stieltjes_integral",
    "dumps",
]

_BLOCK = 1 << 18


class Status(str, enum.Enum):
    SUPPORTED = "supported"
    VIOLATED = "violated"
    NOT_APPLICABLE = "not_applicable"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class GridSpec:
    """Evaluation lattice and tolerance shared by every numerical verdict.

    ``theta_points`` equally spaced weights ``i / (theta_points + 1)`` are
    used for the two-copy inequalities; ``pair_budget`` caps the number of
    ``(x, y)`` pairs visited by two-variable scans.
    """

    x_lo: float = 1e-6
    x_hi: float = 1e6
    n_x: int = 2001
    spacing: str = "log"
    theta_points: int = 199
    tol: float = 1e-9
    pair_budget: int = 2_100_000

    def __post_init__(self):
        if not (0 < self.x_lo < self.x_hi) or not np.isfinite(self.x_hi):
            raise ValueError(f"need 0 < x_lo < x_hi < inf, got {self.x_lo}, {self.x_hi}")
        if self.n_x < 2:
            raise ValueError("n_x must be at least 2")
        if self.spacing not in ("log", "linear"):
            raise ValueError(f"spacing must be 'log' or 'linear', not {self.spacing!r}")
        if self.theta_points < 1:
            raise ValueError("theta_points must be at least 1")
        if self.tol < 0:
            raise ValueError("tol must be nonnegative")
        if self.pair_budget < 1:
            raise ValueError("pair_budget must be positive")

    def xs(self):
        if self.spacing == "log":
            return np.geomspace(self.x_lo, self.x_hi, self.n_x)
        return np.linspace(self.x_lo, self.x_hi, self.n_x)

    def thetas(self):
        k = self.theta_points
        return np.arange(1, k + 1) / (k + 1)

    def replace(self, **changes):
        values = asdict(self)
        values.update(changes)
        return GridSpec(**values)

    def digest(self):
        """Stable 32-bit hash used to seed quasi-random pair sampling."""
        text = repr(tuple(asdict(self).values())).encode()
        return int.from_bytes(hashlib.sha256(text).digest()[:4], "little")

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class Verdict:
    status: Status
    worst_residual: float
    witness: tuple | None = None
    grid: GridSpec | None = field(default=None, compare=False)
    note: str = ""

    @property
    def supported(self):
        return self.status is Status.SUPPORTED

    @property
    def violated(self):
        return self.status is Status.VIOLATED

    @classmethod
    def not_applicable(cls, note, grid=None):
        return cls(Status.NOT_APPLICABLE, float("nan"), None, grid, note)

    @classmethod
    def from_scan(cls, worst, witness, grid, tol, note=""):
        status = Status.VIOLATED if worst > tol else Status.SUPPORTED
        return cls(status, float(worst), witness, grid, note)

    def to_dict(self):
        return {
            "status": self.status.value,
            "worst_residual": _jsonable(self.worst_residual),
            "witness": None if self.witness is None else [_jsonable(w) for w in self.witness],
        }


def _jsonable(value):
    value = float(value)
    if np.isfinite(value):
        return value
    if np.isnan(value):
        return None
    return "inf" if value > 0 else "-inf"


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (bool, str)) or obj is None:
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _jsonable(obj)
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(data):
    """Deterministic JSON text: insertion key order, ``inf`` as a string, NaN as null."""
    if hasattr(data, "to_dict"):
        data = data.to_dict()
    return json.dumps(_clean(data), indent=2, allow_nan=False) + "\n"


# ---------------------------------------------------------------------------
# scanning machinery


def _pair_blocks(n, budget, seed, diagonal):
    """Yield index arrays ``(i, j)`` with ``i <= j`` (``i < j`` without diagonal).

    The full upper triangle is used when it fits in ``budget``; otherwise a
    scrambled Sobol sequence seeded by ``seed`` picks ``budget`` pairs.
    Block boundaries depend only on ``n`` so reductions are reproducible.
    """
    off = 0 if diagonal else 1
    total = n * (n + 1) // 2 if diagonal else n * (n - 1) // 2
    if total <= budget:
        rows_per_block = max(1, _BLOCK // n)
        cols = np.arange(n)
        for start in range(0, n, rows_per_block):
            rows = np.arange(start, min(n, start + rows_per_block))
            i, j = np.meshgrid(rows, cols, indexing="ij")
            keep = j >= i + off
            if keep.any():
                yield i[keep], j[keep]
        return
    sampler = qmc.Sobol(d=2, scramble=True, seed=seed)
    pts = sampler.random_base2(int(np.ceil(np.log2(budget))))[:budget]
    idx = np.minimum((pts * n).astype(np.int64), n - 1)
    i, j = np.minimum(idx[:, 0], idx[:, 1]), np.maximum(idx[:, 0], idx[:, 1])
    if not diagonal:
        keep = i < j
        i, j = i[keep], j[keep]
    for s in range(0, i.size, _BLOCK):
        yield i[s:s + _BLOCK], j[s:s + _BLOCK]


def _reduce(results):
    """Max-reduce ``(worst, witness)`` pairs, first occurrence wins ties."""
    worst, witness = -np.inf, None
    for w, wit in results:
        if w > worst:
            worst, witness = w, wit
    return worst, witness


def _run_blocks(fn, blocks, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return _reduce(pool.map(fn, blocks))
    return _reduce(map(fn, blocks))


def _evaluate(v, x):
    with np.errstate(all="ignore"):
        out = np.asarray(v(x), dtype=float)
    out = np.broadcast_to(out, np.shape(x))
    bad = ~np.isfinite(out)
    if bad.any():
        k = int(np.flatnonzero(bad.ravel())[0])
        raise EvaluationError("non-finite function value", float(np.ravel(x)[k]))
    return out


def _argmax_witness(res, *coords):
    k = int(np.argmax(res))
    return float(res[k]), tuple(float(c[k]) for c in coords)


# ---------------------------------------------------------------------------
# two-variable checks


def scan_pairs(residual, g: GridSpec, xs=None, diagonal=True, workers=1) -> Verdict:
    """Max of ``residual(x, y)`` over grid pairs ``x <= y`` (violation-positive)."""
    xs = g.xs() if xs is None else np.asarray(xs, dtype=float)

    def block(ij):
        a, b = xs[ij[0]], xs[ij[1]]
        with np.errstate(all="ignore"):
            res = np.asarray(residual(a, b), dtype=float)
        if np.isnan(res).any():
            k = int(np.flatnonzero(np.isnan(res))[0])
            raise EvaluationError("non-finite residual", (float(a[k]), float(b[k])))
        return _argmax_witness(res, a, b)

    worst, witness = _run_blocks(block, _pair_blocks(xs.size, g.pair_budget, g.digest(), diagonal), workers)
    return Verdict.from_scan(worst, witness, g, g.tol)


def subadditivity_residual(v, x, y):
    """Raw residual ``v(x + y) - v(x) - v(y)`` (positive means violated)."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    with np.errstate(all="ignore"):
        return np.asarray(v(x + y), dtype=float) - np.asarray(v(x), dtype=float) - np.asarray(v(y), dtype=float)


def check_subadditive(v, g: GridSpec, xs=None, workers=1) -> Verdict:
    """Scan ``v(x+y) <= v(x) + v(y)`` over grid pairs.

    ``v`` must accept numpy arrays.  Pairs come from ``xs`` (default
    ``g.xs()``); beyond ``g.pair_budget`` pairs a deterministic Sobol
    subsample is used.
    """
    xs = g.xs() if xs is None else np.asarray(xs, dtype=float)
    values = _evaluate(v, xs)

    def block(ij):
        i, j = ij
        a, b = xs[i], xs[j]
        vs = _evaluate(v, a + b)
        va, vb = values[i], values[j]
        scale = np.maximum.reduce([np.ones_like(vs), np.abs(vs), np.abs(va), np.abs(vb)])
        return _argmax_witness((vs - va - vb) / scale, a, b)

    worst, witness = _run_blocks(block, _pair_blocks(xs.size, g.pair_budget, g.digest(), True), workers)
    return Verdict.from_scan(worst, witness, g, g.tol)


def midpoint_residual(v, x1, x2):
    """Raw midpoint-concavity residual ``v((x1+x2)/2) - (v(x1)+v(x2))/2``.

    Nonnegative everywhere for concave ``v``.
    """
    x1, x2 = np.asarray(x1, dtype=float), np.asarray(x2, dtype=float)
    with np.errstate(all="ignore"):
        return np.asarray(v(0.5 * (x1 + x2)), dtype=float) - 0.5 * (
            np.asarray(v(x1), dtype=float) + np.asarray(v(x2), dtype=float))


def _check_midpoint(v, g, xs, sign, workers):
    xs = g.xs() if xs is None else np.asarray(xs, dtype=float)
    if xs.size < 2:
        return Verdict.not_applicable("fewer than two grid points in the domain", g)
    values = _evaluate(v, xs)

    def block(ij):
        i, j = ij
        a, b = xs[i], xs[j]
        vm = _evaluate(v, 0.5 * (a + b))
        va, vb = values[i], values[j]
        scale = np.maximum.reduce([np.ones_like(vm), np.abs(vm), np.abs(va), np.abs(vb)])
        # sign=+1: concavity, violation when the midpoint lies below the chord
        return _argmax_witness(-sign * (vm - 0.5 * (va + vb)) / scale, a, b)

    worst, witness = _run_blocks(block, _pair_blocks(xs.size, g.pair_budget, g.digest(), False), workers)
    return Verdict.from_scan(worst, witness, g, g.tol)


def check_concave_convex(v, g: GridSpec, xs=None, workers=1):
    """``(check_concave(v), check_convex(v))`` from a single midpoint pass."""
    xs = g.xs() if xs is None else np.asarray(xs, dtype=float)
    if xs.size < 2:
        na = Verdict.not_applicable("fewer than two grid points in the domain", g)
        return na, na
    values = _evaluate(v, xs)

    def block(ij):
        i, j = ij
        a, b = xs[i], xs[j]
        vm = _evaluate(v, 0.5 * (a + b))
        va, vb = values[i], values[j]
        scale = np.maximum.reduce([np.ones_like(vm), np.abs(vm), np.abs(va), np.abs(vb)])
        gap = (vm - 0.5 * (va + vb)) / scale
        return _argmax_witness(-gap, a, b), _argmax_witness(gap, a, b)

    blocks = _pair_blocks(xs.size, g.pair_budget, g.digest(), False)
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(block, blocks))
    else:
        results = [block(b) for b in blocks]
    concave = _reduce(r[0] for r in results)
    convex = _reduce(r[1] for r in results)
    return (Verdict.from_scan(*concave, g, g.tol), Verdict.from_scan(*convex, g, g.tol))


def check_concave(v, g: GridSpec, xs=None, workers=1) -> Verdict:
    """Midpoint concavity over all grid pairs ``x1 < x2``."""
    return _check_midpoint(v, g, xs, +1, workers)


def check_convex(v, g: GridSpec, xs=None, workers=1) -> Verdict:
    return _check_midpoint(v, g, xs, -1, workers)


# ---------------------------------------------------------------------------
# one-variable checks


def _origin_value(v, x_first):
    with np.errstate(all="ignore"):
        v0 = float(np.asarray(v(np.array([0.0])), dtype=float)[0])
    if np.isfinite(v0):
        return v0
    return float(_evaluate(v, np.array([x_first]))[0])


def _check_ratio(v, g, xs, direction):
    xs = g.xs() if xs is None else np.asarray(xs, dtype=float)
    xs = xs[xs > 0]
    ratio = _evaluate(v, xs) / xs
    v0 = _origin_value(v, xs[0])
    step = direction * (ratio[:-1] - ratio[1:])
    scale = np.maximum.reduce([np.ones_like(step), np.abs(ratio[:-1]), np.abs(ratio[1:])])
    res = step / scale
    worst, witness = _argmax_witness(res, xs[:-1], xs[1:])
    if abs(v0) > worst:
        worst, witness = abs(v0), (0.0,)
    return Verdict.from_scan(worst, witness, g, g.tol)


def check_star_shaped(v, g: GridSpec, xs=None) -> Verdict:
    """``v(0+) = 0`` and ``v(x)/x`` increasing along the grid."""
    return _check_ratio(v, g, xs, +1)


def check_anti_star_shaped(v, g: GridSpec, xs=None) -> Verdict:
    """``v(0+) = 0`` and ``v(x)/x`` decreasing along the grid."""
    return _check_ratio(v, g, xs, -1)


def check_increasing(v, g: GridSpec, xs=None) -> Verdict:
    xs = g.xs() if xs is None else np.asarray(xs, dtype=float)
    values = _evaluate(v, xs)
    drop = values[:-1] - values[1:]
    scale = np.maximum.reduce([np.ones_like(drop), np.abs(values[:-1]), np.abs(values[1:])])
    worst, witness = _argmax_witness(drop / scale, xs[:-1], xs[1:])
    return Verdict.from_scan(worst, witness, g, g.tol)


# ---------------------------------------------------------------------------
# Riemann-Stieltjes quadrature


def _continuous_segments(integrator, a, b, lo_u, hi_u):
    """Probability intervals in ``[lo_u, hi_u]`` not covered by atoms in ``(a, b]``."""
    jumps = integrator.jumps
    if jumps is None:
        return [(lo_u, hi_u)], None
    pts, masses = jumps
    inside = (pts > a) & (pts <= b)
    pts, masses = pts[inside], masses[inside]
    if integrator.is_discrete:
        return [], (pts, masses)
    top = integrator.cdf(pts)
    segments, cursor = [], lo_u
    for t_hi, m in sorted(zip(np.atleast_1d(top), masses)):
        t_lo = t_hi - m
        if t_lo > cursor:
            segments.append((cursor, t_lo))
        cursor = max(cursor, t_hi)
    if hi_u > cursor:
        segments.append((cursor, hi_u))
    return segments, (pts, masses)


def _aligned_sum(integrand, integrator, segments, cells, cache):
    """Midpoint rule on the fixed lattice ``k / cells`` of ``[0, 1]``.

    Quantiles at full-cell midpoints are memoised in ``cache`` so that
    many integrals against the same integrator share them; the partial
    cells at segment ends get their own midpoints.
    """
    if cells not in cache:
        u = (np.arange(cells) + 0.5) / cells
        cache[cells] = np.asarray(integrator.quantile(u), dtype=float)
    q_all = cache[cells]
    t_parts, w_parts = [], []
    for lo, hi in segments:
        i0, i1 = int(np.ceil(lo * cells)), int(np.floor(hi * cells))
        if i1 <= i0:
            ends = [(lo, hi)]
        else:
            t_parts.append(q_all[i0:i1])
            w_parts.append(np.full(i1 - i0, 1.0 / cells))
            ends = [(lo, i0 / cells), (i1 / cells, hi)]
        for e_lo, e_hi in ends:
            if e_hi > e_lo:
                t_parts.append(np.atleast_1d(np.asarray(integrator.quantile(0.5 * (e_lo + e_hi)), dtype=float)))
                w_parts.append(np.array([e_hi - e_lo]))
    if not t_parts:
        return 0.0
    t, w = np.concatenate(t_parts), np.concatenate(w_parts)
    with np.errstate(all="ignore"):
        vals = np.asarray(integrand(t), dtype=float)
    if not np.all(np.isfinite(vals)):
        k_bad = int(np.flatnonzero(~np.isfinite(vals))[0])
        raise EvaluationError("non-finite integrand value", float(t[k_bad]))
    return float(np.dot(w, vals))


def _midpoint_sum(integrand, integrator, segments, cells):
    lengths = np.array([hi - lo for lo, hi in segments])
    total_len = lengths.sum()
    if total_len <= 0:
        return 0.0
    counts = np.maximum(1, np.round(cells * lengths / total_len).astype(int))
    est = 0.0
    for (lo, hi), k in zip(segments, counts):
        h = (hi - lo) / k
        u = lo + h * (np.arange(k) + 0.5)
        t = np.asarray(integrator.quantile(u), dtype=float)
        with np.errstate(all="ignore"):
            vals = np.asarray(integrand(t), dtype=float)
        if not np.all(np.isfinite(vals)):
            k_bad = int(np.flatnonzero(~np.isfinite(vals))[0])
            raise EvaluationError("non-finite integrand value", float(t[k_bad]))
        est += h * vals.sum()
    return est


def stieltjes_integral(integrand, integrator, a=-np.inf, b=np.inf, *, cells=20000,
                       abs_tol=1e-8, max_doublings=6, cache=None):
    """Integral of ``integrand(t)`` against ``integrator`` over ``(a, b]``.

    Atoms are summed exactly.  The continuous part is computed as
    ``int integrand(Q(u)) du`` with a midpoint rule on equal-probability
    cells, doubling the cell count until two successive estimates agree to
    ``abs_tol``.  Mass at ``+inf`` is never included.

    By default the cells split the integration range evenly.  Passing a
    dict as ``cache`` switches to cells of width ``1/cells`` aligned on
    ``[0, 1]`` whose quantiles are stored in the dict; reuse the same dict
    for repeated integrals against one integrator.
    """
    a, b = float(a), float(b)
    if a > b:
        raise ValueError(f"need a <= b, got a={a}, b={b}")
    lo_u = 0.0 if a == -np.inf else float(integrator.cdf(a))
    hi_u = (1.0 - integrator.atom_at_inf) if b == np.inf else float(integrator.cdf(b))
    if hi_u <= lo_u:
        return 0.0

    segments, atoms = _continuous_segments(integrator, a, b, lo_u, hi_u)
    atom_part = 0.0
    if atoms is not None and atoms[0].size:
        with np.errstate(all="ignore"):
            vals = np.asarray(integrand(atoms[0]), dtype=float)
        atom_part = float(np.dot(vals, atoms[1]))
    segments = [(lo, hi) for lo, hi in segments if hi - lo > 1e-15]
    if not segments:
        return atom_part

    if cache is None:
        def rule(n):
            return _midpoint_sum(integrand, integrator, segments, n)
    else:
        def rule(n):
            return _aligned_sum(integrand, integrator, segments, n, cache)

    previous = rule(cells)
    estimates = (previous, previous)
    for _ in range(max_doublings):
        cells *= 2
        current = rule(cells)
        if abs(current - previous) < abs_tol:
            return atom_part + current
        estimates = (previous, current)
        previous = current
    raise AccuracyError("Stieltjes quadrature did not converge", estimates)
