import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invsub import (FRECHET, PARETO, AccuracyError, GridSpec, Status, check_anti_star_shaped,
                    check_concave, check_convex, check_star_shaped, check_subadditive, parse_spec,
                    stieltjes_integral)
from invsub.errors import EvaluationError
from invsub.numerics import (check_concave_convex, check_increasing, dumps, midpoint_residual,
                             subadditivity_residual)

SMALL = GridSpec(x_lo=1e-3, x_hi=1e3, n_x=201)
LIN = GridSpec(x_lo=0.01, x_hi=4.0, n_x=200, spacing="linear")


# grid

def test_default_grid():
    g = GridSpec()
    xs, ts = g.xs(), g.thetas()
    assert xs.size == 2001 and xs[0] == pytest.approx(1e-6) and xs[-1] == pytest.approx(1e6)
    assert ts.size == 199 and ts[0] == pytest.approx(0.005) and ts[-1] == pytest.approx(0.995)
    assert g.tol == 1e-9


@pytest.mark.parametrize("kw", [dict(x_lo=0.0), dict(x_lo=2.0, x_hi=1.0), dict(n_x=1),
                                dict(spacing="cubic"), dict(theta_points=0), dict(tol=-1.0)])
def test_grid_rejects_bad_settings(kw):
    with pytest.raises(ValueError):
        GridSpec(**kw)


def test_grid_digest_is_stable():
    assert GridSpec().digest() == GridSpec().digest()
    assert GridSpec().digest() != GridSpec(n_x=2000).digest()


# subadditivity

def test_sqrt_subadditive():
    assert check_subadditive(np.sqrt, SMALL).status is Status.SUPPORTED


def test_square_not_subadditive():
    assert subadditivity_residual(np.square, 1.0, 1.0) == pytest.approx(2.0)
    v = check_subadditive(np.square, SMALL)
    assert v.violated and v.worst_residual > 0
    x, y = v.witness
    assert subadditivity_residual(np.square, x, y) > 0


def test_min_one_subadditive():
    # x + y <= 1: equality; otherwise v(x+y) = 1 <= v(x) + v(y)
    v = check_subadditive(lambda x: np.minimum(x, 1.0), LIN)
    assert v.supported and v.worst_residual <= 1e-12


def test_nonfinite_value_reports_location():
    with pytest.raises(EvaluationError) as err:
        check_subadditive(lambda x: np.where(x > 10, np.nan, x), SMALL)
    assert err.value.location is not None


@st.composite
def concave_pl(draw):
    """Nonnegative concave piecewise-linear function with v(0) = 0."""
    n = draw(st.integers(1, 6))
    slopes = sorted(draw(st.lists(st.floats(0.0, 10.0), min_size=n, max_size=n)), reverse=True)
    knots = np.cumsum(draw(st.lists(st.floats(0.05, 50.0), min_size=n - 1, max_size=n - 1)))
    knots = np.concatenate([[0.0], knots])
    values = np.concatenate([[0.0], np.cumsum(np.diff(knots) * slopes[:-1])])

    def v(x):
        x = np.asarray(x, dtype=float)
        k = np.clip(np.searchsorted(knots, x, side="right") - 1, 0, n - 1)
        return values[k] + np.asarray(slopes)[k] * (x - knots[k])

    return v


@settings(max_examples=40, deadline=None)
@given(concave_pl())
def test_concave_through_origin_is_subadditive(v):
    g = GridSpec(x_lo=1e-2, x_hi=1e2, n_x=120, tol=1e-9)
    assert check_subadditive(v, g).supported


def test_pair_budget_subsampling_is_deterministic():
    g = GridSpec(x_lo=1e-3, x_hi=1e3, n_x=3000, pair_budget=50_000)
    a = check_subadditive(np.square, g)
    b = check_subadditive(np.square, g, workers=3)
    assert a == b and a.violated


@pytest.mark.parametrize("workers", [1, 2, 5])
def test_scan_independent_of_partitioning(workers):
    ref = check_subadditive(np.square, SMALL)
    assert check_subadditive(np.square, SMALL, workers=workers) == ref


# concavity

def test_linear_is_concave_and_convex():
    cc, cv = check_concave_convex(lambda x: 3 * x + 1, SMALL)
    assert cc.supported and cv.supported
    assert check_concave(lambda x: x, SMALL).supported


def test_frechet_odds_midpoint():
    v = lambda x: 1.0 / FRECHET.sf(x)  # noqa: E731
    assert float(v(1.0)) == pytest.approx(1.58198, abs=1e-5)
    assert (float(v(0.5)) + float(v(1.5))) / 2 == pytest.approx(1.60584, abs=1e-5)
    assert midpoint_residual(v, 0.5, 1.5) < 0
    assert check_concave(v, SMALL).violated


def test_pareto_odds_concave():
    xs = SMALL.xs()[SMALL.xs() > 1]
    assert check_concave(lambda x: 1.0 / PARETO.sf(x), SMALL, xs=xs).supported


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 10.0) | st.floats(-10.0, -0.01), st.floats(-5, 5))
def test_concave_convex_exclusive(a, b):
    v = lambda x: a * x * x + b * x  # noqa: E731
    cc, cv = check_concave_convex(v, LIN)
    assert not (cc.supported and cv.supported)
    assert cc.supported == (a < 0) and cv.supported == (a > 0)


def test_finer_grid_keeps_violation():
    g = GridSpec(x_lo=0.1, x_hi=10.0, n_x=51, spacing="linear")
    fine = g.replace(n_x=101)
    assert np.isin(g.xs(), fine.xs()).all()
    for check, v in ((check_subadditive, np.square), (check_concave, np.square),
                     (check_convex, np.sqrt)):
        coarse_v = check(v, g)
        assert coarse_v.violated and check(v, fine).violated


# star shape

def test_star_shapes():
    assert check_star_shaped(np.square, SMALL).supported
    assert check_star_shaped(np.sqrt, SMALL).violated
    assert check_anti_star_shaped(lambda x: np.minimum(x, 1.0), SMALL).supported
    # not vanishing at the origin
    assert check_star_shaped(lambda x: x * x + 1.0, SMALL).violated


def test_increasing():
    assert check_increasing(np.log, SMALL).supported
    assert check_increasing(lambda x: -x, SMALL).violated


# Stieltjes integration

def test_total_mass_pareto():
    assert stieltjes_integral(lambda t: np.ones_like(t), PARETO, 1.0, np.inf) == pytest.approx(1.0, abs=1e-9)


def test_pareto_convolution_piece():
    closed = 6 / 7 - math.log(7) / 32 - 3 / 28
    got = stieltjes_integral(lambda t: PARETO.cdf(8.0 - t), PARETO, 1.0, 8.0)
    assert closed == pytest.approx(0.68919, abs=1e-5)
    assert got == pytest.approx(closed, abs=1e-7)


@pytest.mark.parametrize("p", [0.3, 0.6])
def test_constant_against_mass_at_infinity(p):
    d = parse_spec(f"ceil-geom:p={p}")
    got = stieltjes_integral(lambda t: 2.5 * np.ones_like(t), d, 0.0, np.inf)
    assert got == pytest.approx(2.5 * (1 - p), abs=1e-9)


def test_discrete_sum_matches_jump_list():
    d = parse_spec("ceil-geom:p=0.3")
    pts, mass = d.jumps
    keep = (pts > 0.01) & (pts <= 0.5)
    got = stieltjes_integral(np.sqrt, d, 0.01, 0.5)
    assert got == pytest.approx(float(np.dot(np.sqrt(pts[keep]), mass[keep])), rel=1e-12)


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(["pareto", "frechet", "exp:rate=1", "shifted-pareto"]),
       st.floats(0.05, 5.0), st.floats(0.1, 20.0))
def test_change_of_variables(spec, a, width):
    from scipy import integrate
    d = parse_spec(spec)
    b = a + width
    f = lambda t: np.exp(-t) * np.sin(t) + 1.0  # noqa: E731
    got = stieltjes_integral(f, d, a, b)
    lo, hi = float(d.cdf(a)), float(d.cdf(b))
    ref, _ = integrate.quad(lambda u: f(float(d.quantile(u))), lo, hi, epsabs=1e-12, limit=200)
    assert got == pytest.approx(ref, abs=1e-6)


def test_cached_lattice_matches_default():
    f = lambda t: PARETO.cdf(8.0 - t)  # noqa: E731
    cache = {}
    a = stieltjes_integral(f, PARETO, 1.0, 8.0, cache=cache)
    assert cache
    assert a == pytest.approx(stieltjes_integral(f, PARETO, 1.0, 8.0), abs=1e-7)


def test_accuracy_error_carries_estimates():
    rough = lambda t: np.sin(1e4 * t)  # noqa: E731
    with pytest.raises(AccuracyError) as err:
        stieltjes_integral(rough, PARETO, 1.0, 10.0, cells=20, max_doublings=1)
    assert len(err.value.estimates) == 2


def test_reversed_bounds_rejected():
    with pytest.raises(ValueError):
        stieltjes_integral(np.sqrt, PARETO, 5.0, 1.0)


# serialisation

def test_dumps_cleans_special_values():
    text = dumps({"s": Status.VIOLATED, "inf": math.inf, "nan": math.nan, "arr": np.arange(2)})
    data = json.loads(text)
    assert data == {"s": "violated", "inf": "inf", "nan": None, "arr": [0, 1]}
    assert text.endswith("\n")
