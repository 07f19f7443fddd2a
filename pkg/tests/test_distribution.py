import numpy as np
import pytest
from scipy import stats

from invsub import (FRECHET, PARETO, Distribution, GridSpec, InvalidDistributionError,
                    InvalidTransformError, TransformSpec, default_catalog, make_transformed,
                    parse_spec, sample, validate_distribution)
from invsub.catalog import literal_r_a_cdf, literal_v_cdf
from invsub.distribution import generalized_inverse

U_GRID = np.linspace(0.001, 0.999, 199)


def test_pareto_valid():
    assert validate_distribution(PARETO).supported


def test_exponential_valid():
    assert validate_distribution(parse_spec("exp:rate=1")).supported


@pytest.mark.parametrize("d", default_catalog(), ids=lambda d: d.spec)
def test_catalog_entries_valid(d):
    assert validate_distribution(d).supported


def test_literal_r_a_rejected():
    f = literal_r_a_cdf(0.5)
    assert float(f(np.array(0.5))) == pytest.approx(6.33, abs=0.01)
    d = Distribution("literal-r-a", f, support=(0.0, np.inf))
    v = validate_distribution(d)
    assert v.violated and v.note == "range"
    assert 0 < v.witness[0] < 1


def test_literal_v_rejected():
    d = Distribution("literal-v", literal_v_cdf(), support=(0.0, np.inf))
    v = validate_distribution(d)
    assert v.violated and v.note == "range"


def test_nonfinite_cdf_raises_with_location():
    d = Distribution("bad", lambda x: np.where(np.asarray(x) > 3, np.nan, 0.5))
    with pytest.raises(InvalidDistributionError) as err:
        validate_distribution(d)
    assert err.value.x > 3


def test_decreasing_cdf_violated():
    d = Distribution("down", lambda x: np.clip(1 - np.asarray(x, float) / 10, 0, 1), support=(0, 10))
    assert validate_distribution(d).violated


def test_immutable():
    with pytest.raises(AttributeError):
        PARETO.name = "other"


# quantiles

def test_sample_oracles():
    # sampling is quantile(U); U = 0.5 and U = 1/e give these exact values
    assert PARETO.quantile(0.5) == pytest.approx(2.0)
    assert FRECHET.quantile(np.exp(-1)) == pytest.approx(1.0)
    assert sample(PARETO, 3, seed=1).shape == (3,)


CONTINUOUS = [d for d in default_catalog() if d.is_continuous]


@pytest.mark.parametrize("d", CONTINUOUS, ids=lambda d: d.spec)
def test_galois_property(d):
    g = GridSpec(n_x=401)
    xs = g.xs()
    if d.support_lo < 0:
        xs = np.concatenate([-xs[::-1], xs])
    F = d.cdf(xs)
    for u in (0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99):
        q = float(d.quantile(u))
        # F(x) <= u  <=>  x <= Q(u), away from a tol-band around u
        lhs, rhs = F <= u, xs <= q
        clear = np.abs(F - u) > g.tol
        assert np.array_equal(lhs[clear], rhs[clear])


@pytest.mark.parametrize("spec", ["pareto", "frechet", "abs-cauchy", "shifted-pareto", "exp:rate=1",
                                  "burr:c=0.5,k=1.5", "loglogistic:a=0.5", "gpd:xi=2", "cauchy",
                                  "uniform:a=0,b=1"])
def test_closed_quantile_matches_bisection(spec):
    d = parse_spec(spec)
    generic = Distribution("generic", d.cdf, sf=d.sf, support=(d.support_lo, d.support_hi))
    q, qg = d.quantile(U_GRID), generic.quantile(U_GRID)
    assert np.all(np.abs(q - qg) <= 1e-9 * np.maximum(1.0, np.abs(q)))


def test_closed_quantiles_match_scipy():
    assert np.allclose(parse_spec("exp:rate=2").quantile(U_GRID), stats.expon(scale=0.5).ppf(U_GRID))
    assert np.allclose(parse_spec("cauchy").quantile(U_GRID), stats.cauchy.ppf(U_GRID))
    assert np.allclose(parse_spec("abs-cauchy").quantile(U_GRID), stats.halfcauchy.ppf(U_GRID))
    assert np.allclose(parse_spec("gpd:xi=2").quantile(U_GRID), stats.genpareto(2).ppf(U_GRID))


def test_generalized_inverse_flat_piece():
    # F flat at 0.5 on [1, 2]: sup{x : F(x) <= 0.5} = 2
    f = lambda x: np.clip(np.where(x < 1, x / 2, np.where(x < 2, 0.5, x / 4)), 0, 1)  # noqa: E731
    assert float(generalized_inverse(f, 0.5, 0.0, 4.0)) == pytest.approx(2.0, abs=1e-9)


def test_ceil_geom_jumps_and_left_limits():
    d = parse_spec("ceil-geom:p=0.3")
    pts, mass = d.jumps
    assert pts[0] == 1.0 and mass.sum() == pytest.approx(0.7, abs=1e-12)
    k = np.arange(1, 50)
    assert np.allclose(d.cdf(1.0 / k), 0.7 ** k, rtol=1e-12)
    assert np.allclose(d.cdf_left(1.0 / k), 0.7 ** (k + 1), rtol=1e-12)
    jumps = d.cdf(1.0 / k) - d.cdf_left(1.0 / k)
    assert np.allclose(jumps, mass[:49])
    assert np.all(d.cdf_left(1.0 / k) <= d.cdf(1.0 / k))


def test_odds():
    assert float(PARETO.odds(4.0)) == pytest.approx(3.0)


# transforms

def test_identity_transform():
    base = parse_spec("shifted-pareto")
    t = TransformSpec("star_shaped", lambda x: x, lambda y: y, name="id")
    d = make_transformed(base, t)
    xs = GridSpec().xs()
    assert np.array_equal(d.cdf(xs), base.cdf(xs))


def test_square_transform():
    d = parse_spec("transform(pow:2,shifted-pareto)")
    assert float(d.cdf(4.0)) == pytest.approx(2 / 3)


def test_expm1_transform_valid():
    d = parse_spec("transform(expm1,shifted-pareto)")
    assert validate_distribution(d).supported


def test_transform_without_inverse_uses_bisection():
    t = TransformSpec("star_shaped", lambda x: x * (1 + x), name="x(1+x)")
    d = make_transformed(parse_spec("shifted-pareto"), t)
    y = 6.0  # h(2) = 6
    assert float(d.cdf(y)) == pytest.approx(2 / 3, abs=1e-9)


def test_non_monotone_transform_rejected():
    t = TransformSpec("custom", lambda x: np.sin(x), name="sin")
    with pytest.raises(InvalidTransformError):
        make_transformed(PARETO, t)


def test_non_star_shaped_rejected():
    t = TransformSpec("star_shaped", np.sqrt, np.square, name="sqrt")
    with pytest.raises(InvalidTransformError):
        make_transformed(PARETO, t)


def test_transform_on_negative_support_rejected():
    t = TransformSpec("star_shaped", np.square, np.sqrt, name="sq")
    with pytest.raises(InvalidTransformError):
        make_transformed(parse_spec("cauchy"), t)


def test_transformed_sample_composes():
    d = parse_spec("transform(pow:2,pareto)")
    a = sample(d, 1000, seed=3)
    b = sample(PARETO, 1000, seed=3) ** 2
    assert np.allclose(a, b)


# sampling

def test_sample_deterministic_per_seed():
    assert np.array_equal(sample(FRECHET, 500, seed=11), sample(FRECHET, 500, seed=11))
    assert not np.array_equal(sample(FRECHET, 500, seed=11), sample(FRECHET, 500, seed=12))


def test_sample_rejects_empty():
    with pytest.raises(ValueError):
        sample(PARETO, 0, seed=1)


def test_infinite_atom_frequency():
    n, p = 100_000, 0.3
    x = sample(parse_spec("ceil-geom:p=0.3"), n, seed=2024)
    freq = np.mean(np.isposinf(x))
    assert abs(freq - p) <= 3 * np.sqrt(p * (1 - p) / n)
    assert np.all(x[np.isfinite(x)] <= 1.0)


@pytest.mark.parametrize("spec", ["pareto", "frechet", "abs-cauchy", "oddslog:b=0.5"])
def test_empirical_cdf_inside_dkw_band(spec):
    n, alpha = 100_000, 0.01
    d = parse_spec(spec)
    x = np.sort(sample(d, n, seed=99))
    ecdf_hi = np.arange(1, n + 1) / n
    ecdf_lo = np.arange(0, n) / n
    F = d.cdf(x)
    dist = max(np.max(ecdf_hi - F), np.max(F - ecdf_lo))
    assert dist <= np.sqrt(np.log(2 / alpha) / (2 * n))
