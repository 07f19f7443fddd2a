import json
import math

import numpy as np
import pytest

from invsub import (FRECHET, PARETO, InvalidWeightsError, WeightVector, check_dominance_exact2,
                    check_dominance_mc, default_catalog, is_invsub, mean_diagnostic,
                    mixture_survival_exact2, parse_spec)
from invsub.dominance import DOMINANCE_GRID, dkw_epsilon, mc_evaluation_points

EXP = parse_spec("exp:rate=1")
SEED = 20240601
NONNEG = [d for d in default_catalog() if d.support_lo >= 0]


# weights

def test_weight_validation():
    assert WeightVector.parse("0.2,0.3,0.5").theta == (0.2, 0.3, 0.5)
    with pytest.raises(InvalidWeightsError, match="sum to 1"):
        WeightVector.parse("0.5,0.6")
    with pytest.raises(InvalidWeightsError, match="positive"):
        WeightVector((1.5, -0.5))
    with pytest.raises(InvalidWeightsError):
        WeightVector.parse("a,b")


# exact two-copy survival

def test_pareto_oracle():
    assert mixture_survival_exact2(PARETO, 0.5, 4.0) == pytest.approx(0.25 + math.log(7) / 32, abs=1e-6)


@pytest.mark.parametrize("x", [0.5, 1.0, 2.0, 5.0])
def test_exponential_oracle(x):
    # theta = 1/2: (X1 + X2) / 2 is Gamma(2, 1/2)
    assert mixture_survival_exact2(EXP, 0.5, x) == pytest.approx(math.exp(-2 * x) * (1 + 2 * x), abs=1e-6)


def test_exponential_unequal_weights():
    # hypoexponential survival for rates 1/t and 1/(1-t)
    t, x = 0.3, 1.5
    a, b = 1 / t, 1 / (1 - t)
    closed = (b * math.exp(-a * x) - a * math.exp(-b * x)) / (b - a)
    assert mixture_survival_exact2(EXP, t, x) == pytest.approx(closed, abs=1e-6)


def test_below_support_is_one():
    assert mixture_survival_exact2(PARETO, 0.3, 0.5) == 1.0
    assert mixture_survival_exact2(parse_spec("uniform:a=2,b=3"), 0.5, 1.0) == 1.0


def test_exact2_reports():
    r = check_dominance_exact2(FRECHET, 0.3)
    assert r.verdict.supported and r.band is None and r.method == "exact2"
    r = check_dominance_exact2(EXP, 0.5)
    k = int(np.argmin(r.gap))
    assert r.verdict.violated and 1.5 < r.eval_points[k] < 3.0 and r.gap[k] < -0.04


def test_near_degenerate_weight():
    xs = DOMINANCE_GRID.xs()[::7]
    for d in (PARETO, FRECHET, EXP):
        s = mixture_survival_exact2(d, 0.999, xs)
        assert np.max(np.abs(s - d.sf(xs))) <= 0.01


@pytest.mark.parametrize("d", [d for d in NONNEG if is_invsub(d).supported], ids=lambda d: d.spec)
def test_invsub_implies_exact_dominance(d):
    assert check_dominance_exact2(d, 0.5).verdict.supported


def test_finite_mean_entries_violate():
    for spec in ("exp:rate=1", "uniform:a=0,b=1"):
        d = parse_spec(spec)
        assert mean_diagnostic(d).label == "appears_finite"
        for w in ((0.5, 0.5), (0.2, 0.8), (0.2, 0.3, 0.5)):
            assert check_dominance_mc(d, w, seed=SEED).verdict.violated, (spec, w)
        assert check_dominance_exact2(d, 0.3).verdict.violated


# simulation

def test_dkw_band():
    assert dkw_epsilon(100_000, 0.01) == pytest.approx(0.00515, abs=1e-5)


def test_mc_examples():
    r = check_dominance_mc(PARETO, (0.5, 0.5), n_samples=100_000, alpha=0.01, seed=SEED)
    assert r.verdict.supported and r.band == pytest.approx(0.00515, abs=1e-5)
    r = check_dominance_mc(parse_spec("ceil-geom:p=0.3"), (0.4, 0.6), seed=SEED)
    assert r.verdict.supported and abs(r.extra["inf_frequency"] - 0.3) < 0.0045
    r = check_dominance_mc(EXP, (0.5, 0.5), seed=7)
    k = int(np.argmin(r.gap))
    assert r.verdict.violated and 1.0 < r.eval_points[k] < 3.5


def test_mc_needs_enough_samples():
    with pytest.raises(ValueError):
        check_dominance_mc(PARETO, (0.5, 0.5), n_samples=5000)


def test_mc_bad_weights():
    with pytest.raises(InvalidWeightsError):
        check_dominance_mc(PARETO, (0.0, 1.0))


def test_mc_deterministic_across_workers():
    a = check_dominance_mc(FRECHET, (0.2, 0.3, 0.5), seed=3, workers=1)
    b = check_dominance_mc(FRECHET, (0.2, 0.3, 0.5), seed=3, workers=4)
    c = check_dominance_mc(FRECHET, (0.2, 0.3, 0.5), seed=3, workers=4)
    assert a.to_json() == b.to_json() == c.to_json()
    assert a.to_csv() == b.to_csv()


def test_mc_permutation_invariant_verdict():
    for d in (PARETO, EXP):
        a = check_dominance_mc(d, (0.2, 0.3, 0.5), seed=SEED)
        b = check_dominance_mc(d, (0.5, 0.2, 0.3), seed=SEED)
        assert a.status is b.status


def test_evaluation_points():
    xs = mc_evaluation_points(PARETO)
    assert xs[0] == pytest.approx(1 / 0.99)
    assert xs[-1] == pytest.approx(1e4)
    assert np.all(np.isfinite(mc_evaluation_points(parse_spec("ceil-geom:p=0.3"))))


@pytest.mark.parametrize("d", [d for d in NONNEG if d.atom_at_inf == 0], ids=lambda d: d.spec)
def test_mc_agrees_with_quadrature(d):
    n, alpha = 100_000, 0.01
    xs = mc_evaluation_points(d)
    mc = check_dominance_mc(d, (0.5, 0.5), n_samples=n, alpha=alpha, seed=SEED, eval_points=xs)
    exact = mixture_survival_exact2(d, 0.5, xs)
    assert np.max(np.abs(mc.mixture_survival - exact)) <= 2 * dkw_epsilon(n, alpha)


def test_report_serialisation():
    r = check_dominance_mc(PARETO, (0.5, 0.5), seed=SEED)
    data = json.loads(r.to_json())
    assert {"distribution", "weights", "method", "points", "verdict", "n_samples", "seed", "alpha"} <= set(data)
    assert set(data["points"][0]) == {"x", "gap", "band"}
    assert r.to_csv().splitlines()[0] == "x,gap,band,mixture_survival,survival"
    e = json.loads(check_dominance_exact2(PARETO, 0.5).to_json())
    assert e["points"][0]["band"] is None and e["method"] == "exact2"


# truncated means

def test_mean_diagnostic_labels():
    assert mean_diagnostic(PARETO).label == "appears_infinite"
    assert mean_diagnostic(FRECHET).label == "appears_infinite"
    assert mean_diagnostic(parse_spec("ceil-geom:p=0.3")).label == "appears_infinite"
    assert mean_diagnostic(EXP).label == "appears_finite"


def test_truncated_mean_values():
    r = mean_diagnostic(PARETO, cutoffs=[10.0, 100.0])
    assert r.means[0] == pytest.approx(1 + math.log(10), rel=1e-6)
    assert r.means[1] == pytest.approx(1 + math.log(100), rel=1e-6)
    r = mean_diagnostic(EXP, cutoffs=[1.0, 10.0])
    assert r.means[0] == pytest.approx(1 - math.exp(-1), rel=1e-6)


def test_mean_diagnostic_input_checks():
    with pytest.raises(ValueError):
        mean_diagnostic(parse_spec("cauchy"))
    with pytest.raises(ValueError):
        mean_diagnostic(PARETO, cutoffs=[100.0, 10.0])
