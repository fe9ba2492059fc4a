import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import kstest

from schedq.perturbation import (
    Degenerate,
    TwoSidedExp,
    TwoSidedPareto,
    model_from_config,
    model_to_config,
)

PARETO_SYM = TwoSidedPareto(c1=0.25, alpha1=2.0, c2=0.25, alpha2=2.0)
MODELS = [
    PARETO_SYM,
    TwoSidedPareto(c1=0.1, alpha1=1.5, c2=0.3, alpha2=3.0),
    TwoSidedExp.laplace(1.0),
    TwoSidedExp(d1=0.3, beta1=1.5, d2=0.8, beta2=1.0),
    Degenerate(),
]


def test_pareto_survival_closed_form():
    assert PARETO_SYM.survival(2.0) == pytest.approx(0.0625, abs=1e-15)
    # tail 0.25 above 1 plus half of the core mass 0.5 sitting on (0, 1]
    assert PARETO_SYM.survival(0.0) == pytest.approx(0.5, abs=1e-15)
    assert PARETO_SYM.survival(1.0) == pytest.approx(0.25, abs=1e-15)
    assert PARETO_SYM.survival(-1.0) == pytest.approx(0.75, abs=1e-15)
    assert PARETO_SYM.survival(-2.0) == pytest.approx(1.0 - 0.0625, abs=1e-15)


def test_degenerate_survival():
    d = Degenerate()
    assert d.survival(0.0) == 0.0
    assert d.survival(-1.0) == 1.0


def test_interval_prob_uniform_core():
    # uniform core density (1 - c1 - c2)/2 = 0.25 per unit length
    assert PARETO_SYM.interval_prob(0.0, 1.0) == pytest.approx(0.25, abs=1e-15)
    assert PARETO_SYM.interval_prob(0.25, 0.25) == 0.0
    assert Degenerate().interval_prob(-0.5, 0.5) == 1.0


def test_interval_prob_rejects_reversed():
    for m in MODELS:
        with pytest.raises(ValueError):
            m.interval_prob(1.0, 0.0)


@pytest.mark.parametrize("model", MODELS)
def test_partition_mass_sums_to_one(model):
    big = 1e300
    total = (
        model.interval_prob(-big, -1.0)
        + model.interval_prob(-1.0, 1.0)
        + model.interval_prob(1.0, big)
        + model.survival(big)
        + model.cdf(-big)
    )
    assert total == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("model", MODELS)
def test_survival_monotone(model):
    x = np.linspace(-50.0, 50.0, 1000)
    s = np.asarray(model.survival(x))
    assert np.all(np.diff(s) <= 1e-15)


@pytest.mark.parametrize("model", MODELS)
def test_finite_mean(model):
    m = model.mean_abs()
    assert math.isfinite(m) and m >= 0.0
    if not isinstance(model, Degenerate):
        # E|xi| equals the integral of P(|xi| > x)
        num, _ = quad(lambda x: model.survival(x) + model.cdf(-x), 0.0, np.inf, limit=400)
        assert m == pytest.approx(num, rel=1e-8)


def test_pareto_sampling_matches_survival():
    g = np.random.default_rng(101)
    x = PARETO_SYM.sample(g, size=1_000_000)
    p_hat = float(np.mean(x > 2.0))
    assert p_hat == pytest.approx(0.0625, abs=3e-4)


def test_laplace_sample_mean_zero():
    g = np.random.default_rng(202)
    x = TwoSidedExp.laplace(1.0).sample(g, size=1_000_000)
    assert float(np.mean(x)) == pytest.approx(0.0, abs=0.005)


@pytest.mark.parametrize("model", [m for m in MODELS if not isinstance(m, Degenerate)])
def test_empirical_cdf_ks(model):
    g = np.random.default_rng(303)
    x = model.sample(g, size=1_000_000)
    stat = kstest(x, model.cdf).statistic
    # one-sample KS critical value at significance 0.001
    crit = math.sqrt(-0.5 * math.log(0.0005)) / math.sqrt(x.size)
    assert stat < crit


def test_ppf_inverts_cdf():
    v = np.linspace(0.001, 0.999, 97)
    for model in MODELS[:-1]:
        x = model.ppf(v)
        assert np.allclose(model.cdf(x), v, atol=1e-12)


def test_density_coeff_is_exponent_times_survival_coeff():
    g = np.random.default_rng(404)
    for _ in range(50):
        c1, c2 = g.uniform(0.0, 0.5, size=2)
        a1, a2 = g.uniform(1.01, 6.0, size=2)
        tp = TwoSidedPareto(c1, a1, c2, a2).tail_params()
        assert tp.right_density_coeff == tp.right_exponent * tp.right_survival_coeff
        assert tp.left_density_coeff == tp.left_exponent * tp.left_survival_coeff


def test_tail_params_views():
    tp = PARETO_SYM.tail_params()
    assert tp.kind == "power" and tp.right_density_coeff == pytest.approx(0.5)
    te = TwoSidedExp(d1=0.5, beta1=1.0, d2=0.5, beta2=1.0).tail_params()
    assert te.kind == "exponential"
    assert (te.right_density_coeff, te.right_exponent) == (0.5, 1.0)
    assert not Degenerate().tail_params().has_tail


def test_invalid_parameters_rejected():
    with pytest.raises(ValueError, match="alpha must exceed 1"):
        TwoSidedPareto(0.25, 0.9, 0.25, 2.0)
    with pytest.raises(ValueError):
        TwoSidedPareto(0.7, 2.0, 0.7, 2.0)  # c1 + c2 > 1
    with pytest.raises(ValueError, match="not normalized"):
        TwoSidedExp(d1=1.0, beta1=1.0, d2=1.0, beta2=1.0)


def test_config_round_trip():
    for model in MODELS:
        assert model_from_config(model_to_config(model)) == model
    with pytest.raises(ValueError):
        model_from_config({"type": "cauchy"})
    with pytest.raises(ValueError):
        model_from_config({"type": "pareto2", "c1": 0.1})
    with pytest.raises(ValueError):
        model_from_config({"type": "zero", "extra": 1})
