import math

import numpy as np
import pytest

from schedq.bernoulli_tail import ParamSeq, exact_tail_profile
from schedq.experiments import ks_two_sample
from schedq.perturbation import Degenerate, TwoSidedExp, TwoSidedPareto
from schedq.traffic import (
    MarginError,
    conditional_cov,
    count,
    decomposition_residual,
    early_late,
    generate_path,
    path_to_csv,
    sample_limit_rv,
    scan_pad,
)

PARETO = TwoSidedPareto(0.25, 2.0, 0.25, 2.0)
LAPLACE = TwoSidedExp.laplace(1.0)


def test_degenerate_path_times():
    g = np.random.default_rng(0)
    p = generate_path(Degenerate(), (0.0, 3.0), 0.3, g)
    assert np.allclose(p.entries_time, [0.3, 1.3, 2.3])
    assert list(p.entries_index) == [0, 1, 2]
    assert p.pad == 1


def test_count_basics():
    g = np.random.default_rng(0)
    p = generate_path(Degenerate(), (0.0, 3.0), 0.3, g)
    assert count(p, 1.5) == 2
    assert count(p, 0.0) == 0
    # right-continuity: the arrival at 1.3 is included at t = 1.3 exactly
    assert count(p, 1.3) == 2
    assert count(p, 1.3 - 1e-9) == 1
    with pytest.raises(MarginError):
        count(p, 3.5)


def test_entries_sorted_and_distinct():
    g = np.random.default_rng(5)
    p = generate_path(PARETO, (0.0, 50.0), None, g, eps=1e-6)
    assert np.all(np.diff(p.entries_time) >= 0.0)
    assert len(set(p.entries_index.tolist())) == p.entries_index.size
    assert np.all((p.entries_time > 0.0) & (p.entries_time <= 50.0))


def test_path_reproducible():
    a = generate_path(PARETO, (0.0, 10.0), 0.4, np.random.default_rng(7), eps=1e-6)
    b = generate_path(PARETO, (0.0, 10.0), 0.4, np.random.default_rng(7), eps=1e-6)
    assert np.array_equal(a.entries_time, b.entries_time)
    assert np.array_equal(a.scan_time, b.scan_time)


def test_scan_pad_certified():
    for model in (PARETO, LAPLACE):
        for eps in (1e-4, 1e-6, 1e-8):
            b = scan_pad(model, 10.0, eps)
            bound = 10.0 * (model.survival(b - 1.0) + model.cdf(-(b - 1.0)))
            assert bound <= eps
            if b > 2:
                loose = 10.0 * (model.survival(b - 2.0) + model.cdf(-(b - 2.0)))
                assert loose > eps  # smallest such integer
    assert scan_pad(Degenerate(), 100.0, 1e-12) == 1


def test_early_late_degenerate():
    g = np.random.default_rng(0)
    p = generate_path(Degenerate(), (0.0, 5.0), 0.3, g)
    for t in (0.0, 1.0, 2.5, 4.9):
        assert early_late(p, t) == (0, 0)
    with pytest.raises(MarginError):
        early_late(p, 5.1)


def test_early_late_disjoint_index_sets():
    g = np.random.default_rng(9)
    p = generate_path(PARETO, (-5.0, 15.0), None, g, eps=1e-6)
    t = 7.3
    sched = p.scan_index + p.u
    early_set = (sched > t) & (p.scan_time <= t)
    late_set = (sched <= t) & (p.scan_time > t)
    assert not np.any(early_set & late_set)
    e, l = early_late(p, t)
    assert e == int(early_set.sum()) and l == int(late_set.sum())


def test_degenerate_decomposition_value():
    g = np.random.default_rng(0)
    p = generate_path(Degenerate(), (0.0, 3.0), 0.3, g)
    # N(t) - t = -(t - floor(t)) + I(U <= t - floor(t)) for punctual arrivals
    t = 2.5
    assert count(p, t) - t == pytest.approx(0.5)
    assert decomposition_residual(p, t) == 0


@pytest.mark.parametrize("model", [PARETO, LAPLACE, Degenerate(),
                                   TwoSidedPareto(0.1, 1.5, 0.3, 2.5)])
def test_decomposition_identity_exact(model):
    g = np.random.default_rng(31)
    for k in range(25):
        lo = -float(g.integers(0, 4)) - float(g.random())
        hi = float(g.integers(18, 25)) + float(g.random())
        p = generate_path(model, (lo, hi), None, g, eps=1e-5)
        for t in (0.0, 5.0, 10.5, 17.25):
            assert decomposition_residual(p, t) == 0


def test_decomposition_invariant_under_window_enlargement():
    for window in ((0.0, 20.0), (-3.0, 25.0), (-8.0, 40.0)):
        g = np.random.default_rng(77)
        p = generate_path(PARETO, window, 0.6, g, eps=1e-6)
        assert decomposition_residual(p, 12.25) == 0


def test_unit_intensity():
    reps = 8000
    for t in (1.0, 5.0, 20.0):
        g = np.random.default_rng(int(t * 1000))
        vals = np.empty(reps)
        for k in range(reps):
            p = generate_path(PARETO, (0.0, t), None, g, eps=1e-4)
            vals[k] = count(p, t)
        se = vals.std(ddof=1) / math.sqrt(reps)
        assert abs(vals.mean() - t) <= 4.0 * se


def test_stationarity_of_unit_counts():
    reps = 4000
    g = np.random.default_rng(55)
    counts = {a: np.empty(reps) for a in (0.0, 0.33, 7.77)}
    for k in range(reps):
        p = generate_path(PARETO, (0.0, 9.0), None, g, eps=1e-4)
        for a in counts:
            counts[a][k] = count(p, a + 1.0) - count(p, a)
    for a in (0.33, 7.77):
        _, accept = ks_two_sample(counts[0.0], counts[a], level=0.01)
        assert accept


# --------------------------------------------------------------------------
# conditional covariance
# --------------------------------------------------------------------------

def test_conditional_cov_degenerate_zero():
    for n in (2, 5, 50):
        assert conditional_cov(Degenerate(), 0.3, n) == 0.0


def test_conditional_cov_nonpositive_everywhere():
    g = np.random.default_rng(3)
    for model in (PARETO, LAPLACE, TwoSidedPareto(0.05, 1.3, 0.4, 4.0)):
        for _ in range(5):
            u = float(g.uniform(0.05, 0.95))
            n = int(g.integers(2, 300))
            assert conditional_cov(model, u, n, eps=1e-10) <= 0.0


def test_conditional_cov_pareto_golden():
    cov = conditional_cov(PARETO, 0.5, 200)
    assert 200 ** 3 * abs(cov) == pytest.approx(1.015921381318425, rel=1e-9)
    # limit constant is the two-sided density coefficient alpha1*c1 + alpha2*c2 = 1
    assert 200 ** 3 * abs(cov) == pytest.approx(1.0, rel=0.05)


def test_conditional_cov_pareto_limit_from_above():
    v200 = 200 ** 3 * abs(conditional_cov(PARETO, 0.5, 200))
    v2000 = 2000 ** 3 * abs(conditional_cov(PARETO, 0.5, 2000))
    assert abs(v2000 - 1.0) < abs(v200 - 1.0)  # converging toward 1


def test_conditional_cov_laplace_rate():
    # exponential decay rate beta: log|cov(n)|/n approaches -beta
    r20 = math.log(abs(conditional_cov(LAPLACE, 0.5, 20))) / 20
    r40 = math.log(abs(conditional_cov(LAPLACE, 0.5, 40))) / 40
    assert abs(r40 + 1.0) < abs(r20 + 1.0)
    # frozen exact normalized values (lag sum scales as n*exp(-beta*(n-2))*K')
    n20 = abs(conditional_cov(LAPLACE, 0.5, 20)) / (20 * math.exp(-21.0))
    n40 = abs(conditional_cov(LAPLACE, 0.5, 40)) / (40 * math.exp(-41.0))
    assert n20 == pytest.approx(1.9886896225104194, rel=1e-9)
    assert n40 == pytest.approx(1.97311872752052, rel=1e-9)


def test_conditional_cov_validation():
    with pytest.raises(ValueError):
        conditional_cov(PARETO, 0.5, 1)
    with pytest.raises(ValueError):
        conditional_cov(PARETO, 1.5, 5)


def test_unconditional_cov_matches_integrated_conditional():
    """At integer lags E[count of (n-1,n] | U] = 1 for every U, so the
    U-induced term vanishes and the raw covariance must match the
    U-integrated conditional covariance."""
    n = 3
    reps = 25_000
    g = np.random.default_rng(808)
    d1 = np.empty(reps)
    dn = np.empty(reps)
    for k in range(reps):
        p = generate_path(PARETO, (0.0, float(n)), None, g, eps=1e-4)
        d1[k] = count(p, 1.0)
        dn[k] = count(p, float(n)) - count(p, float(n) - 1.0)
    prods = (d1 - d1.mean()) * (dn - dn.mean())
    cov_hat = prods.mean() * reps / (reps - 1)
    se = prods.std(ddof=1) / math.sqrt(reps)
    us = (np.arange(400) + 0.5) / 400.0
    cov_int = float(np.mean([conditional_cov(PARETO, u, n, eps=1e-8) for u in us]))
    assert abs(cov_hat - cov_int) <= 4.0 * se


# --------------------------------------------------------------------------
# limit variable sampler
# --------------------------------------------------------------------------

def test_sample_limit_rv_degenerate():
    g = np.random.default_rng(4)
    assert all(sample_limit_rv(Degenerate(), 0.0, g) == 0.0 for _ in range(50))
    vals = np.array([sample_limit_rv(Degenerate(), 0.5, g) for _ in range(4000)])
    assert set(np.unique(vals)) == {-0.5, 0.5}
    assert abs(float(np.mean(vals > 0)) - 0.5) < 4.0 * 0.5 / math.sqrt(4000)


def test_sample_limit_rv_validation():
    g = np.random.default_rng(4)
    with pytest.raises(ValueError):
        sample_limit_rv(PARETO, 1.0, g)


def test_limit_sampler_matches_direct_small():
    n, draws, s = 300, 2000, 0.25
    g = np.random.default_rng(99)
    direct = np.empty(draws)
    for k in range(draws):
        p = generate_path(PARETO, (0.0, n + s), None, g, eps=1e-4)
        direct[k] = count(p, n + s) - (n + s)
    sampled = np.array([sample_limit_rv(PARETO, s, g) for k in range(draws)])
    _, accept = ks_two_sample(direct, sampled, level=0.01)
    assert accept


def test_late_count_tail_dual_route():
    """L(0) given U=u is a Bernoulli sum with p_k = P(xi > k - u); its exact
    DP tail must match the empirical tail of the path-free sampler."""
    from schedq.traffic import _end_count

    u = 0.3
    k = np.arange(1, 20001, dtype=float)
    seq = ParamSeq.from_probs(PARETO.survival(k - u))
    prof = exact_tail_profile(seq, 12)
    draws = 30_000
    g = np.random.default_rng(11)
    samples = np.array([_end_count(PARETO, u, g, "late", 1e-10) for _ in range(draws)])
    for x in (1, 2):
        p_exact = prof.tail[x + 1]
        p_hat = float(np.mean(samples > x))
        se = math.sqrt(p_exact * (1.0 - p_exact) / draws)
        assert abs(p_hat - p_exact) <= 4.0 * se
    # normalized exact-tail slopes sit in the band around -alpha1 = -2
    slopes = [float(prof.log_tail[x + 1]) / (x * math.log(x)) for x in (4, 6, 8)]
    assert all(-2.5 < s < -1.5 for s in slopes)


def test_path_csv_export():
    g = np.random.default_rng(0)
    p = generate_path(Degenerate(), (0.0, 3.0), 0.3, g)
    text = path_to_csv(p)
    lines = text.strip().split("\n")
    assert lines[0].startswith("# u=0.3")
    assert lines[1] == "schedule_index,arrival_time"
    assert len(lines) == 5
