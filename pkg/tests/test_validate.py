import json
import math

import numpy as np
import pytest

from spgen.errors import InvalidParameterError
from spgen.grid import Field, Grid2D, TorusExp, eval_cov
from spgen.rng import RngStream
from spgen.validate import (
    batch_means,
    chain_mean_report,
    dispersion_test,
    empirical_cov_at_lag,
    make_report,
    pair_probability_oracle,
    report_lines,
    reports_to_json,
    two_sample_z,
)


def test_make_report_pass_and_fail():
    good = make_report("x", estimate=1.01, std_error=0.01, target=1.0)
    assert good.passed and abs(good.z_score - 1.0) < 1e-12
    bad = make_report("x", estimate=1.2, std_error=0.01, target=1.0)
    assert not bad.passed
    assert "FAIL" in bad.line() and "pass" in good.line()


def test_make_report_requires_positive_se():
    with pytest.raises(InvalidParameterError):
        make_report("exact", estimate=2.0, std_error=0.0, target=2.0)


def test_batch_means_iid_matches_naive_se():
    x = RngStream(0).std_normals(50_000)
    mean, se = batch_means(x, n_batches=50)
    assert mean == pytest.approx(x.mean())
    naive = x.std(ddof=1) / math.sqrt(len(x))
    assert 0.7 * naive < se < 1.4 * naive


def test_batch_means_inflates_for_correlated_chain():
    # AR(1) with strong positive correlation
    rng = np.random.default_rng(1)
    n, phi = 50_000, 0.95
    eps = rng.standard_normal(n)
    x = np.empty(n)
    x[0] = eps[0]
    for i in range(1, n):
        x[i] = phi * x[i - 1] + eps[i]
    _, se = batch_means(x, n_batches=50)
    naive = x.std(ddof=1) / math.sqrt(n)
    assert se > 2 * naive


def test_batch_means_needs_enough_samples():
    with pytest.raises(InvalidParameterError):
        batch_means(np.arange(30), n_batches=50)


def test_chain_mean_report_discards_burn_in():
    # far-off transient followed by small iid noise around the target;
    # burn-in removal is what makes the report pass
    noise = RngStream(11).std_normals(900) * 0.05
    trace = np.concatenate([np.full(100, 50.0), 10.0 + noise])
    rep = chain_mean_report("chain", trace, target=10.0, burn_in_fraction=0.1)
    assert rep.estimate == pytest.approx(10.0, abs=0.05)
    assert rep.passed
    biased = chain_mean_report("chain", trace, target=10.0, burn_in_fraction=0.0)
    assert biased.estimate > 13.0


def test_empirical_cov_at_lag_white_noise():
    k = 400
    fields = RngStream(2).std_normals((k, 16, 16))
    rep0 = empirical_cov_at_lag(fields, (0, 0), target=1.0, name="var")
    rep1 = empirical_cov_at_lag(fields, (1, 0), target=0.0, name="lag10")
    assert rep0.passed and rep1.passed
    assert abs(rep0.estimate - 1.0) < 3 * rep0.std_error


def test_empirical_cov_at_lag_known_correlation():
    # X[j,i] = (Z[j,i] + Z[j,i+1])/sqrt(2) has lag-(1,0) covariance 1/2
    k = 600
    z = RngStream(3).std_normals((k, 20, 21))
    fields = (z[:, :, :-1] + z[:, :, 1:]) / math.sqrt(2)
    rep = empirical_cov_at_lag(fields, (1, 0), target=0.5, name="ma")
    assert rep.passed
    rep_neg = empirical_cov_at_lag(fields, (-1, 0), target=0.5, name="ma-neg")
    assert rep_neg.passed


def test_empirical_cov_accepts_field_objects():
    g = Grid2D(nx=8, ny=8)
    fields = [Field(g, RngStream(4, i).std_normals((8, 8))) for i in range(150)]
    rep = empirical_cov_at_lag(fields, (0, 1), target=0.0, name="objs")
    assert rep.passed


def test_empirical_cov_requires_enough_realizations():
    with pytest.raises(InvalidParameterError):
        empirical_cov_at_lag(np.zeros((50, 4, 4)), (0, 0), target=0.0, name="few")


def test_dispersion_poisson_is_near_one():
    counts = RngStream(5).poissons(50.0, 10_000)
    rep = dispersion_test(counts)
    assert rep.passed
    assert 0.9 < rep.estimate < 1.1


def test_dispersion_flags_overdispersion():
    rng = np.random.default_rng(6)
    lam = rng.gamma(2.0, 25.0, size=5_000)
    counts = rng.poisson(lam)
    rep = dispersion_test(counts)
    assert rep.estimate > 1.3
    assert not rep.passed


def test_dispersion_needs_1000_counts():
    with pytest.raises(InvalidParameterError):
        dispersion_test(np.ones(999))


def test_pair_probability_oracle_edges():
    assert pair_probability_oracle(0.0, 100) == (0.0, 0.0)
    assert pair_probability_oracle(math.sqrt(2), 100) == (1.0, 0.0)


def test_pair_probability_oracle_closed_form():
    # P(|U-V| < r) for two uniform points in the unit square has the closed
    # form pi r^2 - 8 r^3 / 3 + r^4 / 2 for r <= 1
    r = 0.2
    q, se = pair_probability_oracle(r, 2_000_000, stream=RngStream(7))
    target = math.pi * r**2 - 8 * r**3 / 3 + r**4 / 2
    assert se < 2.5e-4
    assert abs(q - target) < 4 * se


def test_two_sample_z():
    assert two_sample_z(1.0, 0.1, 1.0, 0.1) == 0.0
    assert two_sample_z(2.0, 0.3, 1.0, 0.4) == pytest.approx(2.0)


def test_report_serialization():
    reps = [make_report("a", 1.0, 0.1, 1.0), make_report("b", 5.0, 0.1, 1.0)]
    text = report_lines(reps)
    assert text.count("\n") == 1
    blob = json.dumps(reports_to_json(reps))
    parsed = json.loads(blob)
    assert parsed[0]["name"] == "a" and parsed[1]["passed"] is False


def test_torus_cov_against_model(seed=8):
    # estimator against the analytic lag covariance of a wrapped model
    from spgen.circulant import plan_torus, sample_torus

    n, k = 16, 400
    model = TorusExp(c=8.0, alpha=1.0)
    plan = plan_torus(n, model)
    fields = np.stack([
        sample_torus(plan, RngStream(seed, i)).values for i in range(k)
    ])
    target = eval_cov(model, (1.0 / n, 0.0))
    rep = empirical_cov_at_lag(fields, (1, 0), target=target, name="torus")
    assert rep.passed
