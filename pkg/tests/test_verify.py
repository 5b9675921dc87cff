import json
import math

import pytest
from scipy import special

from matvar.errors import DegenerateWeights, GammaDomainError
from matvar.gammafn import log_beta_p, log_mvgamma
from matvar.samplers import RngStream
from matvar.verify import (
    DEFAULT_CONFIG,
    ProposalConfig,
    VerifyReport,
    closed_form_log,
    family_name,
    mc_integral,
    quadrature_beta1,
    quadrature_beta2,
    quadrature_gamma,
    reports_to_json,
    run_check,
    run_suite,
)


def rel(a, b):
    return abs(math.expm1(a - b))


class TestQuadrature:
    @pytest.mark.parametrize("p,alpha", [(1, 0.8), (1, 4.0), (2, 1.5), (2, 2.75)])
    def test_gamma_real(self, p, alpha):
        est = quadrature_gamma(p, alpha)
        assert est.method == "quadrature" and est.seed is None
        assert rel(est.value, log_mvgamma(p, alpha)) <= 1e-8

    def test_gamma_p1_matches_scipy(self):
        assert quadrature_gamma(1, 3.3).value == pytest.approx(special.gammaln(3.3), abs=1e-9)

    def test_gamma_complex_p1(self):
        assert rel(quadrature_gamma(1, 2.5, "complex").value, log_mvgamma(1, 2.5, "complex")) <= 1e-8

    @pytest.mark.slow
    def test_gamma_complex_p2(self):
        assert rel(quadrature_gamma(2, 2.5, "complex").value, log_mvgamma(2, 2.5, "complex")) <= 1e-4

    @pytest.mark.parametrize("p,a,b", [(1, 0.7, 1.3), (2, 2.0, 2.0), (2, 1.25, 1.75), (2, 3.0, 1.5)])
    def test_beta1_real(self, p, a, b):
        assert rel(quadrature_beta1(p, a, b).value, log_beta_p(p, a, b)) <= 1e-8

    def test_beta1_p1_matches_scipy(self):
        assert quadrature_beta1(1, 2.0, 3.0).value == pytest.approx(special.betaln(2, 3), abs=1e-10)

    def test_beta2_real(self):
        assert rel(quadrature_beta2(2, 2.5, 3.0).value, log_beta_p(2, 2.5, 3.0)) <= 1e-8

    def test_domain(self):
        with pytest.raises(GammaDomainError):
            quadrature_gamma(2, 0.5)
        with pytest.raises(ValueError):
            quadrature_gamma(3, 3.0)


class TestMonteCarlo:
    def test_gamma_real_p3(self):
        est = mc_integral("gamma_real", 3, 3.0, n=200_000, rng=RngStream(1))
        assert est.n_samples == 200_000 and est.seed == 1
        assert abs(est.value - log_mvgamma(3, 3.0)) <= 4 * est.std_error
        assert 0 < est.std_error < 0.01

    def test_beta1_complex_p2(self):
        est = mc_integral("beta1_complex", 2, 3.0, 3.0, n=200_000, rng=RngStream(2))
        assert abs(est.value - log_beta_p(2, 3.0, 3.0, "complex")) <= 4 * est.std_error

    def test_same_seed_same_bits(self):
        a = mc_integral("gamma_complex", 3, 4.0, n=50_000, rng=RngStream(5, 2))
        b = mc_integral("gamma_complex", 3, 4.0, n=50_000, rng=RngStream(5, 2))
        assert a == b

    def test_seed_changes_estimate(self):
        a = mc_integral("gamma_real", 2, 2.0, n=20_000, rng=RngStream(5))
        b = mc_integral("gamma_real", 2, 2.0, n=20_000, rng=RngStream(6))
        assert a.value != b.value

    def test_result_independent_of_worker_count(self, monkeypatch):
        kw = dict(n=150_000, rng=RngStream(3), shard_size=20_000)
        one = mc_integral("gamma_real", 4, 3.0, workers=1, **kw)
        four = mc_integral("gamma_real", 4, 3.0, workers=4, **kw)
        monkeypatch.setenv("MATVAR_THREADS", "3")
        env = mc_integral("gamma_real", 4, 3.0, **kw)
        assert one == four == env

    def test_std_error_scales_with_n(self):
        small = mc_integral("gamma_real", 3, 3.0, n=40_000, rng=RngStream(8))
        big = mc_integral("gamma_real", 3, 3.0, n=160_000, rng=RngStream(8))
        assert big.std_error / small.std_error == pytest.approx(0.5, rel=0.25)

    @pytest.mark.parametrize("family,beta,proposal", [
        ("gamma_real", None, ProposalConfig(variance_inflation=0.02)),
        ("beta1_real", 3.0, ProposalConfig(beta_shape=300.0)),
    ])
    def test_degenerate_weights(self, family, beta, proposal):
        with pytest.raises(DegenerateWeights) as info:
            mc_integral(family, 4, 3.0, beta, n=20_000, rng=RngStream(1), proposal=proposal)
        assert info.value.ess < 200

    @pytest.mark.parametrize("kw", [
        dict(family="gamma_real", p=5, alpha=4.0),
        dict(family="gamma_real", p=3, alpha=3.0, n=100),
        dict(family="beta2_real", p=2, alpha=3.0, beta=3.0),
        dict(family="beta1_real", p=2, alpha=3.0),
    ])
    def test_rejects_bad_requests(self, kw):
        with pytest.raises(ValueError):
            mc_integral(**kw)


class TestSuite:
    def test_family_names(self):
        assert family_name("gamma", "complex") == "gamma_complex"
        assert family_name("beta") == "beta1_real"
        assert family_name("beta2_real") == "beta2_real"

    def test_closed_form_log(self):
        assert closed_form_log("gamma_real", 2, 1.5) == pytest.approx(math.log(math.pi / 2))
        with pytest.raises(ValueError):
            closed_form_log("beta1_real", 2, 2.0)

    def test_quadrature_check(self):
        rep = run_check({"family": "gamma_real", "p": 2, "alpha": 1.5})
        assert rep.oracle == "quadrature" and rep.passed and rep.rel_error <= 1e-4

    def test_mc_check(self):
        rep = run_check({"family": "gamma_real", "p": 3, "alpha": 3.0, "n": 50_000, "seed": 4})
        assert rep.oracle == "mc" and rep.passed
        assert rep.discrepancy_sigma <= 4 and rep.seed == 4

    def test_errors_are_recorded(self):
        rep = run_check({"family": "gamma_real", "p": 3, "alpha": 0.5})
        assert not rep.passed and "GammaDomainError" in rep.error
        rep = run_check({"family": "gamma_real", "p": 2, "alpha": 3.0, "oracle": "oracle"})
        assert not rep.passed and "unknown oracle" in rep.error

    def test_underpowered_mc_fails(self):
        # a check whose standard error exceeds the power requirement must fail
        rep = run_check({"family": "gamma_real", "p": 3, "alpha": 3.0, "n": 20_000,
                         "max_std_error": 1e-9})
        assert not rep.passed

    @pytest.mark.parametrize("config", [[], {"checks": {}}, {"checks": [{"family": "gamma_real"}]}])
    def test_bad_config(self, config):
        with pytest.raises(ValueError):
            run_suite(config)

    def test_empty_suite(self):
        assert run_suite({"checks": []}) == []

    def test_json(self):
        reps = [VerifyReport("gamma_real", 1, {"alpha": 2.0}, "quadrature", passed=True)]
        out = json.loads(reports_to_json(reps))
        assert out[0]["family"] == "gamma_real" and out[0]["passed"] is True

    def test_default_config_shape(self):
        checks = DEFAULT_CONFIG["checks"]
        assert {c["oracle"] for c in checks} == {"quadrature", "mc"}
        assert all(c["p"] <= 2 for c in checks if c["oracle"] == "quadrature")
        assert all(c["n"] >= 10**6 for c in checks if c["oracle"] == "mc")

    @pytest.mark.slow
    def test_default_suite_passes(self):
        reports = run_suite()
        assert all(r.passed for r in reports), [r for r in reports if not r.passed]
