#!/usr/bin/env python3
"""
f-DP 审计器测试 / f-DP Auditor Tests
"""

import math

import numpy as np
import pytest
from scipy.stats import norm

from dp_forensics_toolkit.attacks import MembershipTest, phi_lap, prio_membership_test
from dp_forensics_toolkit.auditor import (
    AuditReport,
    ConfusionMatrix,
    TradeoffCurve,
    audit_epsilon_lb,
    audit_from_confusion,
    claimed_curve,
    delta_of_f,
    draw_secret_bits,
    eps_of_f,
    f_eps_delta,
    f_gauss,
    f_laplace,
    gaussian_claim_epsilon,
    gaussian_mu_for_epsilon,
    laplace_claim_epsilon,
    posterior_p_f,
    theta_star,
    tradeoff_table,
)
from dp_forensics_toolkit.exceptions import DegenerateSplit, PreconditionViolation, Unbounded
from dp_forensics_toolkit.float_mech import LaplaceParams, sample_laplace
from dp_forensics_toolkit.sketch_mech import SketchConfig, sym_ohe

MC = 20000
ALPHA_GRID = np.linspace(0.0, 1.0, 1001)


def gaussian_delta_closed_form(mu, eps):
    """δ(ε) of μ-GDP: Φ(-ε/μ + μ/2) - e^ε Φ(-ε/μ - μ/2)"""
    return norm.cdf(-eps / mu + mu / 2) - math.exp(eps) * norm.cdf(-eps / mu - mu / 2)


class TestTradeoffCurves:
    def test_reference_values(self):
        assert f_gauss(0.0, 0.3) == pytest.approx(0.7)
        assert f_eps_delta(0.0, 0.0, 0.25) == pytest.approx(0.75)
        assert f_eps_delta(1.0, 0.0, 0.1) == pytest.approx(1.0 - math.e * 0.1)
        assert f_laplace(1.0, 0.25) == pytest.approx(math.exp(-1.0))
        assert f_laplace(1.0, 0.0) == 1.0

    @pytest.mark.parametrize("family,theta", [
        ("eps_delta", 0.5), ("eps_delta", 3.0), ("gaussian", 0.5), ("gaussian", 2.0),
        ("laplace", 0.5), ("laplace", 2.0),
    ])
    def test_sanity(self, family, theta):
        curve = TradeoffCurve(family, theta)
        f = curve(ALPHA_GRID)
        assert np.all(f <= 1.0 - ALPHA_GRID + 1e-12)
        assert np.all(np.diff(f) <= 1e-12)
        mid = curve(0.5 * (ALPHA_GRID[:-1] + ALPHA_GRID[1:]))
        assert np.all(mid <= 0.5 * (f[:-1] + f[1:]) + 1e-12)

    def test_complement_is_one_minus_eval(self):
        for family in ("eps_delta", "gaussian", "laplace"):
            curve = TradeoffCurve(family, 1.3)
            a = np.linspace(0.01, 0.99, 50)
            assert np.allclose(curve.complement(a), 1.0 - curve.eval(a), atol=1e-12)

    def test_scalar_in_scalar_out(self):
        assert isinstance(TradeoffCurve("gaussian", 1.0)(0.2), float)

    def test_validation(self):
        with pytest.raises(PreconditionViolation):
            TradeoffCurve("nope", 1.0)
        with pytest.raises(PreconditionViolation):
            TradeoffCurve("gaussian", -1.0)

    def test_laplace_matches_neyman_pearson_oracle(self):
        # 似然比检验的蒙特卡洛曲线 / Monte-Carlo curve of the likelihood-ratio test
        rng = np.random.Generator(np.random.PCG64(0))
        n = 10**6
        for mu in (0.5, 1.0, 2.0, 4.0):
            x0 = rng.laplace(0.0, 1.0, n)
            x1 = rng.laplace(mu, 1.0, n)
            curve = TradeoffCurve("laplace", mu)
            for threshold in (0.1, mu / 2, mu - 0.1):
                alpha = float(np.mean(x0 > threshold))
                beta = float(np.mean(x1 <= threshold))
                se = math.sqrt(alpha * (1 - alpha) / n) * math.exp(mu) + math.sqrt(beta * (1 - beta) / n)
                assert abs(curve(alpha) - beta) <= 3 * se + 1e-3

    def test_gaussian_matches_neyman_pearson_oracle(self):
        rng = np.random.Generator(np.random.PCG64(1))
        n = 10**6
        for mu in (0.5, 1.0, 2.0):
            x0 = rng.standard_normal(n)
            x1 = rng.standard_normal(n) + mu
            curve = TradeoffCurve("gaussian", mu)
            for threshold in (0.0, mu / 2, mu):
                alpha = float(np.mean(x0 > threshold))
                beta = float(np.mean(x1 <= threshold))
                assert abs(curve(alpha) - beta) <= 1e-2


class TestConversion:
    @pytest.mark.parametrize("eps", [0.0, 0.5, 1.0, 2.0, 4.0, 8.0])
    @pytest.mark.parametrize("delta", [0.0, 1e-5, 1e-2])
    def test_conjugacy_round_trip(self, eps, delta):
        assert abs(delta_of_f(TradeoffCurve("eps_delta", eps, delta), eps) - delta) <= 1e-6

    @pytest.mark.parametrize("mu,eps", [(0.5, 0.5), (1.0, 1.0), (2.0, 3.0), (1.0, 4.377)])
    def test_gaussian_matches_closed_form(self, mu, eps):
        assert delta_of_f(TradeoffCurve("gaussian", mu), eps) == pytest.approx(
            gaussian_delta_closed_form(mu, eps), abs=1e-9
        )

    def test_dominance_transfer(self):
        weak, strong = TradeoffCurve("gaussian", 2.0), TradeoffCurve("gaussian", 1.0)
        assert np.all(strong(ALPHA_GRID) >= weak(ALPHA_GRID))
        for eps in (0.0, 0.5, 1.0, 2.0):
            assert delta_of_f(strong, eps) <= delta_of_f(weak, eps)

    def test_eps_of_f_inverts_delta_of_f(self):
        curve = TradeoffCurve("eps_delta", 2.5, 1e-5)
        assert eps_of_f(curve, 1e-5) == pytest.approx(2.5, abs=1e-5)

    def test_laplace_family_is_pure(self):
        assert eps_of_f(TradeoffCurve("laplace", 1.7), 0.0) == pytest.approx(1.7, abs=1e-5)

    def test_unbounded_below_search_ceiling(self):
        with pytest.raises(Unbounded):
            eps_of_f(TradeoffCurve("gaussian", 5.0), 1e-5, eps_max=1.0)

    def test_claim_helpers(self):
        assert gaussian_claim_epsilon(1.0, 1.0, 1e-5) == pytest.approx(4.377, abs=2e-3)
        assert laplace_claim_epsilon(2.0, 1.0) == 0.5
        mu = gaussian_mu_for_epsilon(4.377, 1e-5)
        assert mu == pytest.approx(1.0, abs=1e-3)
        assert claimed_curve("laplace", 1.0).theta == 1.0


class TestConfusionAndPosterior:
    def test_from_predictions(self):
        c = ConfusionMatrix.from_predictions([0, 0, 1, 1, 1], [0, 1, 1, 0, 1])
        assert (c.tn, c.fp, c.fn, c.tp) == (1, 1, 1, 2)
        assert c.total == 5
        assert c.accuracy == pytest.approx(0.6)

    def test_degenerate_split(self):
        with pytest.raises(DegenerateSplit):
            ConfusionMatrix(tn=10, fp=0, fn=0, tp=0).validate()

    def test_posterior_mc_floor(self):
        with pytest.raises(PreconditionViolation):
            posterior_p_f(ConfusionMatrix(5, 5, 5, 5), TradeoffCurve("gaussian", 1.0), mc_samples=100)

    def test_constant_attack_rejects_nothing(self):
        c = ConfusionMatrix(tn=500, fp=0, fn=500, tp=0)
        assert theta_star("eps_delta", c, 0.05, MC) == 0.0
        assert posterior_p_f(c, TradeoffCurve("laplace", 1.0), MC) > 0.05
        assert posterior_p_f(c, TradeoffCurve("laplace", 3.0), MC) > 0.5

    @pytest.mark.parametrize("family", ["eps_delta", "gaussian", "laplace"])
    @pytest.mark.parametrize("tn,fn", [(104, 96), (96, 104), (520, 480), (300, 700)])
    def test_constant_attack_with_unequal_classes(self, family, tn, fn):
        assert theta_star(family, ConfusionMatrix(tn=tn, fp=0, fn=fn, tp=0), 0.05, MC) == 0.0
        assert theta_star(family, ConfusionMatrix(tn=0, fp=tn, fn=0, tp=fn), 0.05, MC) == 0.0

    def test_theta_star_monotone_in_tpr(self):
        thetas = [theta_star("laplace", ConfusionMatrix(500, 0, 500 - tp, tp), 0.05, MC) for tp in (100, 250, 400)]
        assert thetas == sorted(thetas)
        assert thetas[0] > 0.0

    def test_eps_lb_non_decreasing_in_gamma(self):
        c = ConfusionMatrix(tn=480, fp=20, fn=150, tp=350)
        eps = [audit_from_confusion(c, "eps_delta", g, 0.0, 0, MC)[1] for g in (0.01, 0.05, 0.2)]
        assert eps == sorted(eps)

    def test_perfect_attack_stays_below_ceiling(self):
        c = ConfusionMatrix(tn=500, fp=0, fn=0, tp=500)
        theta, eps_lb, saturated = audit_from_confusion(c, "laplace", 0.05, 0.0, 0, MC)
        assert eps_lb > 3.0
        assert not saturated
        assert theta < 32.0


class TestEstimator:
    def test_secret_bits(self):
        bits = draw_secret_bits(1000, 3)
        assert bits.size == 1000 and 400 < bits.sum() < 600
        assert np.array_equal(bits, draw_secret_bits(1000, 3))

    def test_preconditions(self):
        mech = lambda x, s: x  # noqa: E731
        test = MembershipTest(lambda r: 0, "zero")
        with pytest.raises(PreconditionViolation):
            audit_epsilon_lb(mech, test, 0, 1, 50, "eps_delta", mc_samples=MC)
        with pytest.raises(PreconditionViolation):
            audit_epsilon_lb(mech, test, 1, 1, 200, "eps_delta", mc_samples=MC)

    def test_constant_attack_no_violation(self):
        mech = lambda x, s: x  # noqa: E731
        report = audit_epsilon_lb(mech, MembershipTest(lambda r: 0, "zero"), 0, 1, 200, "eps_delta",
                                  mc_samples=MC, claimed_epsilon=1.0)
        assert report.eps_lb == 0.0
        assert report.verdict == "NO-VIOLATION"

    def test_laplace_violation(self):
        lam = 1.0

        def mechanism(x, stream):
            return sample_laplace(stream, LaplaceParams(mu=float(x), lam=lam))

        test = MembershipTest(lambda y: phi_lap(y, 0.0, lam), "phi_lap")
        report = audit_epsilon_lb(mechanism, test, 0.0, 1.0, 1000, "laplace", gamma=0.05,
                                  master_seed=0, mc_samples=MC, claimed_epsilon=1.0, threads=4)
        assert report.verdict == "VIOLATION"
        assert report.eps_lb > 3.0
        assert report.confusion.fp == 0
        assert 0.12 < report.confusion.fnr < 0.35
        assert list(report.predictions.columns) == ["run_index", "secret_bit", "prediction"]

    def test_threads_do_not_change_results(self):
        def mechanism(x, stream):
            return sym_ohe(x, SketchConfig(epsilon=1.0, d=2), stream)

        test = MembershipTest(lambda y: prio_membership_test(y, "both_bits"), "both_bits")
        one = audit_epsilon_lb(mechanism, test, 1, 2, 300, "eps_delta", mc_samples=MC, threads=1)
        four = audit_epsilon_lb(mechanism, test, 1, 2, 300, "eps_delta", mc_samples=MC, threads=4)
        assert one.replay_dict() == four.replay_dict()

    def test_symohe_soundness(self):
        # 替换相邻下的真实保证为 2ε / The replacement-model guarantee is 2ε
        def mechanism(x, stream):
            return sym_ohe(x, SketchConfig(epsilon=1.0, d=2), stream)

        test = MembershipTest(lambda y: prio_membership_test(y, "both_bits"), "both_bits")
        violations = 0
        for seed in range(10):
            report = audit_epsilon_lb(mechanism, test, 1, 2, 1000, "eps_delta", master_seed=seed,
                                      mc_samples=MC, claimed_epsilon=2.0)
            violations += report.is_violation
        assert violations <= 1

    def test_report_round_trip(self):
        c = ConfusionMatrix(400, 100, 100, 400)
        report = AuditReport(eps_lb=1.2, delta=0.0, gamma=0.05, family="eps_delta", theta_star=1.2,
                             confusion=c, n_runs=1000, master_seed=5, mc_samples=MC, claimed_epsilon=1.0)
        data = report.to_dict()
        assert list(data)[:13] == ["eps_lb", "delta", "gamma", "family", "theta_star", "tn", "fp", "fn",
                                   "tp", "n_runs", "master_seed", "mc_samples", "verdict"]
        assert data["verdict"] == "VIOLATION"
        assert AuditReport.from_dict(data).replay_dict() == report.replay_dict()

    def test_tradeoff_table(self):
        c = ConfusionMatrix(450, 50, 100, 400)
        report = AuditReport(eps_lb=1.0, delta=0.0, gamma=0.05, family="eps_delta", theta_star=1.0,
                             confusion=c, n_runs=1000, master_seed=0, mc_samples=MC)
        table = tradeoff_table(report, TradeoffCurve("eps_delta", 2.0))
        assert list(table.columns) == ["alpha", "f_lb", "f_claimed"]
        assert len(table) == 201
        assert np.all(table["f_claimed"] <= table["f_lb"] + 1e-12)
