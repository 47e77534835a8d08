"""Generative-model tests: tau maps, tier win probabilities with their
analytic and Monte Carlo oracles, copula sampling laws, cutpoint
calibration, and design-input estimation."""

import math

import numpy as np
import pytest
from scipy import integrate
from scipy.stats import kendalltau, kstest

from winclust.generative import (
    ClusterSizeSpec,
    CompositeGenSpec,
    OrdinalGenSpec,
    calibrate_cutpoints,
    copula_from_tau,
    estimate_design_inputs,
    frailty_from_tau,
    hospitalization_tier_prob,
    latent_icc,
    mortality_tier_prob,
    ordinal_marginals,
    pair_win_prob,
    sample_trial,
    tau_from_copula,
    tau_from_frailty,
    _positive_stable,
    _composite_observed,
    _logistic_marginal,
)
from winclust.wincore import tally
from winclust import estimate

PAPER_PI0 = (0.217, 0.093, 0.173, 0.241, 0.036, 0.241)


def base_composite(**kw):
    args = dict(
        lambda0_h=0.10,
        lambda0_d=0.08,
        lambda0_c=0.03,
        eta_h=0.3,
        eta_d=0.3,
        eta_c=0.15,
        nu_frailty=7.5,
        phi_copula=1.0,
        q=0.5,
        cluster_size=ClusterSizeSpec(50),
    )
    args.update(kw)
    return CompositeGenSpec(**args)


class TestTauMaps:
    def test_frailty_values(self):
        assert tau_from_frailty(7.5) == pytest.approx(0.0625, abs=0)
        assert frailty_from_tau(0.0625) == pytest.approx(7.5, rel=1e-14)

    def test_copula_values(self):
        assert tau_from_copula(1.0) == 0.0
        assert tau_from_copula(3.0) == pytest.approx(2.0 / 3.0, rel=1e-15)
        assert copula_from_tau(2.0 / 3.0) == pytest.approx(3.0, rel=1e-14)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            tau_from_copula(0.5)
        with pytest.raises(ValueError):
            frailty_from_tau(1.5)


class TestMortalityTier:
    def test_symmetric_no_censoring(self):
        assert mortality_tier_prob(0.08, 0.0, 0.08, 0.0) == pytest.approx(0.5)

    def test_direct_substitution(self):
        assert mortality_tier_prob(0.08, 0.03, 0.08, 0.03) == pytest.approx(
            0.08 / 0.22, rel=1e-14
        )

    def test_no_opposing_hazard(self):
        assert mortality_tier_prob(0.08, 0.03, 0.0, 0.03) == 0.0

    def test_zero_denominator(self):
        with pytest.raises(ValueError):
            mortality_tier_prob(0.0, 0.0, 0.0, 0.0)


class TestHospitalizationTier:
    def test_independence_closed_form(self):
        """phi = 1 factorizes through exponential algebra; cross-check with
        an independently derived race product."""
        h1, d1, c1 = 0.10, 0.08, 0.03
        h2, d2, c2 = 0.13, 0.05, 0.04
        got = hospitalization_tier_prob((h1, d1, c1), (h2, d2, c2), 1.0)
        c = c1 + c2
        expected = (c / (c + d1 + d2)) * (h2 / (h1 + h2 + c + d1 + d2))
        assert got == pytest.approx(expected, rel=1e-14)

    def test_adaptive_matches_direct_2d_quadrature(self):
        """The reduced 1-D integral equals the raw (t1 <= t2) double
        integral of hazard x survivors x censoring density."""
        h1, d1, c1 = 0.10, 0.08, 0.03
        h2, d2, c2 = 0.12, 0.06, 0.05
        phi = 2.3

        def survivor(t1, t2, h, d):
            return math.exp(-(((h * t1) ** phi + (d * t2) ** phi) ** (1 / phi)))

        def hosp_hazard(t1, t2, h, d):
            return (
                h
                * (h * t1) ** (phi - 1)
                * ((h * t1) ** phi + (d * t2) ** phi) ** (1 / phi - 1)
            )

        c = c1 + c2

        def inner(t2):
            val, _ = integrate.quad(
                lambda t1: hosp_hazard(t1, t2, h2, d2)
                * survivor(t1, t2, h1, d1)
                * survivor(t1, t2, h2, d2),
                0.0,
                t2,
                limit=200,
            )
            return val * c * math.exp(-c * t2)

        direct, _ = integrate.quad(inner, 0.0, np.inf, limit=400)
        got = hospitalization_tier_prob(
            (h1, d1, c1), (h2, d2, c2), phi, method="adaptive", tol=1e-10
        )
        assert got == pytest.approx(direct, abs=1e-7)
        fixed = hospitalization_tier_prob(
            (h1, d1, c1), (h2, d2, c2), phi, method="fixed", nodes=64
        )
        assert fixed == pytest.approx(got, abs=1e-9)

    def test_zero_opponent_hazard(self):
        got = hospitalization_tier_prob((0.1, 0.08, 0.03), (0.0, 0.06, 0.05), 2.0)
        assert got == pytest.approx(0.0, abs=1e-12)

    def test_exchangeable_symmetry(self):
        args = ((0.1, 0.08, 0.03), (0.1, 0.08, 0.03))
        for phi in (1.0, 1.7, 3.0):
            a = hospitalization_tier_prob(args[0], args[1], phi)
            b = hospitalization_tier_prob(args[1], args[0], phi)
            assert a == pytest.approx(b, rel=1e-12)

    def test_quadrature_vs_monte_carlo(self):
        """Conditional win probabilities agree with a pure simulation of the
        same conditional law within 3 MC standard errors."""
        spec = base_composite(phi_copula=3.0)
        rng = np.random.default_rng(5)
        n = 400_000
        gs, go = 1.3, 0.8
        arms_s, arms_o = 1.0, 0.0
        # simulate subject pairs at fixed frailties/arms and classify
        t_s, e_s = _composite_observed(
            spec, np.full(n, arms_s), np.full(n, gs), rng
        )
        t_o, e_o = _composite_observed(
            spec, np.full(n, arms_o), np.full(n, go), rng
        )
        # death tier win for self: opponent died strictly first in window
        win_mort = (e_o[:, 0] == 1) & (t_o[:, 0] < t_s[:, 0])
        from winclust._kernels_np import paired_sign

        kinds = np.zeros(2, dtype=np.int8)
        sign = paired_sign(t_s, e_s, t_o, e_o, kinds)
        p_win_mc = (sign == 1).mean()
        se = math.sqrt(p_win_mc * (1 - p_win_mc) / n)
        p_win = float(pair_win_prob(spec, arms_s, arms_o, gs, go))
        assert abs(p_win - p_win_mc) < 3 * se
        assert win_mort.mean() == pytest.approx(
            float(
                mortality_tier_prob(
                    spec.hazards(arms_s, gs)[1],
                    spec.hazards(arms_s, gs)[2],
                    spec.hazards(arms_o, go)[1],
                    spec.hazards(arms_o, go)[2],
                )
            ),
            abs=3 * se,
        )


class TestStableAndCopulaSampling:
    def test_laplace_transform(self):
        rng = np.random.default_rng(3)
        for alpha in (1.0 / 3.0, 0.5, 0.8):
            s = _positive_stable(alpha, rng, 1_000_000)
            for x in (0.5, 1.0, 2.0):
                emp = np.exp(-x * s).mean()
                tgt = math.exp(-(x**alpha))
                assert abs(emp - tgt) < 4e-3

    def test_marginal_death_law(self):
        """T_death given (arm, frailty) is exponential with the model rate
        (KS distance < 0.01 at 1e5 draws)."""
        spec = base_composite(phi_copula=2.5)
        rng = np.random.default_rng(9)
        n = 100_000
        gamma, arm = 1.4, 1.0
        from winclust.generative import _draw_event_times

        h, d, _ = spec.hazards(arm, np.full(n, gamma))
        th, td = _draw_event_times(spec, h, d, rng)
        stat = kstest(td, "expon", args=(0, 1.0 / d[0])).statistic
        assert stat < 0.01
        stat_h = kstest(th, "expon", args=(0, 1.0 / h[0])).statistic
        assert stat_h < 0.01

    def test_joint_survivor_matches_copula(self):
        """Empirical P(T_H > t, T_D > t) tracks the Gumbel-Hougaard survivor
        on a grid within 3 binomial SEs."""
        spec = base_composite(phi_copula=3.0)
        rng = np.random.default_rng(13)
        n = 200_000
        gamma, arm = 1.0, 0.0
        from winclust.generative import _draw_event_times

        h, d, _ = spec.hazards(arm, np.full(n, gamma))
        th, td = _draw_event_times(spec, h, d, rng)
        for t in (2.0, 5.0, 10.0):
            emp = ((th > t) & (td > t)).mean()
            expected = math.exp(
                -(((h[0] * t) ** 3.0 + (d[0] * t) ** 3.0) ** (1 / 3.0))
            )
            se = math.sqrt(expected * (1 - expected) / n)
            assert abs(emp - expected) < 3 * se

    def test_within_subject_tau(self):
        """Conditional on frailty, Kendall tau between the two event times is
        1 - 1/phi (0 at independence)."""
        rng = np.random.default_rng(21)
        n = 20_000
        from winclust.generative import _draw_event_times

        for phi, target in ((1.0, 0.0), (3.0, 2.0 / 3.0)):
            spec = base_composite(phi_copula=phi)
            h, d, _ = spec.hazards(0.0, np.ones(n))
            th, td = _draw_event_times(spec, h, d, rng)
            tau = kendalltau(th, td).statistic
            assert abs(tau - target) < 0.02

    def test_between_subject_same_event_tau(self):
        """nu = 7.5 gives between-subject same-event tau 0.0625."""
        spec = base_composite(phi_copula=1.0, eta_d=0.0, eta_h=0.0)
        rng = np.random.default_rng(33)
        n_cl = 60_000
        gam = rng.gamma(7.5, 1 / 7.5, n_cl)
        from winclust.generative import _draw_event_times

        h, d, _ = spec.hazards(0.0, gam)
        _, td1 = _draw_event_times(spec, h, d, rng)
        _, td2 = _draw_event_times(spec, h, d, rng)
        tau = kendalltau(td1, td2).statistic
        assert abs(tau - 0.0625) < 0.01


class TestSampleTrial:
    def test_deterministic_given_seed(self):
        spec = base_composite()
        a = sample_trial(spec, 12, seed=7)
        b = sample_trial(spec, 12, seed=7)
        ta, tb = tally(a), tally(b)
        assert (ta.W, ta.L, ta.T) == (tb.W, tb.L, tb.T)

    def test_degenerate_censoring_all_ties(self):
        spec = base_composite(lambda0_c=5000.0)
        ds = sample_trial(spec, 10, seed=1)
        tl = tally(ds)
        assert tl.W == tl.L == 0
        assert tl.T == tl.n1 * tl.n0

    def test_cluster_size_spec_moments(self):
        for nbar, cv, a_exp, b_exp in ((30, 0.394, 10, 50), (50, 0.468, 10, 90)):
            s = ClusterSizeSpec(nbar, cv)
            assert s.support() == (a_exp, b_exp)
            assert s.realized_nbar == nbar
            assert abs(s.realized_cv - cv) < 0.01

    def test_complete_assignment_balance(self):
        ds = sample_trial(base_composite(), 30, seed=3, assignment="complete")
        assert int(ds.cluster_arm.sum()) == 15

    def test_ordinal_trial_estimates(self):
        spec = OrdinalGenSpec(
            control_probs=PAPER_PI0,
            beta_effect=0.693,
            sigma_b2=0.605,
            cluster_size=ClusterSizeSpec(30),
        )
        ds = sample_trial(spec, 40, seed=11, assignment="complete")
        est = estimate(ds)
        assert est.by_estimand["logwr"].defined
        # treated shifted upward: positive effect
        assert est.wd_hat > 0


class TestCutpoints:
    def test_no_random_effect_is_logit(self):
        theta = calibrate_cutpoints(PAPER_PI0, 0.0)
        s = np.cumsum(PAPER_PI0)[:-1]
        np.testing.assert_allclose(theta, np.log(s / (1 - s)), rtol=1e-12)

    def test_symmetric_half_split(self):
        for s2 in (0.3, 1.0, 2.5):
            theta = calibrate_cutpoints((0.5, 0.5), s2)
            assert theta[0] == pytest.approx(0.0, abs=1e-10)

    def test_marginals_match_prescription(self):
        """Calibrated cutpoints reproduce the control marginals to 1e-6
        (the published vector sums to 1.001 and is normalized on entry)."""
        spec = OrdinalGenSpec(
            control_probs=PAPER_PI0, beta_effect=0.0, sigma_b2=0.416
        )
        _, pi0 = ordinal_marginals(spec)
        np.testing.assert_allclose(pi0, spec.control_probs, atol=1e-6)
        np.testing.assert_allclose(pi0, PAPER_PI0, atol=3e-4)

    def test_latent_icc_formula(self):
        assert latent_icc(0.0) == 0.0
        # paper's sigma values interpreted as SDs give the stated ICCs
        assert latent_icc(0.605**2) == pytest.approx(0.10, abs=0.001)
        assert latent_icc(0.416**2) == pytest.approx(0.05, abs=0.001)


class TestOrdinalDesignInputs:
    def test_probability_closures(self):
        spec = OrdinalGenSpec(
            control_probs=PAPER_PI0, beta_effect=0.405, sigma_b2=0.605
        )
        est = estimate_design_inputs(spec)
        # pooled pairwise p_w = p_l by exchangeability; p_w + p_l + p_t = 1
        assert 2 * est.p_w + est.p_t == pytest.approx(1.0, abs=1e-12)
        cp = est.composite_probs()
        assert cp.Q >= cp.q_lower_bound() - 1e-12

    def test_null_spec_zero_effect(self):
        spec = OrdinalGenSpec(
            control_probs=PAPER_PI0, beta_effect=0.0, sigma_b2=0.605
        )
        est = estimate_design_inputs(spec)
        assert est.delta_wd == pytest.approx(0.0, abs=1e-12)
        assert est.delta_logwr == pytest.approx(0.0, abs=1e-12)
        assert est.rank_icc > 0.0

    def test_exact_values_match_monte_carlo(self):
        """Category algebra agrees with a large simulated trial."""
        spec = OrdinalGenSpec(
            control_probs=PAPER_PI0,
            beta_effect=0.405,
            sigma_b2=0.416,
            cluster_size=ClusterSizeSpec(10),
        )
        est = estimate_design_inputs(spec)
        ds = sample_trial(spec, 2000, seed=17, assignment="complete")
        emp = estimate(ds)
        assert emp.wd_hat == pytest.approx(est.delta_wd, abs=0.02)
        assert emp.pi_tie_hat == pytest.approx(est.pi_tie, abs=0.01)
        assert emp.rank_icc_hat == pytest.approx(est.rank_icc, abs=0.02)


class TestCompositeDesignInputs:
    def test_null_spec_symmetry(self):
        spec = base_composite(eta_h=0.0, eta_d=0.0, eta_c=0.0)
        est = estimate_design_inputs(spec, B=20_000, seed=2, pool_size=4000, icc_pairs=20_000)
        for name in ("delta_wd", "delta_logwr", "delta_logwo"):
            val = getattr(est, name)
            assert abs(val) < 3 * max(est.se[name], 1e-12)

    def test_probability_tuple_consistency(self):
        spec = base_composite(eta_d=0.5, eta_h=0.3, phi_copula=3.0)
        est = estimate_design_inputs(spec, B=20_000, seed=4, pool_size=6000, icc_pairs=20_000)
        assert est.p_w + est.p_t <= 1.0
        cp = est.composite_probs()
        assert cp.Q >= cp.q_lower_bound()
        # counting and semi-analytic pairwise probabilities agree
        assert est.p_w == pytest.approx(est.meta["p_w_semianalytic"], abs=4 * est.se["p_w"] + 1e-3)

    def test_paper_effect_sizes(self):
        """The strongest grid cell reproduces the reported logWR ~ 0.47;
        effects are monotone in the hazard ratios. (The reported weak-cell
        0.22 does not arise from any stated grid combination; the grid's
        weakest cell sits near 0.29.)"""
        low = estimate_design_inputs(
            base_composite(eta_d=0.3, eta_h=0.3), B=60_000, seed=6,
            pool_size=2000, icc_pairs=4000,
        )
        high = estimate_design_inputs(
            base_composite(eta_d=0.5, eta_h=0.5), B=60_000, seed=6,
            pool_size=2000, icc_pairs=4000,
        )
        assert high.delta_logwr == pytest.approx(0.47, abs=0.03)
        assert low.delta_logwr < high.delta_logwr
        assert low.delta_wd > 0

    def test_reproducible_given_seed(self):
        spec = base_composite(eta_d=0.4)
        a = estimate_design_inputs(spec, B=5_000, seed=42, pool_size=2000, icc_pairs=4000)
        b = estimate_design_inputs(spec, B=5_000, seed=42, pool_size=2000, icc_pairs=4000)
        assert a.delta_logwr == b.delta_logwr
        assert a.p_ww == b.p_ww
        assert a.rank_icc == b.rank_icc

    def test_icc_tracks_frailty_strength(self):
        """Stronger frailty dependence raises the score ICC."""
        weak = estimate_design_inputs(
            base_composite(nu_frailty=20.0), B=5_000, seed=8, pool_size=3000,
            icc_pairs=30_000,
        )
        strong = estimate_design_inputs(
            base_composite(nu_frailty=1.0), B=5_000, seed=8, pool_size=3000,
            icc_pairs=30_000,
        )
        assert strong.rank_icc > weak.rank_icc > 0


def test_logistic_marginal_against_quadrature():
    """Gauss-Hermite marginal matches adaptive quadrature to 1e-9."""
    from scipy.special import expit

    sigma = 0.9
    for eta in (-1.3, 0.0, 2.1):
        direct, _ = integrate.quad(
            lambda b: expit(eta - b)
            * math.exp(-(b**2) / (2 * sigma**2))
            / math.sqrt(2 * math.pi * sigma**2),
            -np.inf,
            np.inf,
        )
        got = float(_logistic_marginal(np.array([eta]), sigma, 40)[0])
        assert got == pytest.approx(direct, abs=1e-9)
