"""Generative models for design-input derivation and synthetic trials.

Two model families:

* gamma-frailty semi-competing risks with a Gumbel-Hougaard copula between
  hospitalization and death times, exponential censoring, and cluster-level
  treatment effects on the log-hazard scale;
* proportional-odds ordinal outcomes with a cluster random intercept, with
  cutpoints calibrated so the control arm matches prescribed marginal
  category probabilities.

From either family the module derives the design primitives needed by the
calculator: effect sizes on all three win scales, the cross-arm tie
probability, the pooled pairwise/triplet win-tie probabilities, and the
generalized rank ICC of the within-cluster comparison scores.

Numerics: the mortality-tier win probability is an exponential race and is
closed form. The hospitalization-tier probability is a two-dimensional
integral over (opponent hospitalization time t1) < (first censoring time
t2); because the Gumbel-Hougaard survivor is scale-free in t2 once t1/t2 is
fixed, the t2 integral is analytic and the remainder is a smooth
one-dimensional integral on (0, 1), evaluated by adaptive quadrature or by
fixed Gauss-Legendre nodes (vectorized, used inside Monte Carlo loops).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate, optimize

from .data import TrialDataset, make_subject
from .design import CompositeProbs, DesignInputs
from ._kernels import score_vs_pool

DEATH_TIER = 2
HOSP_TIER = 1


# ---------------------------------------------------------------------------
# Kendall's tau maps
# ---------------------------------------------------------------------------


def tau_from_frailty(nu: float) -> float:
    """Between-subject same-event Kendall tau of a shared Gamma(nu, nu)
    frailty: tau = 1 / (2 nu + 1)."""
    if nu <= 0:
        raise ValueError("frailty shape must be positive")
    return 1.0 / (2.0 * nu + 1.0)


def frailty_from_tau(tau: float) -> float:
    if not 0.0 < tau < 1.0:
        raise ValueError("achievable frailty tau lies in (0, 1)")
    return (1.0 / tau - 1.0) / 2.0


def tau_from_copula(phi: float) -> float:
    """Within-subject cross-event Kendall tau of the copula: tau = 1 - 1/phi."""
    if phi < 1.0:
        raise ValueError("copula parameter must be >= 1")
    return 1.0 - 1.0 / phi


def copula_from_tau(tau: float) -> float:
    if not 0.0 <= tau < 1.0:
        raise ValueError("achievable copula tau lies in [0, 1)")
    return 1.0 / (1.0 - tau)


def latent_icc(sigma_b2: float) -> float:
    """Latent-scale ICC of a logistic-link random intercept model:
    sigma_b^2 / (sigma_b^2 + pi^2 / 3)."""
    return sigma_b2 / (sigma_b2 + math.pi**2 / 3.0)


# ---------------------------------------------------------------------------
# specs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClusterSizeSpec:
    """Fixed size (cv = 0) or a discrete uniform solved from (nbar, cv)."""

    nbar: float
    cv: float = 0.0

    def __post_init__(self):
        if self.nbar < 1:
            raise ValueError("nbar must be >= 1")
        if self.cv < 0:
            raise ValueError("cv must be >= 0")

    def support(self) -> tuple[int, int]:
        if self.cv == 0:
            k = round(self.nbar)
            return k, k
        # two-moment match: width from var = ((b - a + 1)^2 - 1) / 12
        width = math.sqrt(12.0 * (self.nbar * self.cv) ** 2 + 1.0)
        a = max(1, round(self.nbar - (width - 1.0) / 2.0))
        b = round(2.0 * self.nbar - a)
        if b < a:
            raise ValueError("cannot match (nbar, cv) with integer support")
        return a, b

    @property
    def realized_nbar(self) -> float:
        a, b = self.support()
        return (a + b) / 2.0

    @property
    def realized_cv(self) -> float:
        a, b = self.support()
        if a == b:
            return 0.0
        var = ((b - a + 1) ** 2 - 1) / 12.0
        return math.sqrt(var) / self.realized_nbar

    def draw(self, rng: np.random.Generator, m: int) -> np.ndarray:
        a, b = self.support()
        if a == b:
            return np.full(m, a, dtype=np.int64)
        return rng.integers(a, b + 1, size=m)


@dataclass(frozen=True)
class CompositeGenSpec:
    lambda0_h: float
    lambda0_d: float
    lambda0_c: float
    eta_h: float = 0.0
    eta_d: float = 0.0
    eta_c: float = 0.0
    nu_frailty: float = 1.0
    phi_copula: float = 1.0
    q: float = 0.5
    cluster_size: ClusterSizeSpec = field(default_factory=lambda: ClusterSizeSpec(50))

    def __post_init__(self):
        if min(self.lambda0_h, self.lambda0_d, self.lambda0_c) <= 0:
            raise ValueError("baseline hazards must be positive")
        if self.nu_frailty <= 0:
            raise ValueError("frailty shape must be positive")
        if self.phi_copula < 1.0:
            raise ValueError("copula parameter must be >= 1")
        if not 0 < self.q < 1:
            raise ValueError("q must be in (0, 1)")

    def hazards(self, arm, gamma):
        """(hospitalization, death, censoring) rates for given arm/frailty."""
        h = gamma * self.lambda0_h * np.exp(-self.eta_h * arm)
        d = gamma * self.lambda0_d * np.exp(-self.eta_d * arm)
        c = self.lambda0_c * np.exp(-self.eta_c * arm) * np.ones_like(d)
        return h, d, c


@dataclass(frozen=True)
class OrdinalGenSpec:
    control_probs: tuple[float, ...]
    beta_effect: float = 0.0
    sigma_b2: float = 0.0
    q: float = 0.5
    cluster_size: ClusterSizeSpec = field(default_factory=lambda: ClusterSizeSpec(30))
    gh_nodes: int = 40

    def __post_init__(self):
        p = np.asarray(self.control_probs, dtype=float)
        if p.size < 2:
            raise ValueError("need at least two categories")
        if np.any(p <= 0):
            raise ValueError("control probabilities must be positive")
        # published vectors are often rounded; renormalize small deficits
        if abs(p.sum() - 1.0) > 5e-3:
            raise ValueError("control probabilities must sum to 1")
        object.__setattr__(self, "control_probs", tuple(p / p.sum()))
        if self.sigma_b2 < 0:
            raise ValueError("random-intercept variance must be >= 0")
        if not 0 < self.q < 1:
            raise ValueError("q must be in (0, 1)")
        if self.gh_nodes < 20:
            raise ValueError("use at least 20 quadrature nodes")


# ---------------------------------------------------------------------------
# tier win probabilities (conditional on arms and frailties)
# ---------------------------------------------------------------------------


def mortality_tier_prob(death_self, censor_self, death_opp, censor_opp):
    """P(opponent dies before my death and before either censoring):
    an exponential race, death_opp / (sum of the four rates)."""
    denom = death_self + death_opp + censor_self + censor_opp
    if np.any(np.asarray(denom) <= 0):
        raise ValueError("rates must have a positive sum")
    return death_opp / denom


def _hosp_integrand(v, h1, d1, c1, h2, d2, c2, phi):
    # after u = v^(1/phi); w_a = (h_a^phi v + d_a^phi)^(1/phi)
    w1 = (h1**phi * v + d1**phi) ** (1.0 / phi)
    w2 = (h2**phi * v + d2**phi) ** (1.0 / phi)
    c = c1 + c2
    return c * (h2**phi / phi) * w2 ** (1.0 - phi) / (w1 + w2 + c) ** 2


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl_nodes(n: int):
    if n not in _GL_CACHE:
        x, w = np.polynomial.legendre.leggauss(n)
        _GL_CACHE[n] = ((x + 1.0) / 2.0, w / 2.0)  # mapped to (0, 1)
    return _GL_CACHE[n]


def hospitalization_tier_prob(
    hazards_self,
    hazards_opp,
    phi: float,
    method: str = "adaptive",
    tol: float = 1e-7,
    nodes: int = 64,
):
    """P(both deaths outlast the first censoring time and the opponent is
    hospitalized first, inside the common observation window).

    ``hazards_self``/``hazards_opp`` are (hospitalization, death, censoring)
    rate triples, frailty and treatment already folded in. ``adaptive``
    integrates to the requested absolute tolerance and raises if it is not
    achieved; ``fixed`` uses Gauss-Legendre nodes and broadcasts over
    array-valued rates.
    """
    h1, d1, c1 = hazards_self
    h2, d2, c2 = hazards_opp
    if phi < 1.0:
        raise ValueError("copula parameter must be >= 1")
    if phi == 1.0:
        # independence: the double integral factorizes into two races
        c = c1 + c2
        race1 = c / (c + d1 + d2)
        race2 = h2 / (h1 + h2 + c + d1 + d2)
        return race1 * race2
    if method == "fixed":
        v, w = _gl_nodes(nodes)
        val = _hosp_integrand(
            v,
            np.asarray(h1)[..., None],
            np.asarray(d1)[..., None],
            np.asarray(c1)[..., None],
            np.asarray(h2)[..., None],
            np.asarray(d2)[..., None],
            np.asarray(c2)[..., None],
            phi,
        )
        out = val @ w
        return out if out.ndim else float(out)
    if method != "adaptive":
        raise ValueError("method must be 'adaptive' or 'fixed'")
    val, err = integrate.quad(
        _hosp_integrand, 0.0, 1.0, args=(h1, d1, c1, h2, d2, c2, phi),
        epsabs=tol, epsrel=0.0, limit=200,
    )
    if err > tol:
        raise RuntimeError(
            f"quadrature did not reach tolerance {tol:g}: error estimate {err:g}"
        )
    return val


def pair_win_prob(spec: CompositeGenSpec, arm_self, arm_opp, gamma_self, gamma_opp, nodes=64):
    """P(self beats opp) given arms and frailties: mortality tier plus
    hospitalization tier. Vectorized over frailty arrays."""
    h1, d1, c1 = spec.hazards(arm_self, gamma_self)
    h2, d2, c2 = spec.hazards(arm_opp, gamma_opp)
    o = mortality_tier_prob(d1, c1, d2, c2)
    h = hospitalization_tier_prob(
        (h1, d1, c1), (h2, d2, c2), spec.phi_copula, method="fixed", nodes=nodes
    )
    return o + h


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


def _positive_stable(alpha: float, rng: np.random.Generator, size) -> np.ndarray:
    """One-sided alpha-stable with Laplace transform exp(-s^alpha),
    alpha in (0, 1) (Kanter's representation)."""
    theta = np.clip(rng.uniform(0.0, np.pi, size), 1e-12, np.pi - 1e-12)
    w = rng.standard_exponential(size)
    return (
        np.sin(alpha * theta)
        / np.sin(theta) ** (1.0 / alpha)
        * (np.sin((1.0 - alpha) * theta) / w) ** ((1.0 - alpha) / alpha)
    )


def _draw_event_times(spec: CompositeGenSpec, h, d, rng):
    """(T_hosp, T_death) with joint Gumbel-Hougaard survivor and exponential
    marginals at rates (h, d); positive-stable mixture for phi > 1."""
    n = h.shape[0]
    e1 = rng.standard_exponential(n)
    e2 = rng.standard_exponential(n)
    if spec.phi_copula == 1.0:
        return e1 / h, e2 / d
    s = _positive_stable(1.0 / spec.phi_copula, rng, n)
    th = (e1 / s) ** (1.0 / spec.phi_copula) / h
    td = (e2 / s) ** (1.0 / spec.phi_copula) / d
    return th, td


def _composite_observed(spec, arms_subj, gammas_subj, rng):
    """Observed (times, events) matrix [death, hospitalization] columns."""
    h, d, c = spec.hazards(arms_subj, gammas_subj)
    th, td = _draw_event_times(spec, h, d, rng)
    tc = rng.standard_exponential(h.shape[0]) / c
    n = h.shape[0]
    times = np.empty((n, 2), dtype=np.float64)
    events = np.empty((n, 2), dtype=np.int8)
    death_obs = td <= tc
    times[:, 0] = np.where(death_obs, td, tc)
    events[:, 0] = death_obs
    hosp_obs = th <= np.minimum(td, tc)
    times[:, 1] = np.where(hosp_obs, th, tc)
    events[:, 1] = hosp_obs
    return times, events


def _assign_arms(rng, M, q, assignment):
    if assignment == "complete":
        m1 = int(round(q * M))
        m1 = min(max(m1, 1), M - 1)
        arms = np.zeros(M, dtype=np.int8)
        arms[rng.permutation(M)[:m1]] = 1
        return arms
    if assignment != "bernoulli":
        raise ValueError("assignment must be 'bernoulli' or 'complete'")
    while True:
        arms = (rng.random(M) < q).astype(np.int8)
        if 0 < arms.sum() < M:
            return arms


def _sample_composite_arrays(spec, M, rng, assignment="bernoulli"):
    sizes = spec.cluster_size.draw(rng, M)
    arms_cl = _assign_arms(rng, M, spec.q, assignment)
    gammas_cl = rng.gamma(spec.nu_frailty, 1.0 / spec.nu_frailty, M)
    cluster_index = np.repeat(np.arange(M), sizes)
    arms_subj = arms_cl[cluster_index].astype(np.float64)
    gammas_subj = gammas_cl[cluster_index]
    times, events = _composite_observed(spec, arms_subj, gammas_subj, rng)
    kinds = np.zeros(2, dtype=np.int8)  # both survival tiers
    return times, events, kinds, arms_cl[cluster_index], cluster_index


def _ordinal_cond_probs(theta, beta, b):
    """Category probabilities under the proportional-odds model for linear
    predictors theta_k - beta - b; beta and b may be arrays."""
    b = np.atleast_1d(np.asarray(b, dtype=float))
    shift = np.broadcast_to(np.asarray(beta, dtype=float), b.shape) + b
    cut = theta[None, :] - shift[:, None]
    cdf = 1.0 / (1.0 + np.exp(-cut))
    cdf = np.concatenate(
        [np.zeros((b.size, 1)), cdf, np.ones((b.size, 1))], axis=1
    )
    return np.diff(cdf, axis=1)


def _sample_ordinal_arrays(spec, M, rng, assignment="bernoulli"):
    theta = calibrate_cutpoints(spec.control_probs, spec.sigma_b2, spec.gh_nodes)
    sizes = spec.cluster_size.draw(rng, M)
    arms_cl = _assign_arms(rng, M, spec.q, assignment)
    b_cl = rng.normal(0.0, math.sqrt(spec.sigma_b2), M) if spec.sigma_b2 > 0 else np.zeros(M)
    cluster_index = np.repeat(np.arange(M), sizes)
    probs = _ordinal_cond_probs(theta, spec.beta_effect * arms_cl, b_cl)
    n = cluster_index.size
    u = rng.random(n)
    cum = np.cumsum(probs, axis=1)[cluster_index]
    cats = np.minimum((u[:, None] > cum).sum(axis=1) + 1, len(spec.control_probs))
    times = cats.astype(np.float64)[:, None]
    events = np.ones((n, 1), dtype=np.int8)
    kinds = np.ones(1, dtype=np.int8)  # scalar, larger is better
    return times, events, kinds, arms_cl[cluster_index], cluster_index


def sample_trial(spec, M: int, seed=None, assignment: str = "bernoulli") -> TrialDataset:
    """Synthetic trial as a TrialDataset (long-format-ready records)."""
    if M < 2:
        raise ValueError("M must be >= 2")
    rng = np.random.default_rng(seed)
    if isinstance(spec, CompositeGenSpec):
        times, events, kinds, arms, cluster_index = _sample_composite_arrays(
            spec, M, rng, assignment
        )
        subjects = []
        for i in range(times.shape[0]):
            comps = [
                (DEATH_TIER, float(times[i, 0]), not bool(events[i, 0])),
                (HOSP_TIER, float(times[i, 1]), not bool(events[i, 1])),
            ]
            subjects.append(
                make_subject(
                    f"s{i}", f"c{cluster_index[i]}", int(arms[i]), comps
                )
            )
        return TrialDataset(subjects, survival_tiers=frozenset({DEATH_TIER, HOSP_TIER}))
    if isinstance(spec, OrdinalGenSpec):
        times, events, kinds, arms, cluster_index = _sample_ordinal_arrays(
            spec, M, rng, assignment
        )
        subjects = [
            make_subject(
                f"s{i}",
                f"c{cluster_index[i]}",
                int(arms[i]),
                [(1, float(times[i, 0]), False)],
            )
            for i in range(times.shape[0])
        ]
        return TrialDataset(subjects)
    raise TypeError(f"unknown spec type {type(spec).__name__}")


# ---------------------------------------------------------------------------
# ordinal calibration and exact category algebra
# ---------------------------------------------------------------------------


_GH_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gh_nodes(n: int):
    if n not in _GH_CACHE:
        _GH_CACHE[n] = np.polynomial.hermite.hermgauss(n)
    return _GH_CACHE[n]


def _logistic_marginal(eta, sigma_b: float, nodes: int):
    """E_b[ logistic(eta - b) ] with b ~ N(0, sigma_b^2), Gauss-Hermite."""
    eta = np.asarray(eta, dtype=float)
    if sigma_b == 0.0:
        return 1.0 / (1.0 + np.exp(-eta))
    z, w = _gh_nodes(nodes)
    shift = sigma_b * math.sqrt(2.0) * z
    vals = 1.0 / (1.0 + np.exp(-(eta[..., None] - shift)))
    return vals @ w / math.sqrt(math.pi)


def calibrate_cutpoints(control_probs, sigma_b2: float, nodes: int = 40) -> np.ndarray:
    """Cutpoints theta_k solving E_b[logistic(theta_k - b)] = cumulative
    control probability S_k; the marginal is strictly increasing in theta,
    so each root is unique (monotone bracketing + Brent)."""
    p = np.asarray(control_probs, dtype=float)
    s = np.cumsum(p)[:-1]
    sigma_b = math.sqrt(sigma_b2)
    if sigma_b == 0.0:
        return np.log(s / (1.0 - s))
    theta = np.empty(s.size)
    for k, target in enumerate(s):
        center = math.log(target / (1.0 - target))
        lo = center - 10.0 * sigma_b - 10.0
        hi = center + 10.0 * sigma_b + 10.0
        theta[k] = optimize.brentq(
            lambda th: float(_logistic_marginal(th, sigma_b, nodes)) - target,
            lo,
            hi,
            xtol=1e-13,
            rtol=8.9e-16,
        )
    resid = np.abs(_logistic_marginal(theta, sigma_b, nodes) - s).max()
    if resid > 1e-8:
        raise RuntimeError(f"cutpoint calibration residual {resid:g} > 1e-8")
    if np.any(np.diff(theta) <= 0):
        raise RuntimeError("calibrated cutpoints are not increasing")
    return theta


def ordinal_marginals(spec: OrdinalGenSpec):
    """(treated, control) marginal category probabilities."""
    theta = calibrate_cutpoints(spec.control_probs, spec.sigma_b2, spec.gh_nodes)
    sigma_b = math.sqrt(spec.sigma_b2)
    cdf1 = _logistic_marginal(theta - spec.beta_effect, sigma_b, spec.gh_nodes)
    cdf0 = _logistic_marginal(theta, sigma_b, spec.gh_nodes)
    pi1 = np.diff(np.concatenate([[0.0], cdf1, [1.0]]))
    pi0 = np.diff(np.concatenate([[0.0], cdf0, [1.0]]))
    return pi1, pi0


def _ordinal_joint_within_cluster(spec: OrdinalGenSpec):
    """Joint category law of two subjects sharing a cluster (mixes arms)."""
    theta = calibrate_cutpoints(spec.control_probs, spec.sigma_b2, spec.gh_nodes)
    sigma_b = math.sqrt(spec.sigma_b2)
    z, w = _gh_nodes(spec.gh_nodes)
    b = sigma_b * math.sqrt(2.0) * z
    weights = w / math.sqrt(math.pi)
    joint = 0.0
    for arm, prob in ((1, spec.q), (0, 1.0 - spec.q)):
        cond = _ordinal_cond_probs(theta, spec.beta_effect * arm, b)
        joint = joint + prob * np.einsum("r,rk,rl->kl", weights, cond, cond)
    return joint


# ---------------------------------------------------------------------------
# design-input estimation
# ---------------------------------------------------------------------------


@dataclass
class DesignInputEstimate:
    """Model-derived design primitives with Monte Carlo standard errors."""

    delta_wd: float
    delta_logwr: float
    delta_logwo: float
    pi_tie: float
    rank_icc: float
    p_w: float
    p_t: float
    p_ww: float
    p_wt: float
    p_tt: float
    se: dict[str, float]
    replications: int
    seed: Optional[int]
    nbar: float
    cv: float
    q: float
    meta: dict = field(default_factory=dict)

    def composite_probs(self) -> CompositeProbs:
        return CompositeProbs(self.p_w, self.p_t, self.p_ww, self.p_wt, self.p_tt)

    def delta(self, estimand: str) -> float:
        return {
            "wd": self.delta_wd,
            "logwr": self.delta_logwr,
            "logwo": self.delta_logwo,
        }[estimand]

    def to_design_inputs(self, estimand: str, **overrides) -> DesignInputs:
        kw = dict(
            estimand=estimand,
            delta=self.delta(estimand),
            pi_tie=self.pi_tie,
            q=self.q,
            nbar=self.nbar,
            cv=self.cv,
            icc=max(0.0, self.rank_icc),
            composite_probs=self.composite_probs(),
            wd=self.delta_wd,
        )
        kw.update(overrides)
        return DesignInputs(**kw)


def _ratio_se(num, den, b):
    """SE of log(mean(num)/mean(den)) by the delta method on paired draws."""
    mn, md = num.mean(), den.mean()
    infl = (num - mn) / mn - (den - md) / md
    return float(infl.std(ddof=1) / math.sqrt(b))


def _estimate_composite_inputs(
    spec: CompositeGenSpec,
    B: int,
    rng: np.random.Generator,
    pool_size: int,
    icc_pairs: int,
    nodes: int,
) -> DesignInputEstimate:
    # -- cross-arm law: effect sizes and tie probability (semi-analytic) ----
    g = rng.gamma(spec.nu_frailty, 1.0 / spec.nu_frailty, size=(B, 2))
    w = pair_win_prob(spec, 1.0, 0.0, g[:, 0], g[:, 1], nodes)
    lo = pair_win_prob(spec, 0.0, 1.0, g[:, 1], g[:, 0], nodes)
    t = 1.0 - w - lo
    pw_x, pl_x, pt_x = w.mean(), lo.mean(), t.mean()
    delta_wd = pw_x - pl_x
    delta_logwr = math.log(pw_x / pl_x)
    delta_logwo = math.log((pw_x + pt_x / 2.0) / (pl_x + pt_x / 2.0))
    se = {
        "delta_wd": float((w - lo).std(ddof=1) / math.sqrt(B)),
        "pi_tie": float(t.std(ddof=1) / math.sqrt(B)),
        "delta_logwr": _ratio_se(w, lo, B),
        "delta_logwo": _ratio_se(w + t / 2.0, lo + t / 2.0, B),
    }

    # agnostic pairwise win probability, for a consistency diagnostic
    probs = {1: spec.q, 0: 1.0 - spec.q}
    pw_pooled = 0.0
    for a1 in (1, 0):
        for a2 in (1, 0):
            pw_pooled += probs[a1] * probs[a2] * pair_win_prob(
                spec, float(a1), float(a2), g[:, 0], g[:, 1], nodes
            ).mean()

    # -- pooled sample: pairwise and triplet probabilities by counting ------
    arms_pool = (rng.random(pool_size) < spec.q).astype(np.float64)
    gam_pool = rng.gamma(spec.nu_frailty, 1.0 / spec.nu_frailty, pool_size)
    times, events = _composite_observed(spec, arms_pool, gam_pool, rng)
    kinds = np.zeros(2, dtype=np.int8)
    wins, losses, ties = score_vs_pool(times, events, times, events, kinds)
    ties = ties - 1  # self-comparison is a tie
    m1 = pool_size - 1
    m2 = pool_size - 2
    p_w = float((wins / m1).mean())
    p_t = float((ties / m1).mean())
    u_ww = wins * (wins - 1) / (m1 * m2)
    u_wt = wins * ties / (m1 * m2)
    u_tt = ties * (ties - 1) / (m1 * m2)
    p_ww, p_wt, p_tt = float(u_ww.mean()), float(u_wt.mean()), float(u_tt.mean())
    root_m = math.sqrt(pool_size)
    se.update(
        p_w=float((wins / m1).std(ddof=1) / root_m),
        p_t=float((ties / m1).std(ddof=1) / root_m),
        p_ww=float(u_ww.std(ddof=1) / root_m),
        p_wt=float(u_wt.std(ddof=1) / root_m),
        p_tt=float(u_tt.std(ddof=1) / root_m),
    )

    # -- generalized rank ICC: within-cluster correlation of pooled scores --
    half = pool_size // 2
    arms_cl = (rng.random(icc_pairs) < spec.q).astype(np.float64)
    gam_cl = rng.gamma(spec.nu_frailty, 1.0 / spec.nu_frailty, icc_pairs)
    f = []
    for half_slice in (slice(0, half), slice(half, pool_size)):
        t_s, e_s = _composite_observed(spec, arms_cl, gam_cl, rng)
        wn, ls, _ = score_vs_pool(
            t_s, e_s, times[half_slice], events[half_slice], kinds
        )
        npool = times[half_slice].shape[0]
        f.append((wn - ls) / npool)
    rho_star = float(np.corrcoef(f[0], f[1])[0, 1])
    se["rank_icc"] = (1.0 - rho_star**2) / math.sqrt(icc_pairs)

    return DesignInputEstimate(
        delta_wd=float(delta_wd),
        delta_logwr=float(delta_logwr),
        delta_logwo=float(delta_logwo),
        pi_tie=float(pt_x),
        rank_icc=rho_star,
        p_w=p_w,
        p_t=p_t,
        p_ww=p_ww,
        p_wt=p_wt,
        p_tt=p_tt,
        se=se,
        replications=B,
        seed=None,
        nbar=spec.cluster_size.realized_nbar,
        cv=spec.cluster_size.realized_cv,
        q=spec.q,
        meta={
            "model": "composite",
            "pool_size": pool_size,
            "icc_pairs": icc_pairs,
            "p_w_semianalytic": float(pw_pooled),
            "pi_win_cross": float(pw_x),
            "pi_loss_cross": float(pl_x),
        },
    )


def _estimate_ordinal_inputs(spec: OrdinalGenSpec) -> DesignInputEstimate:
    pi1, pi0 = ordinal_marginals(spec)
    c0 = np.concatenate([[0.0], np.cumsum(pi0)])
    below0, at_or_below0 = c0[:-1], c0[1:]
    pw_x = float(np.sum(pi1 * below0))
    pl_x = float(np.sum(pi1 * (1.0 - at_or_below0)))
    pt_x = float(np.sum(pi1 * pi0))
    delta_wd = pw_x - pl_x
    delta_logwr = math.log(pw_x / pl_x)
    delta_logwo = math.log((pw_x + pt_x / 2) / (pl_x + pt_x / 2))

    pooled = spec.q * pi1 + (1.0 - spec.q) * pi0
    cp = np.concatenate([[0.0], np.cumsum(pooled)])
    below = cp[:-1]
    p_w = float(np.sum(pooled * below))
    p_t = float(np.sum(pooled * pooled))
    p_ww = float(np.sum(pooled * below**2))
    p_wt = float(np.sum(pooled * below * pooled))
    p_tt = float(np.sum(pooled * pooled**2))

    # Hajek scores f(y) = P(win | y) - P(loss | y) under the pooled law
    above = 1.0 - cp[1:]
    fscore = below - above
    mean_f = float(np.sum(pooled * fscore))
    var_f = float(np.sum(pooled * fscore**2)) - mean_f**2
    joint = _ordinal_joint_within_cluster(spec)
    e_ff = float(fscore @ joint @ fscore)
    rho_star = (e_ff - mean_f**2) / var_f

    return DesignInputEstimate(
        delta_wd=delta_wd,
        delta_logwr=delta_logwr,
        delta_logwo=delta_logwo,
        pi_tie=pt_x,
        rank_icc=rho_star,
        p_w=p_w,
        p_t=p_t,
        p_ww=p_ww,
        p_wt=p_wt,
        p_tt=p_tt,
        se={},  # exact category algebra, no Monte Carlo error
        replications=0,
        seed=None,
        nbar=spec.cluster_size.realized_nbar,
        cv=spec.cluster_size.realized_cv,
        q=spec.q,
        meta={"model": "ordinal"},
    )


def estimate_design_inputs(
    spec,
    B: int = 100_000,
    seed=None,
    pool_size: int = 20_000,
    icc_pairs: int = 150_000,
    nodes: int = 64,
    high_precision: bool = False,
) -> DesignInputEstimate:
    """Design primitives from a generative spec.

    Composite specs use Monte Carlo over arms and frailties: closed-form
    race and quadrature win probabilities for pairwise quantities, pooled-
    sample counting for triplet probabilities, and a split-pool score
    correlation for the generalized rank ICC. Ordinal specs are exact
    (category algebra + Gauss-Hermite), so B and seed only matter for the
    composite family. Deterministic given (seed, B) at one thread; counting
    statistics are integer-exact across thread counts.
    """
    if isinstance(spec, OrdinalGenSpec):
        return _estimate_ordinal_inputs(spec)
    if not isinstance(spec, CompositeGenSpec):
        raise TypeError(f"unknown spec type {type(spec).__name__}")
    if B < 1_000:
        raise ValueError("B must be at least 1000")
    if high_precision:
        B, pool_size, icc_pairs = 10 * B, 3 * pool_size, 4 * icc_pairs
    rng = np.random.default_rng(seed)
    out = _estimate_composite_inputs(spec, B, rng, pool_size, icc_pairs, nodes)
    out.seed = seed
    return out
