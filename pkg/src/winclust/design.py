"""Closed-form variances, power, and required-cluster searches.

Single-endpoint variance (rank form):

    nu_D^2 = (1 - pi_tie^2) / (3 M nbar) * (1/q + 1/(1-q)) * VIF - W_D^2 / M

with VIF = 1 + icc * ((1 + cv^2) nbar - 1). Composite endpoints replace the
rank second moment by its pair/triplet-probability form:

    nu_D^2 = (1/(M^3 nbar^3)) * (1/q + 1/(1-q)) * VIF*
             * {4 [1 + (n-1) P + (n-1)(n-2) Q] - (n+1)^2} - W_D^2 / M,

where n = M * nbar, P = 3 p_W + 5/4 p_T and Q = p_WW + p_WT + p_TT / 4.
Ratio estimands share the same core through the atanh effect-size transforms
and delta-method multipliers, so the three scales cannot drift apart.

Power is Phi(|Delta|/sigma - z_{1-alpha/2}) for the Wald z test and the
analogue with central-t quantiles and M-2 degrees of freedom for the t test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from typing import Optional

import numpy as np

from . import dist

_ESTIMANDS = ("wd", "logwr", "logwo")
_QBOUND_TOL = 1e-9
M_SEARCH_CAP = 10**6


class InfeasibleDesignError(ValueError):
    """The requested design cannot be met (non-positive variance or cap hit)."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory or []


@dataclass(frozen=True)
class CompositeProbs:
    p_w: float
    p_t: float
    p_ww: float
    p_wt: float
    p_tt: float

    def __post_init__(self):
        for name, v in asdict(self).items():
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")
        if self.p_w + self.p_t > 1.0 + _QBOUND_TOL:
            raise ValueError("p_w + p_t exceeds 1")
        if self.Q < self.q_lower_bound() - _QBOUND_TOL:
            raise ValueError(
                "inconsistent composite probabilities: Q = "
                f"{self.Q:.6g} below the Cauchy-Schwarz bound "
                f"{self.q_lower_bound():.6g}"
            )

    @property
    def P(self) -> float:
        return 3.0 * self.p_w + 1.25 * self.p_t

    @property
    def Q(self) -> float:
        return self.p_ww + self.p_wt + 0.25 * self.p_tt

    def q_lower_bound(self) -> float:
        return self.p_w**2 + self.p_w * self.p_t + 0.25 * self.p_t**2


@dataclass(frozen=True)
class DesignInputs:
    estimand: str
    delta: float
    pi_tie: float
    q: float
    nbar: float
    cv: float
    icc: float
    composite_probs: Optional[CompositeProbs] = None
    alpha: float = 0.05
    target_power: float = 0.8
    test: str = "z"
    sided: str = "two"
    # optional anchor: net benefit used inside the variance in place of the
    # value implied by delta (useful when reproducing a reported scenario
    # whose W_D and Delta were estimated jointly)
    wd: Optional[float] = None
    # drop the finite-effect -W_D^2/M correction (contiguous alternative)
    contiguous: bool = False

    def __post_init__(self):
        if self.estimand not in _ESTIMANDS:
            raise ValueError(f"estimand must be one of {_ESTIMANDS}")
        if not 0.0 <= self.pi_tie < 1.0:
            raise ValueError("pi_tie must be in [0, 1)")
        if not 0.0 < self.q < 1.0:
            raise ValueError("q must be in (0, 1)")
        if self.nbar < 1.0:
            raise ValueError("nbar must be >= 1")
        if self.cv < 0.0:
            raise ValueError("cv must be >= 0")
        if not 0.0 <= self.icc <= 1.0:
            raise ValueError("icc must be in [0, 1]")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must be in (0, 1)")
        if not 0.0 < self.target_power < 1.0:
            raise ValueError("target_power must be in (0, 1)")
        if self.test not in ("z", "t"):
            raise ValueError("test must be 'z' or 't'")
        if self.sided not in ("one", "two"):
            raise ValueError("sided must be 'one' or 'two'")

    @property
    def composite(self) -> bool:
        return self.composite_probs is not None

    def wd_value(self) -> float:
        """Net benefit entering the variance: the anchor if given, otherwise
        recovered from delta on the estimand's scale."""
        if self.wd is not None:
            return self.wd
        if self.estimand == "wd":
            return self.delta
        if self.estimand == "logwr":
            return (1.0 - self.pi_tie) * math.tanh(self.delta / 2.0)
        return math.tanh(self.delta / 2.0)

    def multiplier(self) -> float:
        """Squared delta-method factor mapping nu_D^2 to the estimand scale."""
        wd = self.wd_value()
        if self.estimand == "wd":
            return 1.0
        if self.estimand == "logwr":
            u = wd / (1.0 - self.pi_tie)
            return (2.0 * (1.0 / (1.0 - self.pi_tie)) / (1.0 - u * u)) ** 2
        return (2.0 / (1.0 - wd * wd)) ** 2


@dataclass
class DesignResult:
    variance: float
    power: float
    required_M: Optional[int]
    vif: float
    vif_star: Optional[float]
    P: Optional[float]
    Q: Optional[float]
    V_of_M: Optional[float]
    diagnostics: dict = field(default_factory=dict)


def vif(icc: float, nbar: float, cv: float) -> float:
    """Variance inflation factor 1 + icc * ((1 + cv^2) nbar - 1)."""
    return 1.0 + icc * ((1.0 + cv * cv) * nbar - 1.0)


def _allocation(q: float) -> float:
    return 1.0 / q + 1.0 / (1.0 - q)


def _single_lead(inputs: DesignInputs) -> float:
    """M-free leading factor of variance_single: nu_D^2 = lead/M - wd^2/M."""
    return (
        (1.0 - inputs.pi_tie**2)
        / (3.0 * inputs.nbar)
        * _allocation(inputs.q)
        * vif(inputs.icc, inputs.nbar, inputs.cv)
    )


def variance_single(inputs: DesignInputs, M: int) -> float:
    """Asymptotic variance on the estimand scale, single endpoint."""
    if inputs.composite:
        raise ValueError("variance_single requires composite_probs absent")
    if M < 2:
        raise ValueError("M must be >= 2")
    wd = inputs.wd_value()
    core = _single_lead(inputs) / M
    if not inputs.contiguous:
        core -= wd * wd / M
    out = inputs.multiplier() * core
    if out <= 0.0:
        raise InfeasibleDesignError(
            f"non-positive variance at M={M}: the effect is too large for "
            "the asymptotic regime with these inputs"
        )
    return out


def composite_bracket(P: float, Q: float, n: float) -> float:
    """4 [1 + (n-1) P + (n-1)(n-2) Q] - (n+1)^2."""
    return 4.0 * (1.0 + (n - 1.0) * P + (n - 1.0) * (n - 2.0) * Q) - (n + 1.0) ** 2


def variance_composite(inputs: DesignInputs, M: int) -> float:
    """Asymptotic variance on the estimand scale, composite endpoint."""
    if not inputs.composite:
        raise ValueError("variance_composite requires composite_probs")
    if M < 2:
        raise ValueError("M must be >= 2")
    cp = inputs.composite_probs
    n = M * inputs.nbar
    wd = inputs.wd_value()
    vs = vif(inputs.icc, inputs.nbar, inputs.cv)
    core = (
        1.0
        / (M**3 * inputs.nbar**3)
        * _allocation(inputs.q)
        * vs
        * composite_bracket(cp.P, cp.Q, n)
    )
    if not inputs.contiguous:
        core -= wd * wd / M
    out = inputs.multiplier() * core
    if out <= 0.0:
        raise InfeasibleDesignError(
            f"non-positive variance at M={M}: the effect is too large for "
            "the asymptotic regime with these inputs"
        )
    return out


def variance(inputs: DesignInputs, M: int) -> float:
    return variance_composite(inputs, M) if inputs.composite else variance_single(inputs, M)


def _alpha_quantile_z(inputs: DesignInputs) -> float:
    a = inputs.alpha / 2.0 if inputs.sided == "two" else inputs.alpha
    return dist.norm_ppf(1.0 - a)


def power(inputs: DesignInputs, M: int) -> float:
    """Wald-test power at M clusters. z: Phi(|Delta|/sigma - z_{1-a});
    t: central-t CDF with M-2 df at |Delta|/sigma - t_{M-2,1-a}."""
    sigma = math.sqrt(variance(inputs, M))
    ncp = abs(inputs.delta) / sigma
    a = inputs.alpha / 2.0 if inputs.sided == "two" else inputs.alpha
    if inputs.test == "z":
        return float(dist.norm_cdf(ncp - dist.norm_ppf(1.0 - a)))
    df = M - 2
    if df < 1:
        raise ValueError("t test needs M >= 3")
    return float(dist.t_cdf(ncp - dist.t_ppf(1.0 - a, df), df))


def _criterion_met(inputs: DesignInputs, M: int) -> bool:
    """Sample-size criterion (quantile-sum form) at a candidate M."""
    a = inputs.alpha / 2.0 if inputs.sided == "two" else inputs.alpha
    beta = 1.0 - inputs.target_power
    try:
        var = variance(inputs, M)
    except InfeasibleDesignError:
        return False
    if inputs.test == "z":
        qsum = dist.norm_ppf(1.0 - a) + dist.norm_ppf(1.0 - beta)
    else:
        df = M - 2
        if df < 1:
            return False
        qsum = dist.t_ppf(1.0 - a, df) + dist.t_ppf(1.0 - beta, df)
    return qsum**2 * var / inputs.delta**2 <= 1.0


def required_clusters(inputs: DesignInputs) -> DesignResult:
    """Smallest M meeting the target power.

    Single-endpoint z tests use the closed form (M * nu^2 does not depend
    on M there); composite endpoints and all t tests use an ascending
    integer scan with per-M quantile re-evaluation, capped at M_SEARCH_CAP.
    """
    if inputs.delta == 0.0:
        raise ValueError("required_clusters needs a nonzero delta")
    if not inputs.composite and inputs.test == "z":
        a = inputs.alpha / 2.0 if inputs.sided == "two" else inputs.alpha
        qsum = dist.norm_ppf(1.0 - a) + dist.norm_ppf(inputs.target_power)
        wd = inputs.wd_value()
        bracket = _single_lead(inputs)
        if not inputs.contiguous:
            bracket -= wd * wd
        if bracket <= 0.0:
            raise InfeasibleDesignError(
                "effect too large: closed-form bracket non-positive"
            )
        m_exact = qsum**2 * inputs.multiplier() * bracket / inputs.delta**2
        M = max(2, math.ceil(m_exact - 1e-12))
    else:
        M = None
        trajectory = []
        for cand in range(max(4, 2), M_SEARCH_CAP + 1):
            if _criterion_met(inputs, cand):
                M = cand
                break
            if cand <= 100 or cand % 1000 == 0:
                try:
                    trajectory.append((cand, variance(inputs, cand)))
                except InfeasibleDesignError:
                    trajectory.append((cand, float("nan")))
        if M is None:
            raise InfeasibleDesignError(
                f"no M <= {M_SEARCH_CAP} meets the target power",
                trajectory=trajectory,
            )
    return describe(inputs, M, required=True)


def describe(inputs: DesignInputs, M: int, required: bool = False) -> DesignResult:
    """DesignResult at a given M (variance, power, diagnostics)."""
    var = variance(inputs, M)
    pw = power(inputs, M)
    wd = inputs.wd_value()
    sub = wd * wd / M if not inputs.contiguous else 0.0
    if inputs.composite:
        cp = inputs.composite_probs
        n = M * inputs.nbar
        bracket = composite_bracket(cp.P, cp.Q, n)
        lead = (
            1.0
            / (M**3 * inputs.nbar**3)
            * _allocation(inputs.q)
            * vif(inputs.icc, inputs.nbar, inputs.cv)
            * bracket
        )
        vif_star, P, Q, VM = (
            vif(inputs.icc, inputs.nbar, inputs.cv),
            cp.P,
            cp.Q,
            bracket,
        )
    else:
        lead = _single_lead(inputs) / M
        vif_star = P = Q = VM = None
    return DesignResult(
        variance=var,
        power=pw,
        required_M=M if required else None,
        vif=vif(inputs.icc, inputs.nbar, inputs.cv),
        vif_star=vif_star,
        P=P,
        Q=Q,
        V_of_M=VM,
        diagnostics={
            "leading_term": lead,
            "subtraction_term": sub,
            "subtraction_over_leading": sub / lead if lead else float("nan"),
            "wd": wd,
        },
    )


def contour_matrix(
    inputs: DesignInputs, nbar_grid, cv_grid, m_cap: int = 100_000
) -> list[list[Optional[int]]]:
    """required_M over a (nbar x cv) grid; None marks infeasible cells.

    Rows follow cv_grid, columns follow nbar_grid (matrix[i][j] is the cell
    at cv_grid[i], nbar_grid[j]). Cells are independent; the ascending scan
    is vectorized over all unresolved cells in chunks of M values.
    """
    nbars = np.asarray([float(v) for v in nbar_grid])
    cvs = np.asarray([float(v) for v in cv_grid])
    if np.any(np.diff(nbars) <= 0) or np.any(np.diff(cvs) <= 0):
        raise ValueError("grids must be strictly increasing")
    if not inputs.composite and inputs.test == "z":
        out: list[list[Optional[int]]] = []
        for cv in cvs:
            row: list[Optional[int]] = []
            for nbar in nbars:
                try:
                    row.append(
                        required_clusters(
                            _replace(inputs, nbar=float(nbar), cv=float(cv))
                        ).required_M
                    )
                except InfeasibleDesignError:
                    row.append(None)
            out.append(row)
        return out

    cv_mesh, nb_mesh = np.meshgrid(cvs, nbars, indexing="ij")
    nb = nb_mesh.ravel()
    cvv = cv_mesh.ravel()
    ncell = nb.size
    result = np.zeros(ncell, dtype=np.int64)
    unresolved = np.ones(ncell, dtype=bool)

    wd = inputs.wd_value()
    mult = inputs.multiplier()
    alloc = _allocation(inputs.q)
    vifs = 1.0 + inputs.icc * ((1.0 + cvv**2) * nb - 1.0)
    a = inputs.alpha / 2.0 if inputs.sided == "two" else inputs.alpha
    beta = 1.0 - inputs.target_power

    chunk = 512
    m_lo = 4
    while unresolved.any() and m_lo <= m_cap:
        ms = np.arange(m_lo, min(m_lo + chunk, m_cap + 1), dtype=np.float64)
        idx = np.nonzero(unresolved)[0]
        n = ms[:, None] * nb[idx][None, :]
        if inputs.composite:
            cp = inputs.composite_probs
            bracket = 4.0 * (
                1.0 + (n - 1.0) * cp.P + (n - 1.0) * (n - 2.0) * cp.Q
            ) - (n + 1.0) ** 2
            core = (
                bracket
                * alloc
                * vifs[idx][None, :]
                / (ms[:, None] ** 3 * nb[idx][None, :] ** 3)
            )
        else:
            core = (
                (1.0 - inputs.pi_tie**2)
                / (3.0 * ms[:, None] * nb[idx][None, :])
                * alloc
                * vifs[idx][None, :]
            )
        if not inputs.contiguous:
            core = core - wd * wd / ms[:, None]
        var = mult * core
        if inputs.test == "z":
            qsum = dist.norm_ppf(1.0 - a) + dist.norm_ppf(1.0 - beta)
            qsum = np.full(ms.shape, qsum)
        else:
            dfs = ms - 2.0
            qsum = dist.t_ppf(1.0 - a, dfs) + dist.t_ppf(1.0 - beta, dfs)
        ok = (var > 0.0) & (qsum[:, None] ** 2 * var / inputs.delta**2 <= 1.0)
        first = np.argmax(ok, axis=0)
        hit = ok[first, np.arange(idx.size)]
        result[idx[hit]] = ms[first[hit]].astype(np.int64)
        unresolved[idx[hit]] = False
        m_lo += chunk

    grid = result.reshape(cvs.size, nbars.size)
    open_cells = unresolved.reshape(cvs.size, nbars.size)
    return [
        [None if open_cells[i, j] else int(grid[i, j]) for j in range(nbars.size)]
        for i in range(cvs.size)
    ]


def _replace(inputs: DesignInputs, **kw) -> DesignInputs:
    from dataclasses import replace

    return replace(inputs, **kw)
