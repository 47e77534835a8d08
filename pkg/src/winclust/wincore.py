"""Pairwise win kernels, cluster scores, estimators and Wald tests.

Everything here operates on observed clustered data. The three estimands are
the win difference (net benefit) W_D, the log win ratio and the log win odds,
linked through

    log WR = 2 atanh(W_D / (1 - pi_tie)),   log WO = 2 atanh(W_D),

with standard errors from the cluster-score central limit theorem: the net
score of subject (i,j) against everyone is phi_ij, cluster scores
S_i = sum_j phi_ij, and the variance of the estimators follows from the
arm-specific sample variances of S_i.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import dist
from ._kernels import pair_scores
from .data import DataError, SubjectRecord, TrialDataset


class PairResult(enum.Enum):
    WIN = 1
    TIE = 0
    LOSS = -1


def classify_pair(
    a: SubjectRecord, b: SubjectRecord, directions: dict[int, int] | None = None
) -> PairResult:
    """Hierarchical comparison of two subjects, from a's perspective.

    Tiers are walked in decreasing priority. On a survival tier, a wins when
    b's event is observed strictly inside the common observation window
    (an event exactly at a censoring time counts as before it; two equal
    event times tie within the tier). A tier that cannot be decided falls
    through to the next one; exhausting all tiers is a tie.
    """
    if a.tier_set() != b.tier_set():
        raise DataError(
            f"subjects {a.subject_id} and {b.subject_id} have different tier sets"
        )
    directions = directions or {}
    ca = {c.tier: c for c in a.components}
    cb = {c.tier: c for c in b.components}
    for tier in sorted(ca, reverse=True):
        x, y = ca[tier], cb[tier]
        if x.censored or y.censored:
            # survival semantics
            if (not y.censored) and (y.value < x.value or (y.value == x.value and x.censored)):
                return PairResult.WIN
            if (not x.censored) and (x.value < y.value or (x.value == y.value and y.censored)):
                return PairResult.LOSS
        else:
            sign = directions.get(tier, 1)
            if x.value != y.value:
                better = x.value > y.value if sign > 0 else x.value < y.value
                return PairResult.WIN if better else PairResult.LOSS
    return PairResult.TIE


@dataclass
class ComparisonTally:
    """Cross-arm W/L/T counts plus per-subject and per-cluster scores."""

    W: int
    L: int
    T: int
    phi: np.ndarray  # aligned with dataset.subjects
    S: np.ndarray  # aligned with dataset.cluster_ids
    subject_ids: list[str]
    cluster_ids: list[str]
    cluster_arm: np.ndarray
    cluster_sizes: np.ndarray
    cluster_index: np.ndarray  # subject -> position in cluster_ids
    n1: int
    n0: int

    @property
    def M(self) -> int:
        return len(self.cluster_ids)

    @property
    def n(self) -> int:
        return len(self.subject_ids)

    def midranks(self) -> np.ndarray:
        """Generalized mid-ranks R*_ij = (phi_ij + n + 1) / 2."""
        return (self.phi + self.n + 1) / 2.0

    def phi_by_subject(self) -> dict[str, int]:
        return {sid: int(p) for sid, p in zip(self.subject_ids, self.phi)}

    def scores_by_cluster(self) -> dict[str, int]:
        return {cid: int(s) for cid, s in zip(self.cluster_ids, self.S)}


def tally_arrays(
    times: np.ndarray,
    events: np.ndarray,
    kinds: np.ndarray,
    arms: np.ndarray,
    cluster_index: np.ndarray,
    M: int,
    subject_ids: list[str] | None = None,
    cluster_ids: list[str] | None = None,
) -> ComparisonTally:
    """Tally on the dense kernel encoding (fast path for simulations)."""
    phi, W, L, T = pair_scores(times, events, kinds, arms)
    S = np.bincount(cluster_index, weights=phi, minlength=M).astype(np.int64)
    sizes = np.bincount(cluster_index, minlength=M).astype(np.int64)
    cluster_arm = np.zeros(M, dtype=np.int8)
    cluster_arm[cluster_index] = arms
    n = len(arms)
    return ComparisonTally(
        W=int(W),
        L=int(L),
        T=int(T),
        phi=phi,
        S=S,
        subject_ids=subject_ids or [str(i) for i in range(n)],
        cluster_ids=cluster_ids or [str(i) for i in range(M)],
        cluster_arm=cluster_arm,
        cluster_sizes=sizes,
        cluster_index=cluster_index,
        n1=int(sizes[cluster_arm == 1].sum()),
        n0=int(sizes[cluster_arm == 0].sum()),
    )


def tally(data: TrialDataset) -> ComparisonTally:
    """Count wins/losses/ties over ordered cross-arm pairs (treated first)
    and accumulate subject net scores over all pairs in one O(n^2) pass."""
    times, events, kinds, arms, cluster_index = data.to_arrays()
    tl = tally_arrays(
        times,
        events,
        kinds,
        arms,
        cluster_index,
        data.M,
        subject_ids=[s.subject_id for s in data.subjects],
        cluster_ids=list(data.cluster_ids),
    )
    return tl


@dataclass
class EstimandResult:
    name: str
    estimate: float
    se: float
    z: float
    p_z: float
    t: float
    p_t: float
    ci_z: tuple[float, float]
    ci_t: tuple[float, float]
    defined: bool = True
    note: str = ""


@dataclass
class WinEstimates:
    wd_hat: float
    log_wr_hat: float
    log_wo_hat: float
    se_d: float
    se_r: float
    se_o: float
    pi_tie_hat: float
    rank_icc_hat: float
    sigma1_hat: float
    sigma0_hat: float
    sbar1: float
    sbar0: float
    alpha: float
    alternative: str
    df: int
    by_estimand: dict[str, EstimandResult] = field(default_factory=dict)
    W: int = 0
    L: int = 0
    T: int = 0
    n1: int = 0
    n0: int = 0
    M: int = 0
    M1: int = 0
    M0: int = 0


def _pvalue(stat: float, cdf, alternative: str) -> float:
    if alternative == "two.sided":
        return 2.0 * (1.0 - cdf(abs(stat)))
    if alternative == "greater":
        return 1.0 - cdf(stat)
    if alternative == "less":
        return cdf(stat)
    raise ValueError(f"unknown alternative {alternative!r}")


def estimate(
    data: TrialDataset | None = None,
    alpha: float = 0.05,
    alternative: str = "two.sided",
    comparison: ComparisonTally | None = None,
) -> WinEstimates:
    """Point estimates, plug-in standard errors, Wald z and t tests and CIs
    for all three estimands on one dataset (or a precomputed tally)."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must be in (0, 1)")
    if comparison is None and data is None:
        raise ValueError("need a dataset or a comparison tally")
    tl = comparison if comparison is not None else tally(data)
    M = tl.M
    n1, n0 = tl.n1, tl.n0
    M1 = int((tl.cluster_arm == 1).sum())
    M0 = M - M1
    q = M1 / M
    npairs = n1 * n0

    wd = (tl.W - tl.L) / npairs
    pi_tie = tl.T / npairs

    S = tl.S.astype(np.float64)
    s1 = S[tl.cluster_arm == 1]
    s0 = S[tl.cluster_arm == 0]
    sbar1 = float(s1.mean())
    sbar0 = float(s0.mean())
    if M1 >= 2 and M0 >= 2:
        sig1 = float(s1.var(ddof=1))
        sig0 = float(s0.var(ddof=1))
        factor = (M * q * (1 - q) / npairs) ** 2
        var_d = factor * (sig1 / (q * M) + sig0 / ((1 - q) * M))
    else:
        sig1 = sig0 = var_d = float("nan")
    se_d = math.sqrt(var_d) if var_d == var_d else float("nan")

    # delta-method multipliers, Eq. 1 scale
    ratio_defined = tl.L > 0 and pi_tie < 1.0 and tl.W > 0
    u = wd / (1 - pi_tie) if pi_tie < 1.0 else float("nan")
    if ratio_defined:
        log_wr = 2.0 * math.atanh(u)
        mult_r = 2.0 * (1.0 / (1.0 - pi_tie)) / (1.0 - u * u)
        se_r = abs(mult_r) * se_d
    else:
        log_wr, se_r = float("nan"), float("nan")
    wo_defined = abs(wd) < 1.0
    if wo_defined:
        log_wo = 2.0 * math.atanh(wd)
        mult_o = 2.0 / (1.0 - wd * wd)
        se_o = mult_o * se_d
    else:
        log_wo, se_o = float("nan"), float("nan")

    df = M - 2
    zq = dist.norm_ppf(1 - alpha / 2)
    tq = dist.t_ppf(1 - alpha / 2, df) if df >= 1 else float("nan")

    def pack(name, est, se, defined, note=""):
        if not defined or se != se or se <= 0:
            nan = float("nan")
            return EstimandResult(
                name, est, se, nan, nan, nan, nan, (nan, nan), (nan, nan),
                defined=False, note=note or "estimand undefined on this dataset",
            )
        stat = est / se
        p_z = _pvalue(stat, dist.norm_cdf, alternative)
        p_t = (
            _pvalue(stat, lambda x: dist.t_cdf(x, df), alternative)
            if df >= 1
            else float("nan")
        )
        ci_z = (est - zq * se, est + zq * se)
        ci_t = (
            (est - tq * se, est + tq * se) if df >= 1 else (float("nan"),) * 2
        )
        return EstimandResult(name, est, se, stat, p_z, stat, p_t, ci_z, ci_t)

    notes = {}
    if tl.L == 0:
        notes["logwr"] = "L = 0: win ratio undefined"
    elif tl.W == 0:
        notes["logwr"] = "W = 0: log win ratio is -inf"
    elif pi_tie >= 1.0:
        notes["logwr"] = "all pairs tied: win ratio undefined"

    by = {
        "wd": pack("wd", wd, se_d, True),
        "logwr": pack("logwr", log_wr, se_r, ratio_defined, notes.get("logwr", "")),
        "logwo": pack("logwo", log_wo, se_o, wo_defined),
    }

    try:
        icc = rank_icc(comparison=tl)
    except DataError:
        icc = float("nan")

    return WinEstimates(
        wd_hat=wd,
        log_wr_hat=log_wr,
        log_wo_hat=log_wo,
        se_d=se_d,
        se_r=se_r,
        se_o=se_o,
        pi_tie_hat=pi_tie,
        rank_icc_hat=icc,
        sigma1_hat=sig1,
        sigma0_hat=sig0,
        sbar1=sbar1,
        sbar0=sbar0,
        alpha=alpha,
        alternative=alternative,
        df=df,
        by_estimand=by,
        W=tl.W,
        L=tl.L,
        T=tl.T,
        n1=n1,
        n0=n0,
        M=M,
        M1=M1,
        M0=M0,
    )


def rank_icc(
    data: TrialDataset | None = None, comparison: ComparisonTally | None = None
) -> float:
    """ANOVA-type rank ICC: average within-cluster cross-product of centered
    scaled generalized mid-ranks over the total rank variance.

    Clusters of size one carry no pairs and are excluded from the numerator
    average; if no cluster has two members the estimator is undefined.
    """
    if comparison is None and data is None:
        raise ValueError("need a dataset or a comparison tally")
    tl = comparison if comparison is not None else tally(data)
    sizes = tl.cluster_sizes
    if not (sizes >= 2).any():
        raise DataError("rank ICC undefined: no cluster has two members")
    u = tl.midranks() / tl.n
    centered = u - u.mean()
    denom = float((centered**2).mean())
    if denom == 0.0:
        raise DataError("degenerate ranks: all outcomes identical")
    # per-cluster sums of centered ranks give the pair cross-product totals:
    # sum_{j != j'} x_j x_j' = (sum x)^2 - sum x^2
    tot = np.bincount(tl.cluster_index, weights=centered, minlength=tl.M)
    tot2 = np.bincount(tl.cluster_index, weights=centered**2, minlength=tl.M)
    mask = sizes >= 2
    pair_mean = (tot[mask] ** 2 - tot2[mask]) / (
        sizes[mask] * (sizes[mask] - 1.0)
    )
    return float(pair_mean.mean() / denom)


def permutation_variance(tl: ComparisonTally, q: float) -> float:
    """Null permutation variance of the net-benefit estimator:
    q(1-q) * M/(M-1) * sum_i S_i^2 / (n1 n0)^2."""
    if not 0 < q < 1:
        raise ValueError("q must be in (0, 1)")
    s2 = float((tl.S.astype(np.float64) ** 2).sum())
    return q * (1 - q) * tl.M / (tl.M - 1) * s2 / (tl.n1 * tl.n0) ** 2
