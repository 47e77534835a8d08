"""Clustered composite-endpoint data containers and validation.

A subject carries one component per tier. Tiers are positive integers,
larger = higher clinical priority. Survival tiers hold an observed time and
a censoring flag (a censored component's value is the censoring horizon);
scalar tiers hold a fully observed value. Comparison direction for scalar
tiers defaults to larger-is-better and can be flipped per tier.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np


class DataError(ValueError):
    """Structural problem in trial data."""


@dataclass(frozen=True)
class Component:
    tier: int
    value: float
    censored: bool = False


@dataclass(frozen=True)
class SubjectRecord:
    subject_id: str
    cluster_id: str
    arm: int
    components: tuple[Component, ...]

    def __post_init__(self):
        if self.arm not in (0, 1):
            raise DataError(f"subject {self.subject_id}: arm must be 0 or 1")
        if not self.components:
            raise DataError(f"subject {self.subject_id}: no outcome components")
        tiers = [c.tier for c in self.components]
        if len(set(tiers)) != len(tiers):
            raise DataError(f"subject {self.subject_id}: duplicate tiers {tiers}")
        if any(c.tier < 1 for c in self.components):
            raise DataError(f"subject {self.subject_id}: tiers must be >= 1")

    def tier_set(self) -> frozenset[int]:
        return frozenset(c.tier for c in self.components)


def make_subject(
    subject_id: str,
    cluster_id: str,
    arm: int,
    components: Iterable[tuple[int, float, bool]] | Iterable[Component],
) -> SubjectRecord:
    comps = tuple(
        c if isinstance(c, Component) else Component(int(c[0]), float(c[1]), bool(c[2]))
        for c in components
    )
    return SubjectRecord(str(subject_id), str(cluster_id), int(arm), comps)


@dataclass
class TrialDataset:
    """Validated collection of subjects with cluster-level treatment.

    ``directions`` optionally flips scalar tiers to smaller-is-better
    (value -1); survival tiers ignore it.
    """

    subjects: list[SubjectRecord]
    directions: Mapping[int, int] = field(default_factory=dict)
    # tiers forced to survival semantics even when nobody is censored on them
    # (set by the long-format parser whenever censoring rows are present)
    survival_tiers: frozenset[int] = frozenset()

    def __post_init__(self):
        if not self.subjects:
            raise DataError("empty dataset")
        tiers = self.subjects[0].tier_set()
        for s in self.subjects:
            if s.tier_set() != tiers:
                raise DataError(
                    "mismatched tier sets: subject "
                    f"{self.subjects[0].subject_id} has {sorted(tiers)}, "
                    f"subject {s.subject_id} has {sorted(s.tier_set())}"
                )
        arm_of: dict[str, int] = {}
        for s in self.subjects:
            prev = arm_of.setdefault(s.cluster_id, s.arm)
            if prev != s.arm:
                raise DataError(
                    f"cluster {s.cluster_id} appears under both arms"
                )
        seen = set()
        for s in self.subjects:
            if s.subject_id in seen:
                raise DataError(f"duplicate subject id {s.subject_id}")
            seen.add(s.subject_id)
        self.cluster_ids = sorted(arm_of)
        if len(self.cluster_ids) < 2:
            raise DataError("need at least 2 clusters")
        if len({arm_of[c] for c in self.cluster_ids}) < 2:
            raise DataError("need at least one cluster per arm")
        self.cluster_arm = np.array(
            [arm_of[c] for c in self.cluster_ids], dtype=np.int8
        )
        self.tiers = sorted(tiers, reverse=True)  # decreasing priority
        for t, d in self.directions.items():
            if d not in (1, -1):
                raise DataError(f"direction for tier {t} must be +1 or -1")

    # -- derived quantities ------------------------------------------------

    @property
    def M(self) -> int:
        return len(self.cluster_ids)

    @property
    def n(self) -> int:
        return len(self.subjects)

    def cluster_sizes(self) -> np.ndarray:
        idx = {c: k for k, c in enumerate(self.cluster_ids)}
        out = np.zeros(self.M, dtype=np.int64)
        for s in self.subjects:
            out[idx[s.cluster_id]] += 1
        return out

    @property
    def n1(self) -> int:
        sizes = self.cluster_sizes()
        return int(sizes[self.cluster_arm == 1].sum())

    @property
    def n0(self) -> int:
        sizes = self.cluster_sizes()
        return int(sizes[self.cluster_arm == 0].sum())

    @property
    def q_hat(self) -> float:
        return float((self.cluster_arm == 1).sum() / self.M)

    # -- dense encoding for the kernels -------------------------------------

    def to_arrays(self):
        """times, events, kinds, arms, cluster_index (kernel encoding)."""
        n, K = self.n, len(self.tiers)
        times = np.empty((n, K), dtype=np.float64)
        events = np.empty((n, K), dtype=np.int8)
        col = {t: v for v, t in enumerate(self.tiers)}
        survival = {t: t in self.survival_tiers for t in self.tiers}
        for s in self.subjects:
            for c in s.components:
                if c.censored:
                    survival[c.tier] = True
        kinds = np.empty(K, dtype=np.int8)
        for t, v in col.items():
            kinds[v] = 0 if survival[t] else self.directions.get(t, 1)
        cidx = {c: k for k, c in enumerate(self.cluster_ids)}
        arms = np.empty(n, dtype=np.int8)
        cluster_index = np.empty(n, dtype=np.int64)
        for i, s in enumerate(self.subjects):
            arms[i] = s.arm
            cluster_index[i] = cidx[s.cluster_id]
            for c in s.components:
                times[i, col[c.tier]] = c.value
                events[i, col[c.tier]] = 0 if c.censored else 1
        return times, events, kinds, arms, cluster_index
