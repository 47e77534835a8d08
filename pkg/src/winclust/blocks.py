"""Tie-block calculus: pairwise/triplet probabilities of a totally ordered
configuration with transitive ties, and exact finite-sample identities used
as oracles for the composite variance machinery.

A configuration is a list of block sizes [t_1, ..., t_G], ordered from least
to most favorable; members of a block tie with each other and beat every
member of earlier blocks.
"""

from __future__ import annotations

import itertools
import math
from typing import Sequence


def block_probs(blocks: Sequence[int]) -> dict[str, float]:
    """(p_W, p_T, p_WW, p_WT, p_TT) of a random anchor against random
    distinct opponents, from block sizes."""
    t = list(blocks)
    if any(b < 1 for b in t):
        raise ValueError("block sizes must be >= 1")
    n = sum(t)
    L = list(itertools.accumulate([0] + t[:-1]))  # strictly-worse counts
    if n >= 2:
        pairs = n * (n - 1)
        p_w = sum(tg * lg for tg, lg in zip(t, L)) / pairs
        p_t = sum(tg * (tg - 1) for tg in t) / pairs
    else:
        p_w = p_t = 0.0
    if n >= 3:
        triples = n * (n - 1) * (n - 2)
        p_ww = sum(tg * lg * (lg - 1) for tg, lg in zip(t, L)) / triples
        p_wt = sum(tg * lg * (tg - 1) for tg, lg in zip(t, L)) / triples
        p_tt = sum(tg * (tg - 1) * (tg - 2) for tg in t) / triples
    else:
        p_ww = p_wt = p_tt = 0.0
    return {"p_w": p_w, "p_t": p_t, "p_ww": p_ww, "p_wt": p_wt, "p_tt": p_tt}


def mean_square_midrank(blocks: Sequence[int]) -> float:
    """Exact average squared mid-rank: (n+1)(2n+1)/6 - sum t(t^2-1)/(12n)."""
    t = list(blocks)
    n = sum(t)
    return (n + 1) * (2 * n + 1) / 6.0 - sum(b * (b * b - 1) for b in t) / (12.0 * n)


def partitions(n: int):
    """All integer partitions of n (non-increasing parts)."""
    if n == 0:
        yield []
        return
    for first in range(n, 0, -1):
        for rest in partitions(n - first):
            if not rest or rest[0] <= first:
                yield [first] + rest


def mean_pi_tie_complete_randomization(blocks: Sequence[int], n1: int) -> float:
    """Average of pi_tie_hat = sum_g t_g^1 t_g^0 / (n1 n0) over every
    complete-randomization assignment of n1 treated among n subjects.

    Brute-force enumeration; used as the oracle for the exact identity
    mean(pi_tie_hat) = p_T.
    """
    t = list(blocks)
    n = sum(t)
    n0 = n - n1
    if not 0 < n1 < n:
        raise ValueError("need 0 < n1 < n")
    labels = []
    for g, size in enumerate(t):
        labels.extend([g] * size)
    total = 0.0
    count = 0
    for treated in itertools.combinations(range(n), n1):
        tg1 = [0] * len(t)
        for i in treated:
            tg1[labels[i]] += 1
        total += sum(a * (tg - a) for a, tg in zip(tg1, t)) / (n1 * n0)
        count += 1
    assert count == math.comb(n, n1)
    return total / count
