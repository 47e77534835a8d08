"""Numba implementations of the hot pairwise-comparison kernels.

Subjects are encoded as dense per-tier arrays, columns ordered by decreasing
clinical priority:

    times[n, K]   observed time (survival tier) or value (scalar tier)
    events[n, K]  1 = event observed / value present, 0 = censored at times
    kinds[K]      0 = survival, +1 = scalar larger-is-better, -1 = smaller

All accumulators are integers, so results are exact and independent of the
number of threads.
"""

import numpy as np
from numba import njit, prange


@njit(cache=True)
def _pair_sign(times, events, kinds, i, j):
    # Lexicographic tier walk; equal event times tie within the tier and fall
    # through, an event at a censoring time counts as before the censoring.
    K = times.shape[1]
    for v in range(K):
        ta = times[i, v]
        tb = times[j, v]
        if kinds[v] == 0:
            ea = events[i, v]
            eb = events[j, v]
            if eb == 1 and (tb < ta or (tb == ta and ea == 0)):
                return 1
            if ea == 1 and (ta < tb or (ta == tb and eb == 0)):
                return -1
        else:
            if ta > tb:
                return kinds[v]
            if tb > ta:
                return -kinds[v]
    return 0


@njit(cache=True, parallel=True)
def pair_scores(times, events, kinds, arms):
    """Net scores phi_i over all opponents plus cross-arm W/L/T counts."""
    n = times.shape[0]
    phi = np.zeros(n, dtype=np.int64)
    W = 0
    L = 0
    T = 0
    for i in prange(n):
        acc = 0
        for j in range(n):
            if j == i:
                continue
            s = _pair_sign(times, events, kinds, i, j)
            acc += s
            if arms[i] == 1 and arms[j] == 0:
                if s > 0:
                    W += 1
                elif s < 0:
                    L += 1
                else:
                    T += 1
        phi[i] = acc
    return phi, W, L, T


@njit(cache=True, parallel=True)
def score_vs_pool(a_times, a_events, b_times, b_events, kinds):
    """Per-anchor win/loss/tie counts of rows in A against all rows in B."""
    na = a_times.shape[0]
    nb = b_times.shape[0]
    K = a_times.shape[1]
    wins = np.zeros(na, dtype=np.int64)
    losses = np.zeros(na, dtype=np.int64)
    ties = np.zeros(na, dtype=np.int64)
    for i in prange(na):
        w = 0
        lo = 0
        t = 0
        for j in range(nb):
            s = 0
            for v in range(K):
                ta = a_times[i, v]
                tb = b_times[j, v]
                if kinds[v] == 0:
                    ea = a_events[i, v]
                    eb = b_events[j, v]
                    if eb == 1 and (tb < ta or (tb == ta and ea == 0)):
                        s = 1
                        break
                    if ea == 1 and (ta < tb or (ta == tb and eb == 0)):
                        s = -1
                        break
                else:
                    if ta > tb:
                        s = kinds[v]
                        break
                    if tb > ta:
                        s = -kinds[v]
                        break
            if s > 0:
                w += 1
            elif s < 0:
                lo += 1
            else:
                t += 1
        wins[i] = w
        losses[i] = lo
        ties[i] = t
    return wins, losses, ties
