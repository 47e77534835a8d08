"""Pure-numpy fallback kernels, blocked to bound memory at O(block * n)."""

import numpy as np

_BLOCK = 256


def _sign_block(a_times, a_events, b_times, b_events, kinds):
    """Pairwise sign matrix for a block of anchors against all of B."""
    na, K = a_times.shape
    nb = b_times.shape[0]
    sign = np.zeros((na, nb), dtype=np.int8)
    undecided = np.ones((na, nb), dtype=bool)
    for v in range(K):
        ta = a_times[:, v][:, None]
        tb = b_times[None, :, v]
        if kinds[v] == 0:
            ea = a_events[:, v][:, None].astype(bool)
            eb = b_events[None, :, v].astype(bool)
            a_wins = eb & ((tb < ta) | ((tb == ta) & ~ea))
            b_wins = ea & ((ta < tb) | ((ta == tb) & ~eb))
        else:
            a_wins = ta > tb
            b_wins = tb > ta
            if kinds[v] < 0:
                a_wins, b_wins = b_wins, a_wins
        sign[undecided & a_wins] = 1
        sign[undecided & b_wins] = -1
        undecided &= ~(a_wins | b_wins)
        if not undecided.any():
            break
    return sign


def pair_scores(times, events, kinds, arms):
    n = times.shape[0]
    phi = np.zeros(n, dtype=np.int64)
    W = L = T = 0
    treated = arms == 1
    control = arms == 0
    for start in range(0, n, _BLOCK):
        stop = min(start + _BLOCK, n)
        sign = _sign_block(
            times[start:stop], events[start:stop], times, events, kinds
        )
        idx = np.arange(start, stop)
        sign[idx - start, idx] = 0
        phi[start:stop] = sign.sum(axis=1, dtype=np.int64)
        cross = sign[treated[start:stop]][:, control]
        W += int((cross == 1).sum())
        L += int((cross == -1).sum())
        T += int((cross == 0).sum())
    # self pairs were zeroed for phi; they never lie in the treated x control
    # rectangle, so W/L/T need no correction.
    return phi, W, L, T


def paired_sign(a_times, a_events, b_times, b_events, kinds):
    """Row-wise comparison sign of A[i] against B[i] (same length)."""
    n, K = a_times.shape
    sign = np.zeros(n, dtype=np.int8)
    undecided = np.ones(n, dtype=bool)
    for v in range(K):
        ta, tb = a_times[:, v], b_times[:, v]
        if kinds[v] == 0:
            ea = a_events[:, v].astype(bool)
            eb = b_events[:, v].astype(bool)
            a_wins = eb & ((tb < ta) | ((tb == ta) & ~ea))
            b_wins = ea & ((ta < tb) | ((ta == tb) & ~eb))
        else:
            a_wins = ta > tb
            b_wins = tb > ta
            if kinds[v] < 0:
                a_wins, b_wins = b_wins, a_wins
        sign[undecided & a_wins] = 1
        sign[undecided & b_wins] = -1
        undecided &= ~(a_wins | b_wins)
        if not undecided.any():
            break
    return sign


def score_vs_pool(a_times, a_events, b_times, b_events, kinds):
    na = a_times.shape[0]
    wins = np.zeros(na, dtype=np.int64)
    losses = np.zeros(na, dtype=np.int64)
    ties = np.zeros(na, dtype=np.int64)
    for start in range(0, na, _BLOCK):
        stop = min(start + _BLOCK, na)
        sign = _sign_block(
            a_times[start:stop], a_events[start:stop], b_times, b_events, kinds
        )
        wins[start:stop] = (sign == 1).sum(axis=1)
        losses[start:stop] = (sign == -1).sum(axis=1)
        ties[start:stop] = (sign == 0).sum(axis=1)
    return wins, losses, ties
