"""Dispatch to the numba kernels or the numpy fallback (see _backend)."""

from ._backend import USE_NUMBA

if USE_NUMBA:
    from ._kernels_jit import pair_scores, score_vs_pool
else:
    from ._kernels_np import pair_scores, score_vs_pool

__all__ = ["pair_scores", "score_vs_pool", "USE_NUMBA"]
