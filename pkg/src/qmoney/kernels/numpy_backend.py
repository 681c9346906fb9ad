"""Vectorized numpy implementations of the Monte Carlo kernels.

Outcome sampling convention (shared with the numba backend): given a
nondecreasing cumulative row ``c`` and a uniform draw ``u``, the outcome is
the count of entries c[j] <= u, clamped to the last index. Both backends
therefore produce identical integer outcomes for identical inputs.
"""

from __future__ import annotations

import numpy as np


def sample_outcomes(cum: np.ndarray, rows: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Outcome index per trial from cumulative table ``cum`` (R, M) and row picks."""
    c = cum[rows]  # (..., M)
    out = (c <= u[..., None]).sum(axis=-1)
    return np.minimum(out, cum.shape[1] - 1).astype(np.int64)


def product_game_wins(x, u, cum, valid):
    """AND over axis 1 of per-instance validity; x, u are (T, k)."""
    outcomes = sample_outcomes(cum, x, u)
    return valid[outcomes, x].all(axis=1)


def double_use_wins(x, u1, u2, cum1, cond_cum, ok1, ok2):
    """First measurement via cum1[x], second via cond_cum[first outcome]."""
    o1 = sample_outcomes(cum1, x, u1)
    o2 = sample_outcomes(cond_cum, o1, u2)
    return ok1[o1, x] & ok2[o2, x]


def register_validity_flags(x, u, cum, ok0, ok1):
    """(T, 2) booleans: validity of the stored m=0 and m=1 answers."""
    o = sample_outcomes(cum, x, u)
    return np.stack([ok0[o, x], ok1[o, x]], axis=1)
