"""Numba-compiled Monte Carlo kernels (same contracts as numpy_backend)."""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _pick(cum_row, u):
    m = cum_row.shape[0]
    for j in range(m):
        if u < cum_row[j]:
            return j
    return m - 1


@njit(cache=True)
def sample_outcomes(cum, rows, u):
    n = rows.shape[0]
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        out[i] = _pick(cum[rows[i]], u[i])
    return out


@njit(cache=True)
def product_game_wins(x, u, cum, valid):
    trials, k = x.shape
    wins = np.empty(trials, dtype=np.bool_)
    for t in range(trials):
        won = True
        for i in range(k):
            o = _pick(cum[x[t, i]], u[t, i])
            if not valid[o, x[t, i]]:
                won = False
                break
        wins[t] = won
    return wins


@njit(cache=True)
def double_use_wins(x, u1, u2, cum1, cond_cum, ok1, ok2):
    n = x.shape[0]
    wins = np.empty(n, dtype=np.bool_)
    for t in range(n):
        o1 = _pick(cum1[x[t]], u1[t])
        o2 = _pick(cond_cum[o1], u2[t])
        wins[t] = ok1[o1, x[t]] and ok2[o2, x[t]]
    return wins


@njit(cache=True)
def register_validity_flags(x, u, cum, ok0, ok1):
    n = x.shape[0]
    flags = np.empty((n, 2), dtype=np.bool_)
    for t in range(n):
        o = _pick(cum[x[t]], u[t])
        flags[t, 0] = ok0[o, x[t]]
        flags[t, 1] = ok1[o, x[t]]
    return flags
