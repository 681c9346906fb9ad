"""Batched Monte Carlo inner loops.

Two interchangeable backends provide the same four functions:

- ``sample_outcomes(cum, rows, u)``: categorical sampling against a
  per-row cumulative probability table.
- ``product_game_wins(x, u, cum, valid)``: win indicator for trials of the
  k-fold product of a single-measurement game.
- ``double_use_wins(x, u1, u2, cum1, cond_cum, ok1, ok2)``: win indicator
  for measure-then-reuse trials (second measurement applied to the
  collapsed first outcome).
- ``register_validity_flags(x, u, cum, ok0, ok1)``: per-register validity
  of the two stored answers produced by one measurement.

All randomness is passed in as pre-drawn uniform arrays, so both backends
return bit-identical results and callers keep full control of seeding.

The numba backend is used when available; set QMONEY_NO_NUMBA=1 to force
the pure-numpy fallback.
"""

from __future__ import annotations

import os

from . import numpy_backend

_FLAG = os.environ.get("QMONEY_NO_NUMBA", "").strip().lower()
_DISABLED = _FLAG in ("1", "true", "yes", "on")

if not _DISABLED:
    try:
        from . import numba_backend as _impl

        BACKEND = "numba"
    except ImportError:
        _impl = numpy_backend
        BACKEND = "numpy"
else:
    _impl = numpy_backend
    BACKEND = "numpy"

sample_outcomes = _impl.sample_outcomes
product_game_wins = _impl.product_game_wins
double_use_wins = _impl.double_use_wins
register_validity_flags = _impl.register_validity_flags

__all__ = [
    "BACKEND",
    "sample_outcomes",
    "product_game_wins",
    "double_use_wins",
    "register_validity_flags",
]
