"""Backend equivalence and dispatch of the Monte Carlo kernels."""

import os
import subprocess
import sys

import numpy as np
import pytest

from qmoney import kernels
from qmoney.kernels import numpy_backend

try:
    from qmoney.kernels import numba_backend
except ImportError:  # pragma: no cover
    numba_backend = None

needs_numba = pytest.mark.skipif(numba_backend is None, reason="numba unavailable")


def make_inputs(rng, trials=5000, k=4, rows=16, m=4):
    probs = rng.random((rows, m))
    probs /= probs.sum(axis=1, keepdims=True)
    cum = np.cumsum(probs, axis=1)
    x = rng.integers(0, rows, size=(trials, k), dtype=np.int64)
    u = rng.random((trials, k))
    valid = rng.random((m, rows)) < 0.6
    return cum, x, u, valid


def test_sample_outcomes_matches_python_loop():
    rng = np.random.default_rng(1)
    cum, x, u, _ = make_inputs(rng)
    rows, draws = x[:, 0], u[:, 0]
    got = numpy_backend.sample_outcomes(cum, rows, draws)
    for i in range(200):
        c = cum[rows[i]]
        expect = 3
        for j in range(4):
            if draws[i] < c[j]:
                expect = j
                break
        assert got[i] == expect


@needs_numba
def test_backends_agree_sample_outcomes():
    rng = np.random.default_rng(2)
    cum, x, u, _ = make_inputs(rng)
    a = numpy_backend.sample_outcomes(cum, x[:, 0], u[:, 0])
    b = numba_backend.sample_outcomes(cum, x[:, 0], u[:, 0])
    assert np.array_equal(a, b)


@needs_numba
def test_backends_agree_product_game_wins():
    rng = np.random.default_rng(3)
    cum, x, u, valid = make_inputs(rng)
    a = numpy_backend.product_game_wins(x, u, cum, valid)
    b = numba_backend.product_game_wins(x, u, cum, valid)
    assert np.array_equal(a, b)


@needs_numba
def test_backends_agree_double_use_wins():
    rng = np.random.default_rng(4)
    cum, x, u, valid = make_inputs(rng)
    cond = np.cumsum(
        (lambda p: p / p.sum(axis=1, keepdims=True))(rng.random((4, 4))), axis=1
    )
    ok2 = rng.random((4, 16)) < 0.5
    a = numpy_backend.double_use_wins(x[:, 0], u[:, 0], u[:, 1], cum, cond, valid, ok2)
    b = numba_backend.double_use_wins(x[:, 0], u[:, 0], u[:, 1], cum, cond, valid, ok2)
    assert np.array_equal(a, b)


@needs_numba
def test_backends_agree_register_validity_flags():
    rng = np.random.default_rng(5)
    cum, x, u, valid = make_inputs(rng)
    ok2 = rng.random((4, 16)) < 0.5
    a = numpy_backend.register_validity_flags(x[:, 0], u[:, 0], cum, valid, ok2)
    b = numba_backend.register_validity_flags(x[:, 0], u[:, 0], cum, valid, ok2)
    assert np.array_equal(a, b)


def test_edge_draw_clamps_to_last_outcome():
    cum = np.array([[0.25, 0.5, 0.75, 1.0 - 1e-12]])
    rows = np.zeros(1, dtype=np.int64)
    u = np.array([1.0 - 1e-13])  # beyond the last cumulative entry
    assert numpy_backend.sample_outcomes(cum, rows, u)[0] == 3
    if numba_backend is not None:
        assert numba_backend.sample_outcomes(cum, rows, u)[0] == 3


def test_env_flag_forces_numpy_backend():
    env = dict(os.environ, QMONEY_NO_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", "from qmoney import kernels; print(kernels.BACKEND)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "numpy"


def test_default_backend_reported():
    assert kernels.BACKEND in ("numba", "numpy")
