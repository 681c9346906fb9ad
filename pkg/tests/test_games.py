"""Retrieval games: exact values, the seesaw search, product-game sampling.

Expected values marked "frozen" were computed with exact rational
arithmetic over the dyadic amplitudes (see the enumeration oracle below).
"""

from fractions import Fraction

import numpy as np
import pytest

from qmoney.games import (
    MeasurementStrategy,
    RetrievalGame,
    double_answer_tables,
    double_use_win_rate,
    evaluate_strategy,
    game_gh,
    hadamard_strategy,
    physical_value_search,
    product_game_trial,
    product_game_win_rate,
    selective_value,
)
from qmoney.hmp import ALL_COLORINGS, Answer, hmp_relation, query_basis
from qmoney.qsim import HermitianOp, ProjectiveBasis, StateVec
from qmoney.seeding import spawn_rng


def exact_strategy_value(vectors, answers):
    """Enumeration oracle: game value of a double-answer strategy, exactly.

    ``vectors`` are basis rows with dyadic rational entries (no 1/sqrt2);
    the value is sum over x, o of (1/16) <v_o|alpha(x)>^2 [tuple valid].
    """
    total = Fraction(0)
    for x in ALL_COLORINGS:
        amps = [Fraction((-1) ** b, 2) for b in x.bits]
        for vec, tup in zip(vectors, answers):
            ip = sum(Fraction(c) * a for c, a in zip(vec, amps))
            a0, b0, a1, b1 = tup
            if hmp_relation(x, 0, Answer(a0, b0)) and hmp_relation(x, 1, Answer(a1, b1)):
                total += Fraction(1, 16) * ip * ip
    return total


def random_strategy(game, rng):
    z = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    q, _ = np.linalg.qr(z)
    basis = ProjectiveBasis(q.T)
    answers = tuple(game.answers[int(i)] for i in rng.integers(0, len(game.answers), 4))
    return MeasurementStrategy(basis, answers)


def test_game_structure():
    g = game_gh()
    assert len(g.hypotheses) == 16
    assert len(g.answers) == 16
    assert len(g.relation) == 64  # 4 fully-valid tuples per coloring
    assert ((0, 0, 0, 0), 0) in g.relation  # all-zero coloring, all-zero answer


def test_game_invariants():
    g = game_gh()
    for _, op in g.hypotheses:
        assert op.min_eigenvalue() >= -1e-10
    assert abs(float(g.total_op.trace().real) - 1.0) < 1e-9
    # total is the quarter-identity
    assert np.max(np.abs(g.total_op - np.eye(4) / 4.0)) < 1e-12


def test_selective_value_of_double_answer_game():
    assert selective_value(game_gh()) == pytest.approx(0.75, abs=1e-9)


def test_selective_value_trivial_games():
    rng = spawn_rng(30)
    ops = []
    for _ in range(3):
        z = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        ops.append(z @ z.conj().T)
    scale = sum(float(op.trace().real) for op in ops)
    hyps = [(i, HermitianOp(op / scale)) for i, op in enumerate(ops)]
    answers = ["yes", "no"]
    every = {(ans, i) for ans in answers for i in range(3)}
    assert selective_value(RetrievalGame(hyps, answers, every)) == pytest.approx(1.0, abs=1e-9)
    assert selective_value(RetrievalGame(hyps, answers, set())) == pytest.approx(0.0, abs=1e-12)


def test_hadamard_strategy_value_exact():
    strat = hadamard_strategy()
    # oracle in exact rationals over the +-1/2 basis entries
    vectors = [[v.real for v in vec.amplitudes] for vec in strat.basis.vectors]
    oracle = exact_strategy_value(vectors, strat.answers)
    assert oracle == Fraction(5, 8)
    assert evaluate_strategy(game_gh(), strat) == 0.625  # dyadic, bit-exact


def test_m0_basis_fixed_guess_value():
    # measure the query-0 basis, answer it honestly, guess (0,0) for query 1.
    # Frozen oracle value: 1/2 (the guess is valid iff x1 xor x3 = 0, which
    # holds for 8 of the 16 colorings, independent of the outcome).
    basis, amap = query_basis(0)
    answers = tuple((a, b, 0, 0) for a, b in amap)
    strat = MeasurementStrategy(basis, answers)
    value = evaluate_strategy(game_gh(), strat)
    assert value == pytest.approx(0.5, abs=1e-12)
    rng = spawn_rng(31)
    rate = product_game_win_rate(1, strat, 100_000, rng)
    assert rate == pytest.approx(0.5, abs=0.006)


def test_any_strategy_below_selective_ceiling():
    g = game_gh()
    sel = selective_value(g)
    rng = spawn_rng(32)
    for _ in range(1000):
        strat = random_strategy(g, rng)
        assert evaluate_strategy(g, strat) <= sel + 1e-9


def test_selective_value_invariant_under_rescaling():
    rng = spawn_rng(33)
    ops = []
    for _ in range(4):
        z = rng.standard_normal((4, 4))
        ops.append(z @ z.T)
    scale = sum(float(op.trace().real) for op in ops)
    hyps = [(i, HermitianOp(op / scale)) for i, op in enumerate(ops)]
    answers = [0, 1, 2]
    relation = {(0, 0), (0, 1), (1, 2), (2, 3), (2, 0)}
    base = selective_value(RetrievalGame(hyps, answers, relation))
    # scale all hypotheses by c, renormalize, value unchanged
    c = 3.7
    rescaled = [(i, HermitianOp(op / scale * c / c)) for i, op in enumerate(ops)]
    again = selective_value(RetrievalGame(rescaled, answers, relation))
    assert again == pytest.approx(base, abs=1e-12)


def test_physical_search_all_valid_game():
    rng = spawn_rng(34)
    hyps = [(0, HermitianOp(np.eye(4) / 4.0))]
    g = RetrievalGame(hyps, ["only"], {("only", 0)})
    value, strat = physical_value_search(g, 4, rng)
    assert value == pytest.approx(1.0, abs=1e-9)
    assert evaluate_strategy(g, strat) == value


def test_physical_search_double_answer_game():
    g = game_gh()
    rng = spawn_rng(35)
    value, strat = physical_value_search(g, 16, rng)
    assert 0.625 <= value <= 0.75 + 1e-6
    assert evaluate_strategy(g, strat) == value  # bit-exact by contract
    assert value <= selective_value(g) + 1e-9


def test_product_game_trial_vs_batch():
    strat = hadamard_strategy()
    rng = spawn_rng(36)
    single = np.mean([product_game_trial(2, strat, rng) for _ in range(20_000)])
    batch = product_game_win_rate(2, strat, 200_000, rng)
    # both estimate (5/8)^2 = 0.390625
    assert abs(single - 0.390625) < 0.012
    assert abs(batch - 0.390625) < 0.004


def test_product_game_respects_power_bound():
    strat = hadamard_strategy()
    rng = spawn_rng(37)
    for k in (1, 2, 3, 4):
        rate = product_game_win_rate(k, strat, 200_000, rng)
        bound = 0.75**k
        sigma = np.sqrt(bound * (1 - bound) / 200_000)
        assert rate <= bound + 3 * sigma


def test_double_answer_tables_shapes():
    tables = double_answer_tables(hadamard_strategy())
    assert tables.cum.shape == (16, 4)
    assert np.allclose(tables.cum[:, -1], 1.0)
    assert tables.valid_both.sum() > 0
    assert (tables.valid_both == (tables.valid_m0 & tables.valid_m1)).all()


def test_double_use_win_rate_near_half():
    rate = double_use_win_rate(200_000, spawn_rng(38))
    assert abs(rate - 0.5) < 0.005


def test_degenerate_game_rejected():
    with pytest.raises(ValueError):
        RetrievalGame([(0, HermitianOp(np.zeros((4, 4))))], ["a"], set())
