"""Quantum retrieval games over dimension-4 states.

A retrieval game is a family of positive semidefinite operators rho_a
(one per hypothesis label, jointly trace-normalized) together with a
relation between answer labels and hypothesis labels. The *selective*
value allows postselected measurements (sub-normalized outcome families)
and is computed exactly here via a rank-1 reduction: it equals the best,
over answers, generalized top eigenvalue of the answer's correctness
operator against the total state. The *physical* value (genuine complete
measurements) is lower-bounded by a seesaw search over rank-1 projective
strategies with deterministic answer assignment.

The central instance is the double-answer game: from one encoding state,
produce answers to both possible queries at once. Its selective value is
exactly 3/4, and the parity-basis strategy below witnesses a physical
value of exactly 5/8.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .hmp import (
    ALL_COLORINGS,
    Answer,
    answer_validity,
    basis_cumprob,
    hmp_relation,
    hmp_state,
    query_basis,
)
from .qsim import DIM, HermitianOp, ProjectiveBasis, StateVec, measure

PSD_TOL = 1e-10
TRACE_TOL = 1e-9
SUPPORT_TOL = 1e-12


class RetrievalGame:
    """Hypothesis operators, answer labels, and the winning relation.

    ``hypotheses`` is a sequence of (label, HermitianOp) pairs; each
    operator must be positive semidefinite and their traces must sum to 1.
    ``relation`` contains (answer_label, hypothesis_label) pairs.
    """

    def __init__(self, hypotheses, answers, relation) -> None:
        self.hypotheses = tuple((label, op) for label, op in hypotheses)
        self.answers = tuple(answers)
        self.relation = frozenset(relation)
        if not self.hypotheses:
            raise ValueError("game needs at least one hypothesis")
        if not self.answers:
            raise ValueError("game needs at least one answer label")
        hyp_labels = {label for label, _ in self.hypotheses}
        if len(hyp_labels) != len(self.hypotheses):
            raise ValueError("duplicate hypothesis labels")
        ans_labels = set(self.answers)
        if len(ans_labels) != len(self.answers):
            raise ValueError("duplicate answer labels")
        for ans, hyp in self.relation:
            if ans not in ans_labels or hyp not in hyp_labels:
                raise ValueError(f"relation pair {(ans, hyp)!r} references unknown labels")
        total = np.zeros((DIM, DIM), dtype=np.complex128)
        for label, op in self.hypotheses:
            if op.min_eigenvalue() < -PSD_TOL:
                raise ValueError(f"hypothesis {label!r} is not positive semidefinite")
            total += op.entries
        trace = float(total.trace().real)
        if abs(trace - 1.0) > TRACE_TOL:
            raise ValueError(f"hypothesis traces must sum to 1, got {trace!r}")
        self.total_op = total

    def correctness_op(self, answer_label) -> np.ndarray:
        """Sum of rho_a over hypotheses related to ``answer_label``."""
        out = np.zeros((DIM, DIM), dtype=np.complex128)
        for label, op in self.hypotheses:
            if (answer_label, label) in self.relation:
                out += op.entries
        return out


@dataclass(frozen=True)
class MeasurementStrategy:
    """A rank-1 projective strategy: a basis plus one answer label per outcome."""

    basis: ProjectiveBasis
    answers: tuple

    def __post_init__(self):
        if len(self.answers) != DIM:
            raise ValueError(f"need one answer per outcome ({DIM}), got {len(self.answers)}")


def game_gh() -> RetrievalGame:
    """The double-answer game: hypotheses (1/16)|alpha(x)><alpha(x)|, answers
    all (a0, b0, a1, b1) tuples, winning iff both per-query answers are valid."""
    hypotheses = []
    for x in ALL_COLORINGS:
        op = HermitianOp.projector(hmp_state(x)).scaled(1.0 / 16.0)
        hypotheses.append((x.index, op))
    answers = [
        (a0, b0, a1, b1) for a0 in (0, 1) for b0 in (0, 1) for a1 in (0, 1) for b1 in (0, 1)
    ]
    relation = set()
    for x in ALL_COLORINGS:
        for tup in answers:
            a0, b0, a1, b1 = tup
            if hmp_relation(x, 0, Answer(a0, b0)) and hmp_relation(x, 1, Answer(a1, b1)):
                relation.add((tup, x.index))
    return RetrievalGame(hypotheses, answers, relation)


def selective_value(game: RetrievalGame) -> float:
    """Exact selective value via the rank-1 single-answer reduction.

    For each answer i, the best conditional success of an outcome that
    answers i is the top generalized eigenvalue of (correctness_i, total);
    the selective value is the max over answers.
    """
    total = game.total_op
    vals, vecs = np.linalg.eigh(total)
    support = vals > SUPPORT_TOL
    if not support.any():
        raise ValueError("total hypothesis operator is zero")
    w = vecs[:, support] / np.sqrt(vals[support])
    best = 0.0
    for ans in game.answers:
        num = game.correctness_op(ans)
        m = w.conj().T @ num @ w
        top = float(np.linalg.eigvalsh(m)[-1])
        if top > best:
            best = top
    return best


def evaluate_strategy(game: RetrievalGame, strat: MeasurementStrategy) -> float:
    """Exact value of a physical rank-1 strategy: sum of <v_o|C_{answer(o)}|v_o>."""
    value = 0.0
    for o, vec in enumerate(strat.basis.vectors):
        c = game.correctness_op(strat.answers[o])
        v = vec.amplitudes
        value += float(np.vdot(v, c @ v).real)
    return value


def _sorted_answer_order(answers):
    try:
        return sorted(range(len(answers)), key=lambda j: answers[j])
    except TypeError:
        return list(range(len(answers)))


def _greedy_assignment(game, basis_vectors, correctness, answer_order):
    """Best answer per outcome; ties go to the smallest answer label."""
    assignment = []
    scores = []
    for vec in basis_vectors:
        best_j = answer_order[0]
        best_s = -np.inf
        for j in answer_order:
            s = float(np.vdot(vec, correctness[j] @ vec).real)
            if s > best_s + 1e-15:
                best_s = s
                best_j = j
        assignment.append(best_j)
        scores.append(best_s)
    return assignment, scores


def _complement(chosen):
    """Orthonormal basis of the subspace orthogonal to the chosen vectors."""
    if not chosen:
        return np.eye(DIM, dtype=np.complex128)
    a = np.stack(chosen, axis=1)
    proj = np.eye(DIM, dtype=np.complex128) - a @ a.conj().T
    vals, vecs = np.linalg.eigh(proj)
    return vecs[:, len(chosen):]


def _haar_basis(rng: np.random.Generator) -> list[np.ndarray]:
    z = rng.standard_normal((DIM, DIM)) + 1j * rng.standard_normal((DIM, DIM))
    q, r = np.linalg.qr(z)
    q = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
    return [q[:, i].copy() for i in range(DIM)]


def physical_value_search(game: RetrievalGame, restarts: int, rng: np.random.Generator):
    """Seesaw lower bound on the physical value.

    Alternates greedy outcome reassignment with a basis rebuild (top
    eigenvectors of the assigned correctness operators on successively
    deflated subspaces); a rebuilt basis is only adopted when it improves
    the exact value, so the value is monotone within each restart. Returns
    the best (value, strategy) over all restarts, with the value equal to
    ``evaluate_strategy`` of the returned strategy.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    correctness = [game.correctness_op(ans) for ans in game.answers]
    answer_order = _sorted_answer_order(game.answers)

    best_value = -np.inf
    best_vectors = None
    best_assignment = None
    for _ in range(restarts):
        vectors = _haar_basis(rng)
        assignment, scores = _greedy_assignment(game, vectors, correctness, answer_order)
        value = sum(scores)
        for _ in range(64):
            # rebuild basis by deflation, strongest current outcomes first
            order = sorted(range(DIM), key=lambda o: (-scores[o], o))
            chosen: dict[int, np.ndarray] = {}
            picked: list[np.ndarray] = []
            for o in order:
                rem = _complement(picked)
                m = rem.conj().T @ correctness[assignment[o]] @ rem
                _, evecs = np.linalg.eigh(m)
                v = rem @ evecs[:, -1]
                chosen[o] = v
                picked.append(v)
            cand_vectors = [chosen[o] for o in range(DIM)]
            cand_assignment, cand_scores = _greedy_assignment(
                game, cand_vectors, correctness, answer_order
            )
            cand_value = sum(cand_scores)
            if cand_value > value + 1e-13:
                vectors, assignment, scores, value = (
                    cand_vectors,
                    cand_assignment,
                    cand_scores,
                    cand_value,
                )
            else:
                break
        if value > best_value:
            best_value = value
            best_vectors = vectors
            best_assignment = assignment

    basis = ProjectiveBasis([StateVec(v) for v in best_vectors])
    strat = MeasurementStrategy(basis, tuple(game.answers[j] for j in best_assignment))
    return evaluate_strategy(game, strat), strat


# ---------------------------------------------------------------------------
# The double-answer game played against actual encoding states.
# ---------------------------------------------------------------------------


def hadamard_strategy() -> MeasurementStrategy:
    """The parity-basis witness: measure in the basis of the four even-parity
    encoding rays; answer with the matched ray's parity tuple. Value exactly 5/8."""
    rays = ((0, 0, 0, 0), (0, 1, 0, 1), (0, 0, 1, 1), (0, 1, 1, 0))
    vectors = []
    answers = []
    for bits in rays:
        vectors.append([0.5 * (-1.0) ** b for b in bits])
        x1, x2, x3, x4 = bits
        answers.append((0, x1 ^ x2, 0, x1 ^ x3))
    return MeasurementStrategy(ProjectiveBasis(vectors), tuple(answers))


@dataclass(frozen=True)
class DoubleAnswerTables:
    """Dense tables for playing a double-answer strategy against alpha(x)."""

    cum: np.ndarray        # (16, 4) cumulative outcome probabilities per coloring
    valid_m0: np.ndarray   # (4, 16) stored m=0 answer valid
    valid_m1: np.ndarray   # (4, 16) stored m=1 answer valid
    valid_both: np.ndarray  # (4, 16) both stored answers valid


def double_answer_tables(strat: MeasurementStrategy) -> DoubleAnswerTables:
    cum = basis_cumprob(strat.basis)
    valid_m0 = np.zeros((4, 16), dtype=np.bool_)
    valid_m1 = np.zeros((4, 16), dtype=np.bool_)
    for o, tup in enumerate(strat.answers):
        a0, b0, a1, b1 = tup
        for x in ALL_COLORINGS:
            valid_m0[o, x.index] = hmp_relation(x, 0, Answer(a0, b0))
            valid_m1[o, x.index] = hmp_relation(x, 1, Answer(a1, b1))
    return DoubleAnswerTables(cum, valid_m0, valid_m1, valid_m0 & valid_m1)


def product_game_trial(k: int, strat: MeasurementStrategy, rng: np.random.Generator) -> bool:
    """One trial of the k-fold product game, played with real measurements:
    sample k colorings, prepare each encoding state, measure with ``strat``,
    win iff every instance's answer tuple is fully valid for its coloring."""
    if k < 1:
        raise ValueError("k must be >= 1")
    for _ in range(k):
        x = ALL_COLORINGS[int(rng.integers(16))]
        outcome, _ = measure(hmp_state(x), strat.basis, rng)
        a0, b0, a1, b1 = strat.answers[outcome]
        if not (hmp_relation(x, 0, Answer(a0, b0)) and hmp_relation(x, 1, Answer(a1, b1))):
            return False
    return True


def product_game_win_rate(
    k: int, strat: MeasurementStrategy, trials: int, rng: np.random.Generator
) -> float:
    """Monte Carlo win rate of the k-fold product game (kernel-batched)."""
    if k < 1 or trials < 1:
        raise ValueError("k and trials must be >= 1")
    tables = double_answer_tables(strat)
    x = rng.integers(0, 16, size=(trials, k), dtype=np.int64)
    u = rng.random((trials, k))
    wins = kernels.product_game_wins(x, u, tables.cum, tables.valid_both)
    return float(wins.sum()) / trials


def double_use_win_rate(trials: int, rng: np.random.Generator) -> float:
    """Monte Carlo rate of answering both queries by measuring the query-0
    basis and then re-measuring the collapsed register in the query-1 basis."""
    basis0, _ = query_basis(0)
    basis1, _ = query_basis(1)
    cum1 = basis_cumprob(basis0)
    # second-measurement distribution depends only on the first collapse
    ov = basis0.matrix.conj() @ basis1.matrix.T  # [o1, o2] = <w_{o2}|v_{o1}>
    cond = np.cumsum(ov.real**2 + ov.imag**2, axis=1)
    ok1 = answer_validity(0)
    ok2 = answer_validity(1)
    x = rng.integers(0, 16, size=trials, dtype=np.int64)
    u1 = rng.random(trials)
    u2 = rng.random(trials)
    wins = kernels.double_use_wins(x, u1, u2, cum1, cond, ok1, ok2)
    return float(wins.sum()) / trials
