"""Counterfeiting strategies and the both-must-pass evaluation harness.

Counterfeits are per-register response sources claiming some coin id:
a quantum register (measured on demand, collapsing), a fixed answer table
(one stored answer per query value), or uniformly random answers. Success
of an attack is always the probability that *two* counterfeits pass
independent verification sessions; a single-pass criterion would be
trivially beaten by handing over the real coin plus junk.

The adaptive attack interleaves auxiliary verification sessions with
belief updates: an accepted session proves every played answer correct
(the bank checks all of them), a rejected session implicates each played
unconfirmed answer with equal likelihood. The budget counts a session the
moment the bank's first response (the challenge) has been received.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .games import MeasurementStrategy, double_answer_tables, hadamard_strategy
from .hmp import Answer, query_basis
from .money import BankDb, Coin, mint
from .protocol import (
    Answers,
    BankSession,
    CoinRetired,
    Init,
    ProtocolAbort,
    Subset,
    Verdict,
)
from .qsim import StateVec, measure
from .seeding import spawn_rng
from .transport import LocalBank, TransportError


class BudgetExceeded(RuntimeError):
    """The attack tried to analyze more first responses than its budget allows."""


@dataclass
class AttackBudget:
    """Auxiliary-instance accounting: U, completed count, won count."""

    max_aux_instances: int
    aux_completed: int = 0
    aux_won: int = 0

    def note_first_response(self) -> None:
        if self.aux_completed >= self.max_aux_instances:
            raise BudgetExceeded(
                f"budget of {self.max_aux_instances} auxiliary instances exhausted"
            )
        self.aux_completed += 1

    def note_win(self) -> None:
        self.aux_won += 1


# ---------------------------------------------------------------------------
# Response sources.
# ---------------------------------------------------------------------------


class QuantumRegister:
    """A genuine register: measured on demand in the query basis, collapsing."""

    __slots__ = ("initial", "current")

    def __init__(self, state: StateVec) -> None:
        self.initial = state
        self.current = state

    def reset(self) -> None:
        self.current = self.initial

    def respond(self, m: int, rng: np.random.Generator) -> Answer:
        basis, amap = query_basis(m)
        outcome, collapsed = measure(self.current, basis, rng)
        self.current = collapsed
        return amap[outcome]


class AnswerTable:
    """Fixed stored answers, one per query value."""

    __slots__ = ("answers",)

    def __init__(self, answer_m0: Answer, answer_m1: Answer) -> None:
        self.answers = (Answer(*answer_m0), Answer(*answer_m1))

    def reset(self) -> None:
        pass

    def respond(self, m: int, rng: np.random.Generator) -> Answer:
        return self.answers[m]


class RandomAnswer:
    """Uniformly random (a, b) per query."""

    __slots__ = ()

    def reset(self) -> None:
        pass

    def respond(self, m: int, rng: np.random.Generator) -> Answer:
        return Answer(int(rng.integers(2)), int(rng.integers(2)))


@dataclass
class Counterfeit:
    """A claimed coin id plus k per-register response sources."""

    claimed_id: int
    responders: list = field(default_factory=list)

    @property
    def k(self) -> int:
        return len(self.responders)

    def reset_registers(self) -> None:
        for r in self.responders:
            r.reset()


class CounterfeitHolder:
    """Holder-side driver backed by a counterfeit; ignores usage marking."""

    def __init__(self, counterfeit: Counterfeit, rng: np.random.Generator) -> None:
        self.counterfeit = counterfeit
        self.rng = rng
        self.subset = None

    def init_message(self) -> Init:
        return Init(self.counterfeit.claimed_id)

    def on_challenge(self, msg):
        want = 2 * len(msg.positions) // 3
        picks = self.rng.choice(len(msg.positions), size=want, replace=False)
        chosen = sorted(msg.positions[int(i)] for i in picks)
        self.subset = Subset(tuple(chosen))
        return self.subset

    def on_queries(self, msg):
        pairs = []
        for pos, m in zip(self.subset.positions, msg.bits):
            ans = self.counterfeit.responders[pos].respond(m, self.rng)
            pairs.append((ans.a, ans.b))
        return Answers(tuple(pairs))


# ---------------------------------------------------------------------------
# Attacks.
# ---------------------------------------------------------------------------


def _require_live(coin: Coin) -> None:
    if coin.is_retired():
        raise CoinRetired(f"coin {coin.id} is retired")


def true_counterfeit(coin: Coin) -> Counterfeit:
    """Wrap the coin's current registers as quantum responders (snapshot now)."""
    return Counterfeit(coin.id, [QuantumRegister(reg) for reg in coin.registers])


def attack_clone_split(coin: Coin) -> tuple[Counterfeit, Counterfeit]:
    """Baseline pair: the real coin, and pure junk. Shows why both must pass."""
    _require_live(coin)
    real = true_counterfeit(coin)
    junk = Counterfeit(coin.id, [RandomAnswer() for _ in range(coin.k)])
    return real, junk


def attack_measure_all(
    coin: Coin, strat: MeasurementStrategy, rng: np.random.Generator
) -> tuple[Counterfeit, Counterfeit]:
    """Measure every register once with a double-answer strategy; both
    counterfeits answer from the identical resulting tables."""
    _require_live(coin)
    tables = _measure_registers(coin, strat, rng)
    c1 = Counterfeit(coin.id, [AnswerTable(*t) for t in tables])
    c2 = Counterfeit(coin.id, [AnswerTable(*t) for t in tables])
    return c1, c2


def _measure_registers(coin, strat, rng):
    """Measure each register with ``strat`` (collapsing in place); return the
    per-register (m=0 answer, m=1 answer) pairs read off the outcome tuples."""
    tables = []
    for i in range(coin.k):
        outcome, collapsed = measure(coin.registers[i], strat.basis, rng)
        coin.registers[i] = collapsed
        a0, b0, a1, b1 = strat.answers[outcome]
        tables.append((Answer(a0, b0), Answer(a1, b1)))
    return tables


# prior confidence that a single stored answer from the default measure-all
# strategy is valid (exact single-query validity of the parity basis)
_PRIOR_VALID = 0.75


def attack_adaptive_replay(
    coin: Coin,
    bank,
    budget: AttackBudget,
    rng: np.random.Generator,
    strat: MeasurementStrategy | None = None,
) -> tuple[Counterfeit, Counterfeit]:
    """Adaptive multi-round attack driven by per-register answer beliefs.

    Beliefs start from one measure-all pass (default: the parity-basis
    strategy), then up to ``budget.max_aux_instances`` auxiliary sessions
    are run against ``bank``: play argmax-belief answers on a random
    allowed subset, then update (accept pins played answers; reject
    multiplies each played unpinned answer's weight by 1 - 1/L).
    Emits two answer-table counterfeits from the final argmax beliefs.
    """
    _require_live(coin)
    if strat is None:
        strat = hadamard_strategy()
    tables = _measure_registers(coin, strat, rng)

    k = coin.k
    weights = np.full((k, 2, 4), (1.0 - _PRIOR_VALID) / 3.0)
    pinned = np.zeros((k, 2), dtype=bool)
    for i, (ans0, ans1) in enumerate(tables):
        weights[i, 0, ans0.a * 2 + ans0.b] = _PRIOR_VALID
        weights[i, 1, ans1.a * 2 + ans1.b] = _PRIOR_VALID

    while budget.aux_completed < budget.max_aux_instances:
        channel = bank.open_session()
        try:
            reply = channel.exchange(Init(coin.id))
            if isinstance(reply, Verdict):
                budget.note_first_response()
                continue
            budget.note_first_response()
            want = 2 * len(reply.positions) // 3
            picks = rng.choice(len(reply.positions), size=want, replace=False)
            chosen = sorted(reply.positions[int(i)] for i in picks)
            queries = channel.exchange(Subset(tuple(chosen)))
            if isinstance(queries, Verdict):
                continue
            played = []
            pairs = []
            for pos, m in zip(chosen, queries.bits):
                idx = int(np.argmax(weights[pos, m]))
                played.append((pos, m, idx))
                pairs.append((idx >> 1, idx & 1))
            reply = channel.exchange(Answers(tuple(pairs)))
            if not isinstance(reply, Verdict):
                continue
            verdict = reply
            if verdict.valid:
                budget.note_win()
                for pos, m, idx in played:
                    weights[pos, m] = 0.0
                    weights[pos, m, idx] = 1.0
                    pinned[pos, m] = True
            else:
                unpinned = [(pos, m, idx) for pos, m, idx in played if not pinned[pos, m]]
                if unpinned:
                    factor = 1.0 - 1.0 / len(unpinned)
                    for pos, m, idx in unpinned:
                        weights[pos, m, idx] *= factor
                        weights[pos, m] /= weights[pos, m].sum()
        except (ProtocolAbort, TransportError):
            continue
        finally:
            channel.close()

    final = []
    for i in range(k):
        idx0 = int(np.argmax(weights[i, 0]))
        idx1 = int(np.argmax(weights[i, 1]))
        final.append((Answer(idx0 >> 1, idx0 & 1), Answer(idx1 >> 1, idx1 & 1)))
    c1 = Counterfeit(coin.id, [AnswerTable(*t) for t in final])
    c2 = Counterfeit(coin.id, [AnswerTable(*t) for t in final])
    return c1, c2


# ---------------------------------------------------------------------------
# Evaluation harness.
# ---------------------------------------------------------------------------


def _drive_session(session: BankSession, holder) -> bool:
    """Lean in-process session loop (no transcript) for Monte Carlo runs."""
    reply = session.handle(holder.init_message())
    if isinstance(reply, Verdict):
        return reply.valid
    reply = session.handle(holder.on_challenge(reply))
    if isinstance(reply, Verdict):
        return reply.valid
    verdict = session.handle(holder.on_queries(reply))
    return verdict.valid


def evaluate_counterfeits(
    db: BankDb,
    c1: Counterfeit,
    c2: Counterfeit,
    trials: int,
    rng: np.random.Generator,
) -> float:
    """Fraction of trials in which both counterfeits pass independent
    fresh sessions. Quantum responders are re-prepared from their snapshots
    every trial, so trials are i.i.d."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    both = 0
    for _ in range(trials):
        c1.reset_registers()
        c2.reset_registers()
        ok1 = _drive_session(BankSession(db, rng), CounterfeitHolder(c1, rng))
        ok2 = _drive_session(BankSession(db, rng), CounterfeitHolder(c2, rng))
        if ok1 and ok2:
            both += 1
    return both / trials


def strategy_register_stats(
    strat: MeasurementStrategy, trials: int, rng: np.random.Generator
) -> tuple[float, float, float]:
    """(both, m=0, m=1) validity rates of the stored answers over ``trials``
    independently sampled registers (kernel-batched)."""
    tables = double_answer_tables(strat)
    x = rng.integers(0, 16, size=trials, dtype=np.int64)
    u = rng.random(trials)
    flags = kernels.register_validity_flags(x, u, tables.cum, tables.valid_m0, tables.valid_m1)
    m0 = float(flags[:, 0].sum()) / trials
    m1 = float(flags[:, 1].sum()) / trials
    both = float((flags[:, 0] & flags[:, 1]).sum()) / trials
    return both, m0, m1


ATTACK_NAMES = ("clone-split", "measure-all", "adaptive-replay")


def attack_both_pass_rate(
    strategy: str,
    db: BankDb,
    trials: int,
    seed: int,
    budget_u: int = 0,
) -> tuple[float, float]:
    """Monte Carlo both-pass probability of a named attack.

    Each trial mints a fresh coin, mounts the attack from scratch, and runs
    one final evaluation (two independent sessions). Returns (rate, stderr).
    """
    if strategy not in ATTACK_NAMES:
        raise ValueError(f"unknown attack strategy {strategy!r}")
    bank = LocalBank(db, seed)
    wins = 0
    for trial in range(trials):
        rng = spawn_rng(seed, "attack", trial)
        coin = mint(db, rng)
        if strategy == "clone-split":
            c1, c2 = attack_clone_split(coin)
        elif strategy == "measure-all":
            c1, c2 = attack_measure_all(coin, hadamard_strategy(), rng)
        else:
            budget = AttackBudget(budget_u)
            c1, c2 = attack_adaptive_replay(coin, bank, budget, rng)
        c1.reset_registers()
        c2.reset_registers()
        ok1 = _drive_session(BankSession(db, rng), CounterfeitHolder(c1, rng))
        ok2 = _drive_session(BankSession(db, rng), CounterfeitHolder(c2, rng))
        if ok1 and ok2:
            wins += 1
    rate = wins / trials
    stderr = float(np.sqrt(rate * (1.0 - rate) / trials))
    return rate, stderr
