"""The hidden matching relation in dimension 4.

A coloring x assigns a bit to each of 4 vertices. A query is a bit m; a
valid answer is a pair (a, b) such that b equals the parity of the vertex
pair selected by (m, a):

    a = 0  ->  b = x1 xor x_{2+m}
    a = 1  ->  b = x_{3-m} xor x4

The encoding state alpha(x) = (1/2) * sum_i (-1)^{x_i} |i> answers either
query with certainty when measured in the right basis, but cannot reliably
answer both. This module provides the relation, the states, the two query
bases with their outcome-to-answer map, and the honest answering procedure.

Amplitude slot i (0-based) corresponds to vertex i+1; coloring bits keep
their 1-based names x1..x4 in formulas.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .qsim import ProjectiveBasis, StateVec, measure

_SQRT2 = np.sqrt(2.0)


class Answer(NamedTuple):
    a: int
    b: int


@dataclass(frozen=True)
class Coloring:
    """A 4-bit vertex coloring, bits named x1..x4."""

    bits: tuple[int, int, int, int]

    def __post_init__(self):
        if len(self.bits) != 4 or any(b not in (0, 1) for b in self.bits):
            raise ValueError(f"coloring needs exactly 4 bits in {{0,1}}, got {self.bits!r}")
        object.__setattr__(self, "bits", tuple(int(b) for b in self.bits))

    @classmethod
    def from_string(cls, text: str) -> "Coloring":
        if len(text) != 4 or any(c not in "01" for c in text):
            raise ValueError(f"coloring string must be 4 chars of 0/1, got {text!r}")
        return cls(tuple(int(c) for c in text))

    @classmethod
    def from_index(cls, index: int) -> "Coloring":
        """Coloring with x1 as the most significant bit of ``index`` (0..15)."""
        if not 0 <= index < 16:
            raise ValueError(f"coloring index out of range: {index}")
        return cls(((index >> 3) & 1, (index >> 2) & 1, (index >> 1) & 1, index & 1))

    @property
    def index(self) -> int:
        x1, x2, x3, x4 = self.bits
        return (x1 << 3) | (x2 << 2) | (x3 << 1) | x4

    def x(self, i: int) -> int:
        """1-indexed bit accessor matching the formula names."""
        return self.bits[i - 1]

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


ALL_COLORINGS = tuple(Coloring.from_index(i) for i in range(16))


def _check_bit(value: int, name: str) -> int:
    if value not in (0, 1):
        raise ValueError(f"{name} must be 0 or 1, got {value!r}")
    return int(value)


def hmp_relation(x: Coloring, m: int, ans: Answer) -> bool:
    """Whether (x, m, a, b) is in the hidden matching relation."""
    m = _check_bit(m, "m")
    a = _check_bit(ans[0], "a")
    b = _check_bit(ans[1], "b")
    if a == 0:
        return b == x.x(1) ^ x.x(2 + m)
    return b == x.x(3 - m) ^ x.x(4)


def hmp_state(x: Coloring) -> StateVec:
    """The encoding state alpha(x) with amplitudes (+-1/2, ..)."""
    return StateVec([0.5 * (-1.0) ** b for b in x.bits])


# Outcome i answers (a, b) = (i >> 1, i & 1): v1 -> (0,0), v2 -> (0,1), v3 -> (1,0), v4 -> (1,1).
ANSWER_MAP = (Answer(0, 0), Answer(0, 1), Answer(1, 0), Answer(1, 1))

_BASIS_VECTORS = {
    0: ((1, 1, 0, 0), (1, -1, 0, 0), (0, 0, 1, 1), (0, 0, 1, -1)),
    1: ((1, 0, 1, 0), (1, 0, -1, 0), (0, 1, 0, 1), (0, 1, 0, -1)),
}

_QUERY_BASES: dict[int, ProjectiveBasis] = {}


def query_basis(m: int):
    """The measurement basis for query m, plus the outcome-to-answer map."""
    m = _check_bit(m, "m")
    basis = _QUERY_BASES.get(m)
    if basis is None:
        basis = ProjectiveBasis([np.asarray(v, dtype=float) / _SQRT2 for v in _BASIS_VECTORS[m]])
        _QUERY_BASES[m] = basis
    return basis, ANSWER_MAP


def answer_query(register: StateVec, m: int, rng: np.random.Generator):
    """Honest answering: measure ``register`` in the query-m basis.

    Returns (Answer, collapsed state). If the register holds alpha(x), the
    answer satisfies the relation with certainty; arbitrary registers
    (collapsed or adversarial) are accepted and simply measured.
    """
    basis, amap = query_basis(m)
    outcome, collapsed = measure(register, basis, rng)
    return amap[outcome], collapsed


# ---------------------------------------------------------------------------
# Dense tables for the batched kernels.
# ---------------------------------------------------------------------------


def state_matrix() -> np.ndarray:
    """(16, 4) real matrix whose row i holds the amplitudes of alpha(x_i)."""
    return np.stack([hmp_state(x).amplitudes.real for x in ALL_COLORINGS])


def relation_table() -> np.ndarray:
    """Boolean table rel[x_index, m, a, b] of the full relation."""
    table = np.zeros((16, 2, 2, 2), dtype=np.bool_)
    for x in ALL_COLORINGS:
        for m in (0, 1):
            for a in (0, 1):
                for b in (0, 1):
                    table[x.index, m, a, b] = hmp_relation(x, m, Answer(a, b))
    return table


def basis_cumprob(basis: ProjectiveBasis) -> np.ndarray:
    """(16, 4) cumulative outcome probabilities of measuring each alpha(x) in ``basis``."""
    amps = state_matrix().astype(np.complex128)
    ov = amps @ basis.matrix.T  # (16, 4), entry [x, o] = <b_o|alpha(x)>
    probs = ov.real**2 + ov.imag**2
    return np.cumsum(probs, axis=1)


def answer_validity(basis_m: int) -> np.ndarray:
    """(4, 16) booleans: outcome o of the query-``basis_m`` basis answers x validly."""
    ok = np.zeros((4, 16), dtype=np.bool_)
    for o, ans in enumerate(ANSWER_MAP):
        for x in ALL_COLORINGS:
            ok[o, x.index] = hmp_relation(x, basis_m, ans)
    return ok
