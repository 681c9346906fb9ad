"""Coins, secret records, the bank's static database, and minting.

A coin is k dimension-4 registers (each initially an encoding state for a
secret coloring), a holder-maintained usage bitmap, and a unique id. The
bank keeps only the colorings; its database never changes after minting.

File formats:

- bank database: one line per coin, ``<id-decimal> <4k-bit 0/1 string>``
  (coloring x1 first, bit x1 of x1 leftmost).
- coin file: ``id <decimal>`` line, ``usage <0/1 string>`` line, then one
  ``reg`` line per register with 8 floats (re, im for each of the 4
  amplitudes) at 17 significant digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .hmp import ALL_COLORINGS, Coloring, hmp_state
from .qsim import StateVec


@dataclass(frozen=True)
class VerParams:
    """Verification parameters: k registers per coin, challenge size t."""

    k: int
    t: int

    def __post_init__(self):
        if self.t < 3 or self.t % 3 != 0:
            raise ValueError(f"t must be a positive multiple of 3, got {self.t}")
        if self.t > self.k:
            raise ValueError(f"t must not exceed k ({self.t} > {self.k})")
        if 8 * self.t > 3 * self.k:
            raise ValueError(
                f"need 8t <= 3k for a positive lifespan (8*{self.t} > 3*{self.k})"
            )

    @property
    def subset_size(self) -> int:
        return 2 * self.t // 3


def lifespan(params: VerParams) -> int:
    """Number of verification runs before a coin must be returned: floor(3k/8t)."""
    return (3 * params.k) // (8 * params.t)


@dataclass(frozen=True)
class SecretRecord:
    """The bank's per-coin secret: the k colorings."""

    colorings: tuple[Coloring, ...]

    @property
    def k(self) -> int:
        return len(self.colorings)

    def to_bits(self) -> str:
        return "".join(str(x) for x in self.colorings)

    @classmethod
    def from_bits(cls, bits: str) -> "SecretRecord":
        if len(bits) % 4 != 0:
            raise ValueError(f"record bit string length must be a multiple of 4, got {len(bits)}")
        return cls(tuple(Coloring.from_string(bits[i : i + 4]) for i in range(0, len(bits), 4)))


class Coin:
    """A circulating coin: id, k mutable registers, and the usage bitmap.

    Registers hold post-measurement states rather than being erased, so
    adversarial reuse of measured registers is simulable. The usage bitmap
    is holder-maintained; the bank never sees it directly.
    """

    __slots__ = ("id", "registers", "usage")

    def __init__(self, coin_id: int, registers, usage=None) -> None:
        self.id = int(coin_id)
        self.registers: list[StateVec] = list(registers)
        if usage is None:
            usage = [False] * len(self.registers)
        self.usage: list[bool] = [bool(u) for u in usage]
        if len(self.usage) != len(self.registers):
            raise ValueError("usage bitmap and register list must have the same length")

    @property
    def k(self) -> int:
        return len(self.registers)

    def unmarked(self, positions=None) -> list[int]:
        """Unmarked positions, optionally restricted to ``positions``."""
        pool = range(self.k) if positions is None else positions
        return [i for i in pool if not self.usage[i]]

    def mark(self, positions) -> None:
        for i in positions:
            self.usage[i] = True

    def is_retired(self) -> bool:
        """True once at least ceil(k/4) registers are marked used."""
        return sum(self.usage) >= math.ceil(self.k / 4)


@dataclass
class BankDb:
    """The bank's static lookup table: coin id -> secret record."""

    params: VerParams
    records: dict[int, SecretRecord] = field(default_factory=dict)
    _next_id: int = 0

    def lookup(self, coin_id: int) -> SecretRecord | None:
        return self.records.get(coin_id)

    def register_record(self, record: SecretRecord) -> int:
        """Store a record under a fresh id (used by mint and db loading)."""
        coin_id = self._next_id
        if coin_id >= 2**64:
            raise OverflowError("coin id space exhausted")
        self._next_id += 1
        self.records[coin_id] = record
        return coin_id


def mint(db: BankDb, rng: np.random.Generator) -> Coin:
    """Draw k colorings uniformly, store the secret record, return the fresh coin."""
    k = db.params.k
    colorings = tuple(ALL_COLORINGS[int(i)] for i in rng.integers(0, 16, size=k))
    record = SecretRecord(colorings)
    coin_id = db.register_record(record)
    registers = [hmp_state(x) for x in colorings]
    return Coin(coin_id, registers)


# ---------------------------------------------------------------------------
# Flat-file persistence.
# ---------------------------------------------------------------------------


def dump_db(db: BankDb) -> str:
    lines = [f"{coin_id} {record.to_bits()}" for coin_id, record in sorted(db.records.items())]
    return "".join(line + "\n" for line in lines)


def load_db(text: str, params: VerParams) -> BankDb:
    db = BankDb(params)
    max_id = -1
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            id_part, bits = line.split()
            coin_id = int(id_part)
        except ValueError as exc:
            raise ValueError(f"bad db line {lineno}: {line!r}") from exc
        record = SecretRecord.from_bits(bits)
        if record.k != params.k:
            raise ValueError(f"db line {lineno}: record has k={record.k}, expected {params.k}")
        if coin_id in db.records:
            raise ValueError(f"db line {lineno}: duplicate coin id {coin_id}")
        db.records[coin_id] = record
        max_id = max(max_id, coin_id)
    db._next_id = max_id + 1
    return db


def dump_coin(coin: Coin) -> str:
    lines = [f"id {coin.id}", "usage " + "".join("1" if u else "0" for u in coin.usage)]
    for reg in coin.registers:
        parts = []
        for amp in reg.amplitudes:
            parts.append(f"{amp.real:.17g}")
            parts.append(f"{amp.imag:.17g}")
        lines.append("reg " + " ".join(parts))
    return "".join(line + "\n" for line in lines)


def load_coin(text: str) -> Coin:
    lines = [line for line in text.splitlines() if line.strip()]
    if len(lines) < 3 or not lines[0].startswith("id ") or not lines[1].startswith("usage "):
        raise ValueError("malformed coin file")
    coin_id = int(lines[0][3:])
    usage = [c == "1" for c in lines[1][6:].strip()]
    registers = []
    for line in lines[2:]:
        if not line.startswith("reg "):
            raise ValueError(f"malformed coin register line: {line!r}")
        vals = [float(v) for v in line[4:].split()]
        if len(vals) != 8:
            raise ValueError(f"register line needs 8 floats, got {len(vals)}")
        amps = [complex(vals[2 * i], vals[2 * i + 1]) for i in range(4)]
        registers.append(StateVec(amps))
    if len(registers) != len(usage):
        raise ValueError("coin file register count does not match usage bitmap length")
    return Coin(coin_id, registers, usage)
