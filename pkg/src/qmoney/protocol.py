"""The 6-step verification dialogue.

Message flow (holder -> bank unless noted):

1. Init: the coin's id.
2. Challenge (bank): a uniform t-subset of the k register positions.
3. Subset: a uniform 2t/3-subset of the challenge's unmarked positions;
   the honest holder marks them used.
4. Queries (bank): one uniform query bit per subset position.
5. Answers: the measured (a, b) pair per subset position.
6. Verdict (bank): valid iff every answer satisfies the relation against
   the stored secret record.

Wire format: UTF-8, one message per line, LF-terminated; each line is a
flat JSON object with a ``type`` field and the payload fields in fixed
order, no extra whitespace. Position lists are 0-based and strictly
increasing.

The bank state machine only moves forward; any out-of-order or malformed
input either produces an immediate ``Verdict(false)`` (content failures:
unknown id, bad subset, bad answer framing) or raises
:class:`ProtocolAbort` (structural failures). The bank's database is never
written; the only bank output depending on the secret record is the final
verdict.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .hmp import Answer, answer_query, hmp_relation
from .money import BankDb, Coin, SecretRecord


class WireError(ValueError):
    """A line that does not decode to a well-formed message."""


class ProtocolAbort(RuntimeError):
    """Structural protocol violation: wrong message for the session state."""


class InsufficientUnmarked(RuntimeError):
    """Fewer than 2t/3 challenge positions are unmarked on the coin."""


class CoinRetired(RuntimeError):
    """The coin has consumed its usage budget and must be returned."""


# ---------------------------------------------------------------------------
# Messages.
# ---------------------------------------------------------------------------


def _check_positions(positions) -> tuple[int, ...]:
    pos = tuple(int(p) for p in positions)
    if any(p < 0 for p in pos):
        raise ValueError(f"negative position in {pos!r}")
    if any(b <= a for a, b in zip(pos, pos[1:])):
        raise ValueError(f"positions must be strictly increasing, got {pos!r}")
    return pos


def _check_bits(bits) -> tuple[int, ...]:
    out = tuple(int(b) for b in bits)
    if any(b not in (0, 1) for b in out):
        raise ValueError(f"bits must be 0/1, got {out!r}")
    return out


@dataclass(frozen=True)
class Init:
    coin_id: int


@dataclass(frozen=True)
class Challenge:
    positions: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "positions", _check_positions(self.positions))


@dataclass(frozen=True)
class Subset:
    positions: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "positions", _check_positions(self.positions))


@dataclass(frozen=True)
class Queries:
    bits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "bits", _check_bits(self.bits))


@dataclass(frozen=True)
class Answers:
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pairs = tuple((int(a), int(b)) for a, b in self.pairs)
        if any(a not in (0, 1) or b not in (0, 1) for a, b in pairs):
            raise ValueError(f"answer pairs must be 0/1 bits, got {pairs!r}")
        object.__setattr__(self, "pairs", pairs)


@dataclass(frozen=True)
class Verdict:
    valid: bool


Message = Init | Challenge | Subset | Queries | Answers | Verdict


# ---------------------------------------------------------------------------
# Wire codec.
# ---------------------------------------------------------------------------


def encode_message(msg: Message) -> str:
    if isinstance(msg, Init):
        obj = {"type": "init", "coin_id": str(msg.coin_id)}
    elif isinstance(msg, Challenge):
        obj = {"type": "challenge", "positions": list(msg.positions)}
    elif isinstance(msg, Subset):
        obj = {"type": "subset", "positions": list(msg.positions)}
    elif isinstance(msg, Queries):
        obj = {"type": "queries", "m": list(msg.bits)}
    elif isinstance(msg, Answers):
        obj = {"type": "answers", "pairs": [[a, b] for a, b in msg.pairs]}
    elif isinstance(msg, Verdict):
        obj = {"type": "verdict", "valid": bool(msg.valid)}
    else:
        raise TypeError(f"not a protocol message: {msg!r}")
    return json.dumps(obj, separators=(",", ":"))


def _require_int(value) -> int:
    # bool is an int subclass; the wire wants genuine integers
    if isinstance(value, bool) or not isinstance(value, int):
        raise WireError(f"expected integer, got {value!r}")
    return value


def decode_message(line: str) -> Message:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise WireError(f"not valid JSON: {line[:80]!r}") from exc
    if not isinstance(obj, dict) or "type" not in obj:
        raise WireError(f"not a message object: {line[:80]!r}")
    mtype = obj["type"]
    try:
        if mtype == "init":
            if set(obj) != {"type", "coin_id"}:
                raise WireError(f"bad init fields: {sorted(obj)!r}")
            raw = obj["coin_id"]
            if not isinstance(raw, str) or not raw.isdigit():
                raise WireError(f"coin_id must be a decimal string, got {raw!r}")
            return Init(int(raw))
        if mtype in ("challenge", "subset"):
            if set(obj) != {"type", "positions"}:
                raise WireError(f"bad {mtype} fields: {sorted(obj)!r}")
            positions = obj["positions"]
            if not isinstance(positions, list):
                raise WireError("positions must be an array")
            cls = Challenge if mtype == "challenge" else Subset
            return cls(tuple(_require_int(p) for p in positions))
        if mtype == "queries":
            if set(obj) != {"type", "m"}:
                raise WireError(f"bad queries fields: {sorted(obj)!r}")
            bits = obj["m"]
            if not isinstance(bits, list):
                raise WireError("m must be an array")
            return Queries(tuple(_require_int(b) for b in bits))
        if mtype == "answers":
            if set(obj) != {"type", "pairs"}:
                raise WireError(f"bad answers fields: {sorted(obj)!r}")
            pairs = obj["pairs"]
            if not isinstance(pairs, list) or any(
                not isinstance(p, list) or len(p) != 2 for p in pairs
            ):
                raise WireError("pairs must be an array of 2-arrays")
            return Answers(tuple((_require_int(p[0]), _require_int(p[1])) for p in pairs))
        if mtype == "verdict":
            if set(obj) != {"type", "valid"}:
                raise WireError(f"bad verdict fields: {sorted(obj)!r}")
            valid = obj["valid"]
            if not isinstance(valid, bool):
                raise WireError(f"valid must be a boolean, got {valid!r}")
            return Verdict(valid)
    except WireError:
        raise
    except (ValueError, TypeError) as exc:
        raise WireError(str(exc)) from exc
    raise WireError(f"unknown message type {mtype!r}")


# ---------------------------------------------------------------------------
# Transcripts.
# ---------------------------------------------------------------------------

TO_BANK = ">"
FROM_BANK = "<"


@dataclass
class Transcript:
    """Ordered wire lines of one session, holder's point of view."""

    entries: list[tuple[str, str]] = field(default_factory=list)

    def record(self, direction: str, msg: Message) -> None:
        self.entries.append((direction, encode_message(msg)))

    def verdict(self) -> bool | None:
        for direction, line in reversed(self.entries):
            if direction == FROM_BANK:
                msg = decode_message(line)
                if isinstance(msg, Verdict):
                    return msg.valid
        return None

    def to_text(self) -> str:
        return "".join(f"{d} {line}\n" for d, line in self.entries)

    @classmethod
    def from_text(cls, text: str) -> "Transcript":
        entries = []
        for raw in text.splitlines():
            if not raw.strip():
                continue
            if raw[:2] not in (TO_BANK + " ", FROM_BANK + " "):
                raise ValueError(f"bad transcript line: {raw!r}")
            entries.append((raw[0], raw[2:]))
        return cls(entries)


def replay_verdict(record: SecretRecord, transcript: Transcript) -> bool | None:
    """Recompute the verdict the stored record forces for this dialogue.

    Returns None for transcripts with no completed answer exchange.
    """
    subset: Subset | None = None
    queries: Queries | None = None
    for direction, line in transcript.entries:
        msg = decode_message(line)
        if isinstance(msg, Subset):
            subset = msg
        elif isinstance(msg, Queries):
            queries = msg
        elif isinstance(msg, Answers):
            if subset is None or queries is None:
                return False
            return check_answers(record, subset.positions, queries.bits, msg.pairs)
        elif isinstance(msg, Verdict) and not msg.valid:
            return False
    return None


def check_answers(record: SecretRecord, positions, bits, pairs) -> bool:
    """The bank's acceptance predicate: every answer satisfies the relation."""
    if not (len(positions) == len(bits) == len(pairs)):
        return False
    for pos, m, (a, b) in zip(positions, bits, pairs):
        if pos >= record.k:
            return False
        if not hmp_relation(record.colorings[pos], m, Answer(a, b)):
            return False
    return True


# ---------------------------------------------------------------------------
# Bank side.
# ---------------------------------------------------------------------------

AWAIT_INIT = "await_init"
AWAIT_SUBSET = "await_subset"
AWAIT_ANSWERS = "await_answers"
DONE = "done"


class BankSession:
    """One verification session on the bank side (forward-only state machine)."""

    def __init__(self, db: BankDb, rng: np.random.Generator) -> None:
        self.db = db
        self.rng = rng
        self.state = AWAIT_INIT
        self.coin_id: int | None = None
        self.record: SecretRecord | None = None
        self.challenge: Challenge | None = None
        self.subset: Subset | None = None
        self.queries: Queries | None = None

    def _finish(self, valid: bool) -> Verdict:
        self.state = DONE
        return Verdict(valid)

    def on_init(self, msg: Init) -> Challenge | Verdict:
        if self.state != AWAIT_INIT:
            raise ProtocolAbort(f"init in state {self.state}")
        self.coin_id = msg.coin_id
        self.record = self.db.lookup(msg.coin_id)
        if self.record is None:
            return self._finish(False)
        params = self.db.params
        picks = self.rng.choice(params.k, size=params.t, replace=False)
        self.challenge = Challenge(tuple(sorted(int(p) for p in picks)))
        self.state = AWAIT_SUBSET
        return self.challenge

    def on_subset(self, msg: Subset) -> Queries | Verdict:
        if self.state != AWAIT_SUBSET:
            raise ProtocolAbort(f"subset in state {self.state}")
        params = self.db.params
        challenge_set = set(self.challenge.positions)
        if (
            len(msg.positions) != params.subset_size
            or len(set(msg.positions)) != len(msg.positions)
            or not set(msg.positions) <= challenge_set
        ):
            return self._finish(False)
        self.subset = msg
        bits = self.rng.integers(0, 2, size=params.subset_size)
        self.queries = Queries(tuple(int(b) for b in bits))
        self.state = AWAIT_ANSWERS
        return self.queries

    def on_answers(self, msg: Answers) -> Verdict:
        if self.state != AWAIT_ANSWERS:
            raise ProtocolAbort(f"answers in state {self.state}")
        valid = check_answers(self.record, self.subset.positions, self.queries.bits, msg.pairs)
        return self._finish(valid)

    def handle(self, msg: Message) -> Message:
        """Dispatch by message type; structural mismatches raise ProtocolAbort."""
        if isinstance(msg, Init):
            return self.on_init(msg)
        if isinstance(msg, Subset):
            return self.on_subset(msg)
        if isinstance(msg, Answers):
            return self.on_answers(msg)
        raise ProtocolAbort(f"unexpected {type(msg).__name__} from holder")


# ---------------------------------------------------------------------------
# Holder side.
# ---------------------------------------------------------------------------


class HolderSession:
    """One verification session for an honest holder of a coin."""

    def __init__(self, coin: Coin, rng: np.random.Generator) -> None:
        self.coin = coin
        self.rng = rng
        self.state = "send_init"
        self.subset: Subset | None = None

    def init_message(self) -> Init:
        if self.state != "send_init":
            raise ProtocolAbort(f"init_message in state {self.state}")
        self.state = "await_challenge"
        return Init(self.coin.id)

    def on_challenge(self, msg: Challenge) -> Subset:
        if self.state != "await_challenge":
            raise ProtocolAbort(f"challenge in state {self.state}")
        if len(msg.positions) % 3 != 0:
            raise ProtocolAbort(f"challenge size {len(msg.positions)} is not a multiple of 3")
        if any(p >= self.coin.k for p in msg.positions):
            raise ProtocolAbort("challenge position beyond coin registers")
        want = 2 * len(msg.positions) // 3
        unmarked = self.coin.unmarked(msg.positions)
        if len(unmarked) < want:
            raise InsufficientUnmarked(
                f"only {len(unmarked)} unmarked of {len(msg.positions)} challenged"
            )
        picks = self.rng.choice(len(unmarked), size=want, replace=False)
        chosen = sorted(unmarked[int(i)] for i in picks)
        self.coin.mark(chosen)
        self.subset = Subset(tuple(chosen))
        self.state = "await_queries"
        return self.subset

    def on_queries(self, msg: Queries) -> Answers:
        if self.state != "await_queries":
            raise ProtocolAbort(f"queries in state {self.state}")
        if len(msg.bits) != len(self.subset.positions):
            raise ProtocolAbort("query count does not match subset size")
        pairs = []
        for pos, m in zip(self.subset.positions, msg.bits):
            ans, collapsed = answer_query(self.coin.registers[pos], m, self.rng)
            self.coin.registers[pos] = collapsed
            pairs.append((ans.a, ans.b))
        self.state = "await_verdict"
        return Answers(tuple(pairs))
