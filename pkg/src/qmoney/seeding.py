"""Deterministic RNG stream derivation.

Every random choice in the package flows through a numpy Generator obtained
from :func:`spawn_rng`. Streams are derived from a 64-bit master seed plus a
sequence of labels (strings or ints), so independent components (bank vs.
holder, session index, trial chunk) get independent, reproducible streams.
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def _label_entropy(label) -> int:
    if isinstance(label, (int, np.integer)):
        return int(label) & _MASK64
    digest = hashlib.blake2b(str(label).encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def seed_sequence(seed: int, *labels) -> np.random.SeedSequence:
    entropy = [int(seed) & _MASK64] + [_label_entropy(l) for l in labels]
    return np.random.SeedSequence(entropy)


def spawn_rng(seed: int, *labels) -> np.random.Generator:
    """Return a PCG64 Generator derived from (seed, labels)."""
    return np.random.Generator(np.random.PCG64(seed_sequence(seed, *labels)))
