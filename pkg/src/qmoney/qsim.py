"""Minimal complex linear algebra and measurement engine for dimension-4 states.

The whole scheme lives in a single 4-dimensional register at a time, so this
module deliberately has no tensor products and no density matrices: unit
state vectors, 4x4 Hermitian operators, orthonormal measurement bases, and
three operations on them (projective measurement, top eigenpair, expectation
value). All values are immutable after construction; invariant-violating
inputs are rejected by the constructors so the operations never have to.
"""

from __future__ import annotations

import numpy as np

DIM = 4

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
ORTHO_TOL = 1e-12


class StateVec:
    """A unit complex vector of dimension 4.

    The amplitude array is copied on construction and never mutated; the
    squared norm must equal 1 within 1e-12.
    """

    __slots__ = ("amplitudes",)

    def __init__(self, amplitudes) -> None:
        amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1).copy()
        if amps.shape != (DIM,):
            raise ValueError(f"state must have exactly {DIM} amplitudes, got {amps.shape}")
        sq = float(amps.real @ amps.real + amps.imag @ amps.imag)
        if abs(sq - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: |amps|^2 = {sq!r}")
        amps.setflags(write=False)
        self.amplitudes = amps

    def inner(self, other: "StateVec") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def phase_normalized(self) -> "StateVec":
        """Same ray with the first nonzero amplitude made positive real."""
        return StateVec(phase_normalize(self.amplitudes))

    def allclose(self, other: "StateVec", atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.amplitudes, other.amplitudes, atol=atol, rtol=0.0))

    def __repr__(self) -> str:
        return f"StateVec({self.amplitudes.tolist()!r})"


def phase_normalize(amps: np.ndarray) -> np.ndarray:
    """Multiply by a global phase so the first amplitude with |a| > 1e-12 is positive real."""
    out = np.asarray(amps, dtype=np.complex128).copy()
    for a in out:
        m = abs(a)
        if m > 1e-12:
            out *= a.conjugate() / m
            break
    return out


class HermitianOp:
    """A 4x4 complex matrix equal to its conjugate transpose within 1e-12."""

    __slots__ = ("entries",)

    def __init__(self, entries) -> None:
        mat = np.asarray(entries, dtype=np.complex128).copy()
        if mat.shape != (DIM, DIM):
            raise ValueError(f"operator must be {DIM}x{DIM}, got {mat.shape}")
        if np.max(np.abs(mat - mat.conj().T)) > HERMITIAN_TOL:
            raise ValueError("matrix is not Hermitian within tolerance")
        mat.setflags(write=False)
        self.entries = mat

    @classmethod
    def projector(cls, state: StateVec) -> "HermitianOp":
        """|state><state|."""
        v = state.amplitudes
        return cls(np.outer(v, v.conj()))

    @classmethod
    def identity(cls) -> "HermitianOp":
        return cls(np.eye(DIM, dtype=np.complex128))

    def __add__(self, other: "HermitianOp") -> "HermitianOp":
        return HermitianOp(self.entries + other.entries)

    def scaled(self, factor: float) -> "HermitianOp":
        return HermitianOp(self.entries * float(factor))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0])

    def __repr__(self) -> str:
        return f"HermitianOp({self.entries.tolist()!r})"


class ProjectiveBasis:
    """An ordered orthonormal basis of 4 state vectors.

    ``matrix`` caches the 4x4 array whose row i is the conjugate of basis
    vector i, so that ``matrix @ state`` yields all four overlaps at once.
    """

    __slots__ = ("vectors", "matrix")

    def __init__(self, vectors) -> None:
        vecs = tuple(v if isinstance(v, StateVec) else StateVec(v) for v in vectors)
        if len(vecs) != DIM:
            raise ValueError(f"basis needs exactly {DIM} vectors, got {len(vecs)}")
        mat = np.stack([v.amplitudes.conj() for v in vecs])
        gram = mat @ mat.conj().T
        if np.max(np.abs(gram - np.eye(DIM))) > ORTHO_TOL:
            raise ValueError("basis vectors are not orthonormal within tolerance")
        mat.setflags(write=False)
        self.vectors = vecs
        self.matrix = mat

    def overlaps(self, state: StateVec) -> np.ndarray:
        """<b_i|state> for all four basis vectors."""
        return self.matrix @ state.amplitudes

    def probabilities(self, state: StateVec) -> np.ndarray:
        ov = self.overlaps(state)
        return ov.real**2 + ov.imag**2

    def __repr__(self) -> str:
        return f"ProjectiveBasis({[v.amplitudes.tolist() for v in self.vectors]!r})"


def measure(state: StateVec, basis: ProjectiveBasis, rng: np.random.Generator):
    """Projective measurement of ``state`` in ``basis``.

    Returns ``(outcome, collapsed)`` where outcome i is sampled with
    probability |<basis_i|state>|^2 and ``collapsed`` is basis vector i with
    its phase normalized (first nonzero amplitude positive real), so repeated
    collapses compare bit-exactly. Sampling consumes exactly one uniform
    draw from ``rng``.
    """
    probs = basis.probabilities(state)
    u = rng.random()
    acc = 0.0
    outcome = DIM - 1
    for i in range(DIM):
        acc += probs[i]
        if u < acc:
            outcome = i
            break
    collapsed = StateVec(phase_normalize(basis.vectors[outcome].amplitudes))
    return outcome, collapsed


def top_eigenpair(op: HermitianOp):
    """Largest eigenvalue of ``op`` and a corresponding unit eigenvector."""
    vals, vecs = np.linalg.eigh(op.entries)
    vector = StateVec(phase_normalize(vecs[:, -1]))
    return float(vals[-1]), vector


def expectation(op: HermitianOp, state: StateVec) -> float:
    """<state|op|state>, real for Hermitian op."""
    v = state.amplitudes
    return float(np.vdot(v, op.entries @ v).real)
