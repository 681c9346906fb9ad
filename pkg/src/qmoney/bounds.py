"""Concentration bounds, a set-intersection lemma, and a mutual-information
lemma, as computable and randomly checkable utilities.

The two lemma checkers exist to be *tested*: both statements are theorems,
so the checkers must report "holds" on every valid instance, and the test
suites hammer them with random instances. Information quantities are in
nats throughout (the mutual-information bound 2*(beta-alpha)^2 comes from
Pinsker's inequality, which takes that form only in nats).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

_PMF_TOL = 1e-12


def _check_count(n: int, name: str = "n") -> int:
    if int(n) != n or n < 1:
        raise ValueError(f"{name} must be a positive integer, got {n!r}")
    return int(n)


def chernoff_upper(n: int, mu: float, lam: float) -> float:
    """Upper-tail bound exp(-n lam^2 mu / (2 + lam)) for sums of n independent
    [0,1]-valued variables with mean mu, threshold (1+lam) mu n."""
    n = _check_count(n)
    if not 0.0 < mu <= 1.0:
        raise ValueError(f"mu must be in (0, 1], got {mu!r}")
    if lam < 0.0:
        raise ValueError(f"lambda must be nonnegative, got {lam!r}")
    return math.exp(-n * lam * lam * mu / (2.0 + lam))


def chernoff_lower(n: int, mu: float, lam: float) -> float:
    """Lower-tail bound exp(-n lam^2 mu / 2), threshold (1-lam) mu n."""
    n = _check_count(n)
    if not 0.0 < mu <= 1.0:
        raise ValueError(f"mu must be in (0, 1], got {mu!r}")
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must be in [0, 1], got {lam!r}")
    return math.exp(-n * lam * lam * mu / 2.0)


def generalized_chernoff(n: int, delta: float, lam: float) -> float:
    """Bound exp(-2 n lam^2 delta^2) for Boolean variables whose joint
    success probabilities are capped by delta^|S| (holds under per-variable
    conditional caps as well)."""
    n = _check_count(n)
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must be in (0, 1], got {delta!r}")
    if lam < 0.0:
        raise ValueError(f"lambda must be nonnegative, got {lam!r}")
    return math.exp(-2.0 * n * lam * lam * delta * delta)


# ---------------------------------------------------------------------------
# Set-intersection lemma: N subsets of [n] of average size t with pairwise
# intersections at most s force N < 2n/t or s > t^2/(2n).
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SetFamily:
    """Subsets of [universe_size], each stored as a sorted unique index tuple."""

    universe_size: int
    sets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.universe_size < 1:
            raise ValueError("universe_size must be >= 1")
        cleaned = []
        for s in self.sets:
            idx = tuple(sorted(set(int(i) for i in s)))
            if idx and (idx[0] < 0 or idx[-1] >= self.universe_size):
                raise ValueError(f"set {idx!r} leaves the universe [0, {self.universe_size})")
            cleaned.append(idx)
        object.__setattr__(self, "sets", tuple(cleaned))


class SetLemmaReport(NamedTuple):
    holds: bool
    num_sets: int
    universe_size: int
    avg_size: float
    max_intersection: int
    count_bound: float       # 2n/t (inf when t = 0)
    intersection_bound: float  # t^2 / 2n


def check_set_lemma(family: SetFamily) -> tuple[bool, SetLemmaReport]:
    """Evaluate the disjunction N < 2n/t or s > t^2/(2n) on a concrete family."""
    n = family.universe_size
    num = len(family.sets)
    if num < 2:
        raise ValueError("need at least 2 sets")
    members = np.zeros((num, n), dtype=np.int64)
    for i, s in enumerate(family.sets):
        members[i, list(s)] = 1
    sizes = members.sum(axis=1)
    t = float(sizes.mean())
    inter = members @ members.T
    np.fill_diagonal(inter, 0)
    s_max = int(inter.max()) if num > 1 else 0
    count_bound = math.inf if t == 0.0 else 2.0 * n / t
    inter_bound = t * t / (2.0 * n)
    holds = num < count_bound or s_max > inter_bound
    return holds, SetLemmaReport(holds, num, n, t, s_max, count_bound, inter_bound)


def random_set_family(rng: np.random.Generator, max_universe: int = 64, max_sets: int = 64) -> SetFamily:
    """Random instance generator for the theorem check."""
    n = int(rng.integers(2, max_universe + 1))
    num = int(rng.integers(2, max_sets + 1))
    density = rng.uniform(0.05, 0.9)
    members = rng.random((num, n)) < density
    sets = tuple(tuple(np.flatnonzero(row).tolist()) for row in members)
    return SetFamily(n, sets)


# ---------------------------------------------------------------------------
# Mutual information and the predictor-advantage lemma:
# if a condition is satisfiable with probability at most alpha by anything
# independent of A, and B's value satisfies it with probability beta >= alpha,
# then I(A:B) >= 2 (beta - alpha)^2.
# ---------------------------------------------------------------------------


class JointPmf:
    """A joint probability mass function over X x Y (rows = X, columns = Y)."""

    __slots__ = ("probabilities",)

    def __init__(self, probabilities) -> None:
        p = np.asarray(probabilities, dtype=float)
        if p.ndim != 2:
            raise ValueError("joint pmf must be a 2-D array")
        if (p < 0).any():
            raise ValueError("probabilities must be nonnegative")
        if abs(float(p.sum()) - 1.0) > _PMF_TOL:
            raise ValueError(f"probabilities must sum to 1, got {float(p.sum())!r}")
        p = p.copy()
        p.setflags(write=False)
        self.probabilities = p


def mutual_information(joint: JointPmf) -> float:
    """I(A:B) in nats, with 0 * log(0/q) taken as 0."""
    p = joint.probabilities
    px = p.sum(axis=1)
    pb = p.sum(axis=0)
    info = 0.0
    for xi in range(p.shape[0]):
        for bi in range(p.shape[1]):
            pxb = p[xi, bi]
            if pxb > 0.0:
                info += pxb * math.log(pxb / (px[xi] * pb[bi]))
    return info


class MutLemmaReport(NamedTuple):
    holds: bool
    alpha: float
    beta: float
    info: float


def check_mut_lemma(joint: JointPmf, condition: dict) -> MutLemmaReport:
    """Check info >= 2 (beta - alpha)^2 for a concrete joint and condition.

    ``condition`` maps each column index b to the set of row indices x that
    satisfy the condition when B = b. alpha is the best success of a
    B-independent predictor (max_b mu(X_b)); beta is B's own success.
    The claim is vacuous (reported as holding) when beta < alpha.
    """
    p = joint.probabilities
    px = p.sum(axis=1)
    pb = p.sum(axis=0)
    alpha = 0.0
    beta = 0.0
    for bi in range(p.shape[1]):
        rows = list(condition.get(bi, ()))
        mass = float(px[rows].sum()) if rows else 0.0
        alpha = max(alpha, mass)
        if pb[bi] > 0.0 and rows:
            beta += float(p[rows, bi].sum())
    info = mutual_information(joint)
    if beta < alpha:
        return MutLemmaReport(True, alpha, beta, info)
    holds = info >= 2.0 * (beta - alpha) ** 2 - _PMF_TOL
    return MutLemmaReport(holds, alpha, beta, info)


def random_joint(rng: np.random.Generator, max_x: int = 6, max_y: int = 6) -> JointPmf:
    """Random joint pmf with occasional zero cells."""
    nx = int(rng.integers(2, max_x + 1))
    ny = int(rng.integers(2, max_y + 1))
    p = rng.random((nx, ny))
    p[rng.random((nx, ny)) < 0.2] = 0.0
    if p.sum() == 0.0:
        p[0, 0] = 1.0
    return JointPmf(p / p.sum())


def random_condition(rng: np.random.Generator, joint: JointPmf) -> dict:
    """Random condition sets X_b, one per column."""
    nx, ny = joint.probabilities.shape
    return {
        bi: tuple(np.flatnonzero(rng.random(nx) < rng.uniform(0.1, 0.9)).tolist())
        for bi in range(ny)
    }


# ---------------------------------------------------------------------------
# Empirical tail checks.
# ---------------------------------------------------------------------------


class TailCheck(NamedTuple):
    kind: str
    n: int
    p: float       # mu or delta
    lam: float
    empirical: float
    bound: float
    ok: bool


def chernoff_grid() -> list[tuple[str, int, float, float]]:
    """The default 20-point (kind, n, mu-or-delta, lambda) evaluation grid."""
    grid: list[tuple[str, int, float, float]] = []
    for n, mu, lam in [
        (50, 0.2, 0.5), (50, 0.5, 0.3), (100, 0.2, 0.8), (100, 0.5, 0.5),
        (200, 0.3, 0.4), (200, 0.5, 0.25), (400, 0.2, 0.5), (400, 0.5, 0.2),
    ]:
        grid.append(("upper", n, mu, lam))
    for n, mu, lam in [
        (50, 0.5, 0.5), (100, 0.3, 0.5), (100, 0.5, 0.4),
        (200, 0.5, 0.3), (400, 0.4, 0.25), (400, 0.6, 0.2),
    ]:
        grid.append(("lower", n, mu, lam))
    for n, delta, lam in [
        (50, 0.3, 0.5), (100, 0.25, 0.5), (100, 0.5, 0.3),
        (200, 0.3, 0.35), (400, 0.25, 0.3), (400, 0.5, 0.15),
    ]:
        grid.append(("generalized", n, delta, lam))
    return grid


def empirical_tail_checks(
    rng: np.random.Generator, samples: int = 100_000, grid=None
) -> list[TailCheck]:
    """Estimate each tail by Monte Carlo and compare with the bound formula.

    The generalized-bound points use a correlated generator (a global coin
    gating independent Bernoulli variables) that satisfies the conditional
    cap hypothesis while being far from independent.
    """
    out = []
    for kind, n, p, lam in grid or chernoff_grid():
        if kind == "upper":
            sums = rng.binomial(n, p, size=samples)
            tail = float((sums >= (1.0 + lam) * p * n).mean())
            bound = chernoff_upper(n, p, lam)
        elif kind == "lower":
            sums = rng.binomial(n, p, size=samples)
            tail = float((sums <= (1.0 - lam) * p * n).mean())
            bound = chernoff_lower(n, p, lam)
        elif kind == "generalized":
            gate = rng.random(samples) < 0.5
            sums = np.where(gate, rng.binomial(n, p, size=samples), 0)
            tail = float((sums >= (1.0 + lam) * p * n).mean())
            bound = generalized_chernoff(n, p, lam)
        else:
            raise ValueError(f"unknown tail kind {kind!r}")
        out.append(TailCheck(kind, n, p, lam, tail, bound, tail <= bound))
    return out
