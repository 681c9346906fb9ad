"""Bound formulas, lemma checkers, and their randomized theorem tests."""

import math

import numpy as np
import pytest

from qmoney.bounds import (
    JointPmf,
    SetFamily,
    chernoff_lower,
    chernoff_upper,
    check_mut_lemma,
    check_set_lemma,
    empirical_tail_checks,
    generalized_chernoff,
    mutual_information,
    random_condition,
    random_joint,
    random_set_family,
)
from qmoney.seeding import spawn_rng


def test_chernoff_formula_values():
    assert chernoff_upper(100, 0.5, 0.5) == pytest.approx(math.exp(-5.0), rel=1e-12)
    assert chernoff_upper(100, 0.5, 0.5) == pytest.approx(6.7379e-3, rel=1e-4)
    assert chernoff_lower(100, 0.5, 0.5) == pytest.approx(math.exp(-6.25), rel=1e-12)
    assert generalized_chernoff(200, 0.5, 0.2) == pytest.approx(math.exp(-4.0), rel=1e-12)


def test_chernoff_zero_lambda_is_trivial_bound():
    assert chernoff_upper(10, 0.3, 0.0) == 1.0
    assert chernoff_lower(10, 0.3, 0.0) == 1.0
    assert generalized_chernoff(10, 0.3, 0.0) == 1.0


def test_chernoff_domain_rejections():
    with pytest.raises(ValueError):
        chernoff_upper(0, 0.5, 0.5)
    with pytest.raises(ValueError):
        chernoff_upper(10, 0.0, 0.5)
    with pytest.raises(ValueError):
        chernoff_upper(10, 1.5, 0.5)
    with pytest.raises(ValueError):
        chernoff_upper(10, 0.5, -0.1)
    with pytest.raises(ValueError):
        chernoff_lower(10, 0.5, 1.5)
    with pytest.raises(ValueError):
        generalized_chernoff(10, 0.0, 0.5)


def test_chernoff_monotone_in_n_and_lambda():
    for f, p in ((chernoff_upper, 0.4), (chernoff_lower, 0.4), (generalized_chernoff, 0.4)):
        values_n = [f(n, p, 0.5) for n in (10, 20, 40, 80, 160)]
        assert all(a > b for a, b in zip(values_n, values_n[1:]))
        values_l = [f(50, p, lam) for lam in (0.1, 0.3, 0.5, 0.7, 0.9)]
        assert all(a > b for a, b in zip(values_l, values_l[1:]))


def test_set_lemma_identical_sets():
    fam = SetFamily(10, tuple([(0, 1, 2)] * 5))
    holds, report = check_set_lemma(fam)
    assert holds
    assert report.max_intersection == 3
    assert report.avg_size == 3.0


def test_set_lemma_disjoint_sets():
    fam = SetFamily(12, ((0, 1, 2), (3, 4, 5), (6, 7, 8), (9, 10, 11)))
    holds, report = check_set_lemma(fam)
    assert holds
    assert report.max_intersection == 0
    # pairwise disjoint: N = n/t < 2n/t
    assert report.num_sets < report.count_bound


def test_set_lemma_empty_sets():
    fam = SetFamily(5, ((), (), ()))
    holds, report = check_set_lemma(fam)
    assert holds
    assert report.count_bound == math.inf


def test_set_lemma_requires_two_sets():
    with pytest.raises(ValueError):
        check_set_lemma(SetFamily(5, (((0, 1)),)))


def test_set_lemma_randomized():
    rng = spawn_rng(60)
    for _ in range(2000):
        holds, report = check_set_lemma(random_set_family(rng))
        assert holds, report


def test_mutual_information_product_distribution():
    px = np.array([0.3, 0.7])
    py = np.array([0.2, 0.5, 0.3])
    joint = JointPmf(np.outer(px, py))
    assert mutual_information(joint) == pytest.approx(0.0, abs=1e-12)


def test_mutual_information_perfect_correlation():
    joint = JointPmf(np.array([[0.5, 0.0], [0.0, 0.5]]))
    assert mutual_information(joint) == pytest.approx(math.log(2), abs=1e-12)


def test_mutual_information_noisy_bit():
    # B = A flipped with probability 1/4: I = ln2 - H(1/4) nats
    joint = JointPmf(np.array([[0.375, 0.125], [0.125, 0.375]]))
    expect = math.log(2) - (-(0.25 * math.log(0.25) + 0.75 * math.log(0.75)))
    assert mutual_information(joint) == pytest.approx(expect, abs=1e-12)
    assert expect == pytest.approx(0.130812035941137, abs=1e-12)


def test_mut_lemma_identity_condition():
    joint = JointPmf(np.array([[0.5, 0.0], [0.0, 0.5]]))
    report = check_mut_lemma(joint, {0: (0,), 1: (1,)})
    assert report.holds
    assert report.alpha == pytest.approx(0.5)
    assert report.beta == pytest.approx(1.0)
    assert report.info >= 2 * (report.beta - report.alpha) ** 2


def test_mut_lemma_vacuous_when_beta_below_alpha():
    px = np.array([0.5, 0.5])
    py = np.array([0.5, 0.5])
    joint = JointPmf(np.outer(px, py))
    # independent A, B: beta = expected mass = alpha at best
    report = check_mut_lemma(joint, {0: (0,), 1: (0,)})
    assert report.holds


def test_mut_lemma_randomized():
    rng = spawn_rng(61)
    for _ in range(2000):
        joint = random_joint(rng)
        condition = random_condition(rng, joint)
        report = check_mut_lemma(joint, condition)
        assert report.holds, (joint.probabilities, condition, report)


def test_mutual_information_nonnegative_random():
    rng = spawn_rng(62)
    for _ in range(500):
        joint = random_joint(rng)
        info = mutual_information(joint)
        assert info >= -1e-12
        # factorized version has zero information
        p = joint.probabilities
        factor = JointPmf(np.outer(p.sum(axis=1), p.sum(axis=0)))
        assert mutual_information(factor) == pytest.approx(0.0, abs=1e-10)


def test_pmf_validation():
    with pytest.raises(ValueError):
        JointPmf(np.array([[0.5, 0.6]]))
    with pytest.raises(ValueError):
        JointPmf(np.array([[-0.1, 1.1]]))
    with pytest.raises(ValueError):
        JointPmf(np.ones(4) / 4.0)


def test_empirical_tails_small():
    rng = spawn_rng(63)
    checks = empirical_tail_checks(rng, samples=20_000)
    assert len(checks) == 20
    assert all(c.ok for c in checks), [c for c in checks if not c.ok]
