"""Entropy calculators: Shannon, Pesin sums, sandwich bounds, stiffness chain."""

import math
from fractions import Fraction

import numpy as np
import pytest

from rigidlab.dynamics.systems import ToralAuto
from rigidlab.entropy import (
    BoundCheck,
    ChainInequality,
    SpectrumSummary,
    ly_bounds,
    pesin_sum,
    relative_entropy_bound_check,
    shannon_entropy,
    stiffness_chain,
)
from rigidlab.walk import WalkMeasure

from oracles import shannon

CAT = ToralAuto(((2, 1), (1, 1)))
LAM = math.log((3 + math.sqrt(5)) / 2)


def spec(exponents, mults, e1=None, e2=None):
    return SpectrumSummary(
        tuple(exponents),
        tuple(mults),
        None if e1 is None else tuple(e1),
        None if e2 is None else tuple(e2),
    )


def test_shannon_entropy():
    one = WalkMeasure(((CAT, Fraction(1)),))
    assert shannon_entropy(one) == 0.0
    two = WalkMeasure(((CAT, Fraction(1, 2)), (ToralAuto(((1, 1), (0, 1))), Fraction(1, 2))))
    assert shannon_entropy(two) == pytest.approx(math.log(2), abs=1e-15)
    skew = WalkMeasure(((CAT, Fraction(1, 3)), (ToralAuto(((1, 1), (0, 1))), Fraction(2, 3))))
    assert shannon_entropy(skew) == pytest.approx(
        math.log(3) - (2 / 3) * math.log(2), abs=1e-12
    )
    assert shannon_entropy(skew) == pytest.approx(shannon([1 / 3, 2 / 3]), abs=1e-15)


def test_shannon_entropy_maximal_at_uniform():
    rng = np.random.default_rng(9)
    for _ in range(30):
        m = int(rng.integers(2, 7))
        raw = rng.integers(1, 20, size=m)
        probs = [Fraction(int(v), int(raw.sum())) for v in raw]
        h = shannon(probs)
        assert h <= math.log(m) + 1e-12
        if len(set(probs)) > 1:
            assert h < math.log(m) - 1e-12 or max(probs) == min(probs)


def test_spectrum_summary_validation():
    spec((0.5, -0.5), (1, 1))
    with pytest.raises(ValueError):
        spec((0.5, 0.5), (1, 1))  # not strictly decreasing
    with pytest.raises(ValueError):
        spec((0.5,), (0,))  # multiplicity < 1
    with pytest.raises(ValueError):
        spec((0.5,), (1, 1))  # length mismatch
    with pytest.raises(ValueError):
        spec((0.5,), (1,), e1=(2,), e2=(2,))  # dims exceed multiplicity
    with pytest.raises(ValueError):
        spec((0.5,), (2,), e1=(2,), e2=(1,))  # E1 larger than E2
    s = spec((0.5, -0.5), (2, 1))
    assert s.total_dim == 3


def test_pesin_sum():
    assert pesin_sum(spec((-0.3, -0.9), (1, 1))) == 0.0
    assert pesin_sum(spec((LAM, -LAM), (1, 1))) == pytest.approx(LAM, abs=1e-15)
    # diag(2, 2, 1/4) spectrum: log 2 with multiplicity 2
    s = spec((math.log(2), -math.log(4)), (2, 1))
    assert pesin_sum(s) == pytest.approx(2 * math.log(2), abs=1e-15)
    # explicit dims override multiplicities
    assert pesin_sum(s, dims=(1, 1)) == pytest.approx(math.log(2), abs=1e-15)
    # zero exponents never contribute
    assert pesin_sum(spec((0.0, -1.0), (5, 1))) == 0.0
    with pytest.raises(ValueError):
        pesin_sum(s, dims=(1,))


def test_ly_bounds():
    s = spec((LAM, -LAM), (1, 1), e1=(1, 0), e2=(1, 0))
    lo, hi = ly_bounds(s)
    assert lo == hi == pytest.approx(LAM, abs=1e-15)
    s2 = spec((0.8, 0.3, -1.0), (1, 1, 1), e1=(0, 0, 0), e2=(1, 1, 1))
    assert ly_bounds(s2) == (0.0, pytest.approx(1.1, abs=1e-12))
    with pytest.raises(ValueError):
        ly_bounds(spec((0.8,), (1,)))  # dims profiles required


def test_ly_bounds_monotone_in_the_dims():
    rng = np.random.default_rng(31)
    for _ in range(40):
        k = int(rng.integers(1, 4))
        exps = np.sort(rng.uniform(-1, 1, size=k))[::-1]
        while len(set(exps.tolist())) < k:
            exps = np.sort(rng.uniform(-1, 1, size=k))[::-1]
        mults = rng.integers(1, 4, size=k)
        e1 = [int(rng.integers(0, m + 1)) for m in mults]
        e2 = [int(rng.integers(lo, m + 1)) for lo, m in zip(e1, mults)]
        s = spec(exps.tolist(), mults.tolist(), e1=e1, e2=e2)
        lo, hi = ly_bounds(s)
        assert lo <= hi + 1e-15
        # enlarging a dim never decreases the matching bound
        for i in range(k):
            if e2[i] < mults[i]:
                bigger = list(e2)
                bigger[i] += 1
                s2 = spec(exps.tolist(), mults.tolist(), e1=e1, e2=bigger)
                assert ly_bounds(s2)[1] >= hi - 1e-15
            if e1[i] < e2[i]:
                bigger = list(e1)
                bigger[i] += 1
                s3 = spec(exps.tolist(), mults.tolist(), e1=bigger, e2=e2)
                assert ly_bounds(s3)[0] >= lo - 1e-15
        # upper bound with full dims is the Pesin sum, exactly
        full = spec(exps.tolist(), mults.tolist(), e1=e1, e2=mults.tolist())
        assert ly_bounds(full)[1] == pesin_sum(full)


def test_relative_entropy_bound_check():
    ok = relative_entropy_bound_check(math.log(2), math.log(2))
    assert isinstance(ok, BoundCheck)
    assert ok.consistent and ok.invariance_consistent
    assert ok.gap == pytest.approx(0.0, abs=1e-15)
    part = relative_entropy_bound_check(math.log(2), 0.3)
    assert part.consistent and not part.invariance_consistent
    assert part.gap == pytest.approx(math.log(2) - 0.3, abs=1e-12)
    bad = relative_entropy_bound_check(0.3, 0.5)
    assert not bad.consistent
    with pytest.raises(ValueError):
        relative_entropy_bound_check(-0.1, 0.0)
    with pytest.raises(ValueError):
        relative_entropy_bound_check(0.1, -0.2)


def test_stiffness_chain_balanced_case():
    s = spec((0.5, -0.5), (1, 1))
    verdict = stiffness_chain(math.log(2), s, h_rel=math.log(2))
    assert verdict.signed_sum == pytest.approx(0.0, abs=1e-15)
    assert verdict.consistent and verdict.forced_equality
    assert verdict.verdict == "stiffness-consistent"
    names = [iq.name for iq in verdict.inequalities]
    assert names == ["signed-sum-nonnegative", "chain-lower", "entropy-bound"]
    for iq in verdict.inequalities:
        assert isinstance(iq, ChainInequality)
        assert iq.holds and abs(iq.slack) <= 1e-12


def test_stiffness_chain_negative_sum_is_inconsistent():
    s = spec((-0.9,), (1,))
    verdict = stiffness_chain(0.5, s)
    assert verdict.signed_sum == pytest.approx(-0.9, abs=1e-15)
    assert not verdict.consistent and verdict.verdict == "inconsistent"
    assert not verdict.forced_equality


def test_stiffness_chain_without_h_rel_checks_only_the_sign():
    s = spec((0.7, -0.2), (1, 1))
    verdict = stiffness_chain(1.0, s)
    assert verdict.consistent
    assert not verdict.forced_equality
    assert [iq.name for iq in verdict.inequalities] == ["signed-sum-nonnegative"]
    # explicit dims select a sub-bundle
    verdict2 = stiffness_chain(1.0, s, dims=(1, 0))
    assert verdict2.signed_sum == pytest.approx(0.7, abs=1e-15)


def test_stiffness_chain_slack_tolerance():
    s = spec((0.5, -0.5), (1, 1))
    # a hair of numerical noise below zero still counts as holding
    verdict = stiffness_chain(math.log(2), s, h_rel=math.log(2) + 5e-13)
    assert all(iq.holds for iq in verdict.inequalities)
    assert verdict.forced_equality


def test_signed_sum_zero_for_sl_full_bundle():
    # full tangent bundle of |det|=1 systems: signed sum is the log determinant
    rep_exponents = (LAM, -LAM)
    s = spec(rep_exponents, (1, 1))
    verdict = stiffness_chain(math.log(2), s)
    assert verdict.signed_sum == pytest.approx(0.0, abs=1e-12)
    assert verdict.consistent
