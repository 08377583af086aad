"""QR Lyapunov spectra, Oseledets flags, and contraction diagnostics."""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import pytest

from rigidlab.dynamics.lyapunov import (
    GapTooSmall,
    NonInvertibleJacobian,
    TangentCocycle,
    contraction_check,
    draw_word,
    lyapunov_qr,
    oseledets_flag,
)
from rigidlab.dynamics.systems import CircleRotation, ToralAuto
from rigidlab.walk import WalkMeasure

from oracles import log_abs_eigenvalues

CAT = ToralAuto(((2, 1), (1, 1)))
CAT_INV = ToralAuto(((1, -1), (-1, 2)))
Q0 = (0.1234, 0.5678)


@dataclass(frozen=True)
class FakeLinear:
    """Duck-typed constant-Jacobian system for error-path and splitting tests."""

    mat: tuple

    @property
    def dim(self):
        return len(self.mat)

    @property
    def space(self):
        return f"torus-{self.dim}"

    @property
    def is_linear(self):
        return True

    def apply(self, q):
        return np.mod(np.asarray(self.mat, dtype=float) @ np.asarray(q, dtype=float), 1.0)

    def apply_many(self, pts):
        return np.mod(pts @ np.asarray(self.mat, dtype=float).T, 1.0)

    def jacobian(self, q):
        return np.asarray(self.mat, dtype=float)


def test_identity_word_has_zero_exponents():
    ident = FakeLinear(((1, 0), (0, 1)))
    rep = lyapunov_qr(ident, Q0, 100)
    assert rep.exponents == (0.0, 0.0)
    assert rep.residual == 0.0


def test_cat_map_matches_eigenvalue_oracle():
    rep = lyapunov_qr(CAT, Q0, 10_000)
    oracle = log_abs_eigenvalues(CAT.matrix)
    assert abs(rep.exponents[0] - oracle[0]) < 1e-3
    assert abs(rep.exponents[0] - math.log((3 + math.sqrt(5)) / 2)) < 1e-3
    assert abs(rep.exponents[0] + rep.exponents[1]) <= 1e-9
    assert rep.residual <= 1e-9
    assert rep.dim == 2 and rep.n == 10_000


def test_determinant_residual_holds_at_every_horizon():
    for n in (10, 100, 1000):
        rep = lyapunov_qr(CAT, Q0, n, burn_in=0)
        assert rep.residual <= 1e-9


def test_fixed_linear_map_estimates_are_horizon_stable():
    a = lyapunov_qr(CAT, Q0, 4000).exponents
    b = lyapunov_qr(CAT, Q0, 8000).exponents
    assert max(abs(x - y) for x, y in zip(a, b)) < 1e-8


def test_random_word_seeds_agree_within_monte_carlo_band():
    mu = WalkMeasure(((CAT, Fraction(1, 2)), (CAT_INV, Fraction(1, 2))))
    n = 100_000
    rep1 = lyapunov_qr(mu, Q0, n, seed=1)
    rep2 = lyapunov_qr(mu, Q0, n, seed=2)
    assert rep1.exponents[0] > 0
    assert abs(rep1.exponents[0] - rep2.exponents[0]) < 5 / math.sqrt(n)
    assert rep1.residual <= 1e-9


def test_random_sampler_requires_seed():
    mu = WalkMeasure(((CAT, Fraction(1, 2)), (CAT_INV, Fraction(1, 2))))
    with pytest.raises(ValueError):
        lyapunov_qr(mu, Q0, 100)
    # deterministic samplers need no seed
    systems, word = draw_word(CAT, 5, None)
    assert systems == [CAT] and np.array_equal(word, np.zeros(5, dtype=np.int64))


def test_singular_jacobian_is_reported():
    broken = FakeLinear(((1, 0), (0, 0)))
    with pytest.raises(NonInvertibleJacobian):
        lyapunov_qr(broken, Q0, 10, burn_in=0)


def test_tangent_cocycle_is_exact_for_integer_words():
    coc = TangentCocycle([CAT], [0] * 10, np.asarray(Q0))
    prod = coc.run()
    # Fibonacci structure: powers of the matrix have Fibonacci entries
    expect = np.linalg.matrix_power(np.array(CAT.matrix, dtype=object), 10)
    assert np.array_equal(prod, expect)
    assert prod.dtype == object  # exact integers, no float overflow


def test_oseledets_recovers_the_expanding_line():
    rep = oseledets_flag(CAT, Q0, 300)
    oracle_vals, oracle_vecs = np.linalg.eigh(np.array(CAT.matrix, dtype=float))
    top = oracle_vecs[:, np.argmax(oracle_vals)]
    got = rep.directions[:, 0]
    angle = math.acos(min(1.0, abs(float(np.dot(top, got)))))
    assert angle < 1e-6
    assert max(rep.angle_stability) < 1e-6
    assert rep.filtration(1).shape == (2, 1)


def test_oseledets_axis_aligned_splitting_is_exact():
    diag = FakeLinear(((2.0, 0.0), (0.0, 0.5)))
    rep = oseledets_flag(diag, (0.2, 0.7), 50)
    assert abs(abs(rep.directions[0, 0]) - 1.0) < 1e-12
    assert abs(abs(rep.directions[1, 1]) - 1.0) < 1e-12
    assert rep.exponents[0] == pytest.approx(math.log(2), abs=1e-12)


def test_oseledets_identity_gap_too_small():
    with pytest.raises(GapTooSmall):
        oseledets_flag(FakeLinear(((1, 0), (0, 1))), Q0, 50)


def test_contraction_along_stable_direction():
    vals, vecs = np.linalg.eigh(np.array(CAT.matrix, dtype=float))
    stable = vecs[:, np.argmin(np.abs(vals))]
    x = np.asarray(Q0) + 1e-6 * stable
    rep = contraction_check(CAT, Q0, x, 40)
    lam = math.log((3 + math.sqrt(5)) / 2)
    assert rep.slope == pytest.approx(-lam, abs=1e-3)
    assert not rep.coincident


def test_contraction_expanding_direction_has_positive_slope():
    vals, vecs = np.linalg.eigh(np.array(CAT.matrix, dtype=float))
    unstable = vecs[:, np.argmax(np.abs(vals))]
    x = np.asarray(Q0) + 1e-9 * unstable
    rep = contraction_check(CAT, Q0, x, 60)
    assert rep.slope is not None and rep.slope > 0.5
    assert rep.separated_at is not None  # expansion leaves the chart


def test_contraction_coincident_points():
    rep = contraction_check(CAT, Q0, Q0, 10)
    assert rep.coincident and rep.slope is None and rep.log_distances == ()


def test_contraction_isometry_has_flat_slope():
    rot = CircleRotation((math.sqrt(5) - 1) / 2)
    rep = contraction_check(rot, 0.1, 0.1 + 1e-4, 50)
    assert rep.slope == pytest.approx(0.0, abs=1e-9)


def test_bad_arguments():
    with pytest.raises(ValueError):
        lyapunov_qr(CAT, Q0, 0)
    with pytest.raises(ValueError):
        lyapunov_qr(CAT, Q0, 10, burn_in=10)
