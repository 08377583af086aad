"""Exact matrix representation on the monomial basis."""

from fractions import Fraction

import numpy as np
import pytest

from rigidlab.subres.linearize import (
    LinearizationMatrix,
    embed,
    linearization_basis,
    linearize,
)
from rigidlab.subres.maps import (
    PolynomialMap,
    compose,
    identity_map,
    invert,
    translation,
    validate,
)
from rigidlab.subres.spaces import FilteredSpace, as_fraction

from oracles import frac_matmul, random_admissible_components

WEIGHT_SETS = [((2, 1), (1, 1)), ((3, 2, 1), (1, 1, 1)), (("5/2", 1), (1, 1))]


def space(weights, mults):
    return FilteredSpace(tuple(as_fraction(w) for w in weights), tuple(mults))


def worked_map():
    sp = space((2, 1), (1, 1))
    comps = (
        {(1, 0): Fraction(3), (0, 1): Fraction(1), (0, 2): Fraction(2)},
        {(0, 1): Fraction(2)},
    )
    return validate(PolynomialMap.endo(sp, comps))


def random_map(sp, rng, strict=False, translate=True):
    comps = random_admissible_components(
        sp.coord_weights, rng, strict=strict, translate=translate
    )
    return validate(PolynomialMap.endo(sp, tuple(comps)))


def test_worked_map_matrix_is_exact():
    L = linearize(worked_map())
    assert L.basis == ((0, 2), (0, 1), (1, 0))
    assert L.rows == (
        (Fraction(4), Fraction(0), Fraction(0)),
        (Fraction(0), Fraction(2), Fraction(0)),
        (Fraction(2), Fraction(1), Fraction(3)),
    )
    assert L.size == 3
    assert np.array_equal(L.to_float(), np.array([[4, 0, 0], [0, 2, 0], [2, 1, 3.0]]))


def test_embed_evaluates_basis_monomials():
    sp = space((2, 1), (1, 1))
    assert embed(sp, (Fraction(1, 3), Fraction(2, 5))) == (
        Fraction(4, 25),
        Fraction(2, 5),
        Fraction(1, 3),
    )
    with_const = embed(sp, (2, 3), include_constant=True)
    assert with_const == (9, 3, 2, 1)


def test_embed_intertwines_action_and_matrix():
    rng = np.random.default_rng(5)
    for weights, mults in WEIGHT_SETS:
        sp = space(weights, mults)
        for _ in range(6):
            f = random_map(sp, rng)
            L = linearize(f)
            x = tuple(
                Fraction(int(rng.integers(-7, 8)), int(rng.integers(1, 6)))
                for _ in range(sp.dim)
            )
            from rigidlab.subres.maps import act

            lhs = embed(sp, act(f, x), L.include_constant)
            vec = embed(sp, x, L.include_constant)
            rhs = tuple(
                sum((r * v for r, v in zip(row, vec)), Fraction(0)) for row in L.rows
            )
            assert lhs == rhs


def test_linearize_is_multiplicative():
    rng = np.random.default_rng(17)
    for weights, mults in WEIGHT_SETS:
        sp = space(weights, mults)
        for _ in range(6):
            f = random_map(sp, rng, translate=False)
            g = random_map(sp, rng, translate=False)
            Lf, Lg, Lfg = linearize(f), linearize(g), linearize(compose(f, g))
            assert Lfg.rows == (Lf @ Lg).rows
            assert [list(r) for r in Lfg.rows] == frac_matmul(
                [list(r) for r in Lf.rows], [list(r) for r in Lg.rows]
            )


def test_linearize_inverse_gives_matrix_inverse():
    rng = np.random.default_rng(29)
    sp = space((2, 1), (1, 1))
    f = random_map(sp, rng, translate=False)
    prod = linearize(f) @ linearize(invert(f))
    assert prod.rows == LinearizationMatrix.identity(sp).rows


def test_identity_map_linearizes_to_identity():
    sp = space((3, 2, 1), (1, 1, 1))
    assert linearize(identity_map(sp)).rows == LinearizationMatrix.identity(sp).rows


def test_constant_terms_need_the_constant_basis_entry():
    sp = space((2, 1), (1, 1))
    t = translation(sp, (1, 2))
    auto = linearize(t)  # include_constant defaults on for translating maps
    assert auto.include_constant
    assert auto.basis[-1] == (0, 0)
    with pytest.raises(ValueError):
        linearize(t, include_constant=False)
    # constant row of the matrix fixes the constant monomial
    assert auto.rows[-1] == (Fraction(0),) * (auto.size - 1) + (Fraction(1),)


def test_basis_matches_enumeration():
    for weights, mults in WEIGHT_SETS:
        sp = space(weights, mults)
        basis = linearization_basis(sp, include_constant=True)
        assert basis[-1] == sp.zero_mono()
        assert len(set(basis)) == len(basis)


def test_matmul_rejects_mismatched_bases():
    a = LinearizationMatrix.identity(space((2, 1), (1, 1)))
    b = LinearizationMatrix.identity(space((2, 1), (1, 1)), include_constant=True)
    with pytest.raises(ValueError):
        a @ b
