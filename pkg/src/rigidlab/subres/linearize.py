"""Exact linear representation of subresonant maps on a monomial basis.

Every monomial of weight <= the top weight, composed with a subresonant map,
expands again over monomials of weight <= the top weight, so the finite
monomial basis carries a faithful matrix representation: L(F o G) = L(F) L(G)
exactly, and embed(F(q)) = L(F) . embed(q) for every point q.

Basis order is total degree descending, then lexicographic ascending on the
exponent tuple; for weights (2,1) this is (y^2, y, x).  Constant terms need
one extra weight-0 basis entry (the constant monomial, which sorts last);
`include_constant=None` adds it exactly when the map translates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

import numpy as np

from .maps import PolynomialMap, SubresonantMap, substitute
from .spaces import FilteredSpace, Mono, as_fraction, monomials_up_to_weight


def linearization_basis(
    space: FilteredSpace, include_constant: bool = False
) -> Tuple[Mono, ...]:
    return monomials_up_to_weight(space, space.top_weight, include_constant)


def embed(space: FilteredSpace, point: Sequence, include_constant: bool = False) -> Tuple:
    """Evaluate every basis monomial at the point, in basis order."""
    basis = linearization_basis(space, include_constant)
    exact = all(not isinstance(p, float) for p in point)
    coords = [as_fraction(p) for p in point] if exact else [float(p) for p in point]
    out = []
    for mono in basis:
        term = Fraction(1) if exact else 1.0
        for x, e in zip(coords, mono):
            for _ in range(e):
                term = term * x
        out.append(term)
    return tuple(out)


@dataclass(frozen=True)
class LinearizationMatrix:
    """Exact matrix of a subresonant map on the monomial basis.

    rows[r][c] is the coefficient of basis monomial c in (basis monomial r) o F,
    so embed(F(q)) = rows . embed(q).
    """

    space: FilteredSpace
    basis: Tuple[Mono, ...]
    include_constant: bool
    rows: Tuple[Tuple[Fraction, ...], ...]

    @property
    def size(self) -> int:
        return len(self.basis)

    def __matmul__(self, other: "LinearizationMatrix") -> "LinearizationMatrix":
        if self.basis != other.basis or self.space != other.space:
            raise ValueError("matrices live on different bases")
        n = self.size
        rows = tuple(
            tuple(
                sum((self.rows[i][k] * other.rows[k][j] for k in range(n)), Fraction(0))
                for j in range(n)
            )
            for i in range(n)
        )
        return LinearizationMatrix(self.space, self.basis, self.include_constant, rows)

    @classmethod
    def identity(
        cls, space: FilteredSpace, include_constant: bool = False
    ) -> "LinearizationMatrix":
        basis = linearization_basis(space, include_constant)
        n = len(basis)
        rows = tuple(
            tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)
        )
        return cls(space, basis, include_constant, rows)

    def to_float(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.rows], dtype=float)


def linearize(
    f: SubresonantMap | PolynomialMap, include_constant: bool | None = None
) -> LinearizationMatrix:
    """Matrix of F on the monomial basis; exact and multiplicative."""
    poly = f.poly if isinstance(f, SubresonantMap) else f
    space = poly.domain
    if include_constant is None:
        include_constant = poly.has_constant_term()
    basis = linearization_basis(space, include_constant)
    index = {mono: i for i, mono in enumerate(basis)}
    zero = space.zero_mono()
    rows: List[Tuple[Fraction, ...]] = []
    for mono in basis:
        composed = substitute({mono: Fraction(1)}, poly.components, space.dim)
        row = [Fraction(0)] * len(basis)
        for m, c in composed.items():
            if m not in index:
                if m == zero:
                    raise ValueError(
                        "map has constant terms; linearize with include_constant=True"
                    )
                raise ValueError(f"monomial {m} escapes the basis; map not subresonant?")
            row[index[m]] = c
        rows.append(tuple(row))
    return LinearizationMatrix(space, basis, include_constant, tuple(rows))
