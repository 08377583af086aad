"""Filtered vector spaces and weighted monomials (exact rational arithmetic).

Conventions used throughout the algebra layer:

* A filtered space is R^n together with a positive rational weight per
  coordinate.  Distinct weights are listed in strictly decreasing order with
  integer multiplicities; coordinates are grouped by weight, heaviest first,
  so coordinate 0 always carries the top weight.
* A monomial is a dense exponent tuple, one nonnegative integer per
  coordinate.  Its weight is the weight-dot-exponent sum, so weights add
  under multiplication.  The constant monomial has weight 0.
* All weights and coefficients are fractions.Fraction; floats are rejected
  at construction so that every group operation downstream stays exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, List, Sequence, Tuple, Union

Mono = Tuple[int, ...]
RationalLike = Union[Fraction, int, str]


def as_fraction(value: RationalLike) -> Fraction:
    """Coerce an exact rational-like value; floats are deliberately rejected."""
    if isinstance(value, float):
        raise TypeError(
            "float is not an exact rational; pass a Fraction, int or string like '5/2'"
        )
    return Fraction(value)


@dataclass(frozen=True)
class FilteredSpace:
    """R^n with strictly decreasing positive rational weights and multiplicities."""

    weights: Tuple[Fraction, ...]
    multiplicities: Tuple[int, ...]

    def __post_init__(self) -> None:
        weights = tuple(as_fraction(w) for w in self.weights)
        mults = tuple(int(m) for m in self.multiplicities)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "multiplicities", mults)
        if not weights:
            raise ValueError("a filtered space needs at least one weight")
        if len(weights) != len(mults):
            raise ValueError("weights and multiplicities must have equal length")
        if any(w <= 0 for w in weights):
            raise ValueError("weights must be positive")
        for earlier, later in zip(weights, weights[1:]):
            if not earlier > later:
                raise ValueError("weights must be strictly decreasing")
        if any(m < 1 for m in mults):
            raise ValueError("multiplicities must be >= 1")

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[RationalLike, int]]) -> "FilteredSpace":
        pairs = list(pairs)
        return cls(tuple(as_fraction(w) for w, _ in pairs), tuple(m for _, m in pairs))

    @property
    def dim(self) -> int:
        return sum(self.multiplicities)

    @cached_property
    def coord_weights(self) -> Tuple[Fraction, ...]:
        """Weight of each coordinate, heaviest block first."""
        out: List[Fraction] = []
        for w, m in zip(self.weights, self.multiplicities):
            out.extend([w] * m)
        return tuple(out)

    @cached_property
    def weight_blocks(self) -> Tuple[Tuple[Fraction, Tuple[int, ...]], ...]:
        """(weight, coordinate indices) per weight level, heaviest first."""
        blocks = []
        start = 0
        for w, m in zip(self.weights, self.multiplicities):
            blocks.append((w, tuple(range(start, start + m))))
            start += m
        return tuple(blocks)

    @property
    def top_weight(self) -> Fraction:
        return self.weights[0]

    @property
    def min_weight(self) -> Fraction:
        return self.weights[-1]

    def zero_mono(self) -> Mono:
        return (0,) * self.dim


def monomial_weight(space: FilteredSpace, mono: Mono) -> Fraction:
    """Weight of a monomial: sum of exponent * coordinate weight."""
    if len(mono) != space.dim:
        raise ValueError(f"monomial arity {len(mono)} != space dimension {space.dim}")
    if any(e < 0 for e in mono):
        raise ValueError("exponents must be nonnegative")
    total = Fraction(0)
    for e, w in zip(mono, space.coord_weights):
        if e:
            total += e * w
    return total


def monomials_up_to_weight(
    space: FilteredSpace, cap: Fraction, include_constant: bool = False
) -> Tuple[Mono, ...]:
    """All monomials of weight <= cap, sorted by total degree descending then
    lexicographically ascending on the exponent tuple.

    The ordering reproduces, for weights (2,1), the basis (y^2, y, x); the
    constant monomial, when included, lands last.  Finiteness holds because
    every coordinate weight is >= the smallest weight > 0.
    """
    cap = as_fraction(cap)
    cw = space.coord_weights
    dim = space.dim
    found: List[Mono] = []

    def extend(prefix: List[int], coord: int, remaining: Fraction) -> None:
        if coord == dim:
            found.append(tuple(prefix))
            return
        e = 0
        left = remaining
        while left >= 0:
            prefix.append(e)
            extend(prefix, coord + 1, left)
            prefix.pop()
            e += 1
            left = remaining - e * cw[coord]

    extend([], 0, cap)
    if not include_constant:
        found = [m for m in found if any(m)]
    found.sort(key=lambda m: (-sum(m), m))
    return tuple(found)


def mono_mul(a: Mono, b: Mono) -> Mono:
    return tuple(x + y for x, y in zip(a, b))


def unit_mono(dim: int, coord: int) -> Mono:
    return tuple(1 if i == coord else 0 for i in range(dim))


def mono_str(mono: Mono, names: Sequence[str] | None = None) -> str:
    """Readable form like 'x1^2*x2'; '1' for the constant monomial."""
    if names is None:
        names = [f"x{i}" for i in range(len(mono))]
    parts = []
    for name, e in zip(names, mono):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts) if parts else "1"
