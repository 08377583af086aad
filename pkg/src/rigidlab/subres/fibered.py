"""Admissibility of fibered cocycle normal forms.

The model: a subresonant base map on coordinates of weights l_1 > ... and a
linear action on fiber coordinates xi_1, ..., xi_k of weights m_1 > ... > m_k,
with matrix entries that are polynomials in the base coordinates.  The entry
feeding fiber output i from fiber input j may only carry base monomials of
weight <= m_i - m_j; in particular diagonal entries are constants and the
block below the diagonal (transfers from lighter to heavier fibers) vanishes.
This is exactly subresonance of the total map on (fiber, base) coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Mapping, Tuple

from .maps import PolyComponent, SubresonantMap, _clean_component
from .spaces import as_fraction, monomial_weight


class MalformedFiberedMap(ValueError):
    pass


@dataclass(frozen=True)
class FiberedCocycleMap:
    """Base subresonant map + fiber-linear part with polynomial entries.

    diag[i] multiplies xi_i; off_entries[(i, j)] (i != j) is the polynomial
    in base coordinates multiplying xi_j in the xi_i output.
    """

    base: SubresonantMap
    fiber_weights: Tuple[Fraction, ...]
    diag: Tuple[Fraction, ...]
    off_entries: Mapping[Tuple[int, int], PolyComponent] = field(default_factory=dict)

    def __post_init__(self) -> None:
        weights = tuple(as_fraction(w) for w in self.fiber_weights)
        object.__setattr__(self, "fiber_weights", weights)
        if not weights or any(w <= 0 for w in weights):
            raise MalformedFiberedMap("fiber weights must be positive")
        for earlier, later in zip(weights, weights[1:]):
            if not earlier > later:
                raise MalformedFiberedMap("fiber weights must be strictly decreasing")
        diag = tuple(as_fraction(a) for a in self.diag)
        object.__setattr__(self, "diag", diag)
        if len(diag) != len(weights):
            raise MalformedFiberedMap("one diagonal constant per fiber coordinate")
        k = len(weights)
        entries: Dict[Tuple[int, int], PolyComponent] = {}
        for (i, j), comp in dict(self.off_entries).items():
            if not (0 <= i < k and 0 <= j < k) or i == j:
                raise MalformedFiberedMap(f"bad entry index {(i, j)}")
            cleaned = _clean_component(comp, self.base.space.dim)
            if cleaned:
                entries[(i, j)] = cleaned
        object.__setattr__(self, "off_entries", entries)


def validate_fibered(cocycle: FiberedCocycleMap) -> bool:
    """True iff every entry respects the fiber weight gaps and the diagonal
    constants are nonzero (so the fiber action is invertible)."""
    if any(a == 0 for a in cocycle.diag):
        return False
    space = cocycle.base.space
    mw = cocycle.fiber_weights
    for (i, j), comp in cocycle.off_entries.items():
        gap = mw[i] - mw[j]
        for mono in comp:
            if monomial_weight(space, mono) > gap:
                return False
    return True
