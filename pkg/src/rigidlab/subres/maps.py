"""Subresonant polynomial self-maps: validation, composition, exact inversion.

A polynomial self-map F of a filtered space is *subresonant* when every
monomial appearing in output coordinate j has weight <= the weight of
coordinate j, and the weight-graded linear part (the matrix of same-weight
linear coefficients, block diagonal by weight level) is invertible.  These
maps form a group under composition; the *strictly* subresonant ones, where
every monomial of F - id has weight strictly below the target coordinate
weight, form the kernel of the graded-part homomorphism and hence a normal
subgroup.  Translations are strictly subresonant.

Inversion exploits the graded triangular structure: an output of weight w is
linear in the weight-w coordinates plus a polynomial in strictly lighter
coordinates, so solving from the lightest weight level upward needs one exact
linear solve per level.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Sequence, Tuple

from .spaces import (
    FilteredSpace,
    Mono,
    as_fraction,
    mono_mul,
    mono_str,
    monomial_weight,
    unit_mono,
)

PolyComponent = Dict[Mono, Fraction]


class SubresonanceError(Exception):
    """Base class for algebra-layer failures."""


class SpaceMismatch(SubresonanceError):
    pass


class ResonanceViolation(SubresonanceError):
    """A coefficient's monomial weight exceeds its target coordinate weight."""

    def __init__(self, out_index: int, mono: Mono, weight: Fraction, limit: Fraction):
        self.out_index = out_index
        self.mono = mono
        self.weight = weight
        self.limit = limit
        super().__init__(
            f"monomial {mono_str(mono)} of weight {weight} in output {out_index} "
            f"exceeds target weight {limit}"
        )


class StrictnessViolation(SubresonanceError):
    """Strict validation requested but F - id has a weight-critical monomial."""

    def __init__(self, out_index: int, mono: Mono):
        self.out_index = out_index
        self.mono = mono
        super().__init__(
            f"output {out_index} keeps monomial {mono_str(mono)} at the critical weight; "
            "map is subresonant but not strictly subresonant"
        )


class SingularGradedPart(SubresonanceError):
    """The weight-graded linear block is singular; no polynomial inverse exists."""


def _clean_component(comp: Mapping[Mono, object], dim: int) -> PolyComponent:
    out: PolyComponent = {}
    for mono, c in comp.items():
        mono = tuple(int(e) for e in mono)
        if len(mono) != dim:
            raise ValueError(f"monomial arity {len(mono)} != dimension {dim}")
        if any(e < 0 for e in mono):
            raise ValueError("exponents must be nonnegative")
        frac = as_fraction(c)
        if frac != 0:
            out[mono] = out.get(mono, Fraction(0)) + frac
            if out[mono] == 0:
                del out[mono]
    return out


@dataclass(frozen=True)
class PolynomialMap:
    """A polynomial map between filtered spaces, one sparse component per output.

    Components map dense exponent tuples to nonzero Fractions; the zero
    polynomial is the empty dict.  Instances are treated as immutable.
    """

    domain: FilteredSpace
    codomain: FilteredSpace
    components: Tuple[PolyComponent, ...]

    def __post_init__(self) -> None:
        comps = tuple(_clean_component(c, self.domain.dim) for c in self.components)
        if len(comps) != self.codomain.dim:
            raise ValueError(
                f"{len(comps)} components for codomain of dimension {self.codomain.dim}"
            )
        object.__setattr__(self, "components", comps)

    @classmethod
    def endo(
        cls, space: FilteredSpace, components: Sequence[Mapping[Mono, object]]
    ) -> "PolynomialMap":
        return cls(space, space, tuple(dict(c) for c in components))

    @property
    def is_endo(self) -> bool:
        return self.domain == self.codomain

    def has_constant_term(self) -> bool:
        zero = self.domain.zero_mono()
        return any(zero in comp for comp in self.components)

    def coefficient(self, out_index: int, mono: Mono) -> Fraction:
        return self.components[out_index].get(tuple(mono), Fraction(0))


@dataclass(frozen=True)
class SubresonantMap:
    """A validated member of the subresonant group; build via validate()."""

    poly: PolynomialMap
    strict: bool

    @property
    def space(self) -> FilteredSpace:
        return self.poly.domain

    @property
    def components(self) -> Tuple[PolyComponent, ...]:
        return self.poly.components


# ---------------------------------------------------------------------------
# sparse polynomial arithmetic on components


def poly_add(p: PolyComponent, q: PolyComponent) -> PolyComponent:
    out = dict(p)
    for mono, c in q.items():
        s = out.get(mono, Fraction(0)) + c
        if s:
            out[mono] = s
        else:
            out.pop(mono, None)
    return out


def poly_scale(p: PolyComponent, c: Fraction) -> PolyComponent:
    if c == 0:
        return {}
    return {mono: c * v for mono, v in p.items()}


def poly_mul(p: PolyComponent, q: PolyComponent) -> PolyComponent:
    out: PolyComponent = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            mono = mono_mul(m1, m2)
            s = out.get(mono, Fraction(0)) + c1 * c2
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
    return out


def _poly_pow(p: PolyComponent, k: int, one: PolyComponent) -> PolyComponent:
    acc = one
    for _ in range(k):
        acc = poly_mul(acc, p)
    return acc


def substitute(
    poly: PolyComponent, replacements: Sequence[PolyComponent], dim_out: int
) -> PolyComponent:
    """Evaluate a polynomial with each coordinate replaced by a polynomial.

    replacements[i] is a polynomial (over a space of dimension dim_out) to
    substitute for coordinate i.  Powers are cached per call; exponents in
    this setting stay small (degree <= top weight / min weight).
    """
    one: PolyComponent = {(0,) * dim_out: Fraction(1)}
    power_cache: Dict[Tuple[int, int], PolyComponent] = {}

    def power(i: int, k: int) -> PolyComponent:
        if k == 0:
            return one
        key = (i, k)
        if key not in power_cache:
            power_cache[key] = poly_mul(power(i, k - 1), replacements[i])
        return power_cache[key]

    out: PolyComponent = {}
    for mono, c in poly.items():
        term = {(0,) * dim_out: c}
        for i, e in enumerate(mono):
            if e:
                term = poly_mul(term, power(i, e))
        out = poly_add(out, term)
    return out


# ---------------------------------------------------------------------------
# exact linear algebra over Fraction (small blocks only)


def fraction_solve(matrix: Sequence[Sequence[Fraction]]) -> List[List[Fraction]]:
    """Exact inverse of a square Fraction matrix via Gauss-Jordan.

    Raises SingularGradedPart when the matrix is singular.
    """
    n = len(matrix)
    aug = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise SingularGradedPart("graded linear block is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = Fraction(1) / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


# ---------------------------------------------------------------------------
# validation and group structure


def graded_part(pmap: PolynomialMap) -> PolynomialMap:
    """Keep only monomials whose weight equals the target coordinate weight."""
    space = pmap.domain
    cw = space.coord_weights
    comps = []
    for j, comp in enumerate(pmap.components):
        comps.append(
            {m: c for m, c in comp.items() if monomial_weight(space, m) == cw[j]}
        )
    return PolynomialMap(space, space, tuple(comps))


def _graded_linear_blocks(pmap: PolynomialMap) -> List[Tuple[Tuple[int, ...], List[List[Fraction]]]]:
    """Per weight level: (coordinate indices, matrix of same-weight linear coefficients)."""
    space = pmap.domain
    dim = space.dim
    blocks = []
    for _, idxs in space.weight_blocks:
        rows = []
        for j in idxs:
            comp = pmap.components[j]
            rows.append([comp.get(unit_mono(dim, i), Fraction(0)) for i in idxs])
        blocks.append((idxs, rows))
    return blocks


def is_strict(pmap: PolynomialMap) -> bool:
    """True iff every monomial of F - id has weight strictly below its target."""
    space = pmap.domain
    cw = space.coord_weights
    dim = space.dim
    for j, comp in enumerate(pmap.components):
        for mono, c in comp.items():
            if monomial_weight(space, mono) < cw[j]:
                continue
            if mono == unit_mono(dim, j) and c == 1:
                continue
            return False
        # F - id must not drop the diagonal entirely: coefficient of x_j is 1
        if comp.get(unit_mono(dim, j), Fraction(0)) != 1:
            return False
    return True


def validate(pmap: PolynomialMap | SubresonantMap, require_strict: bool = False) -> SubresonantMap:
    """Check subresonance and graded invertibility; return the validated map.

    Raises ResonanceViolation naming the offending coefficient, or
    SingularGradedPart when a graded linear block is singular, or
    StrictnessViolation when require_strict is set and F - id keeps a
    weight-critical monomial.
    """
    if isinstance(pmap, SubresonantMap):
        pmap = pmap.poly
    if not pmap.is_endo:
        raise SpaceMismatch("subresonant maps are self-maps of one filtered space")
    space = pmap.domain
    cw = space.coord_weights
    for j, comp in enumerate(pmap.components):
        for mono in comp:
            w = monomial_weight(space, mono)
            if w > cw[j]:
                raise ResonanceViolation(j, mono, w, cw[j])
    for _, rows in _graded_linear_blocks(pmap):
        fraction_solve(rows)  # raises SingularGradedPart when singular
    strict = is_strict(pmap)
    if require_strict and not strict:
        for j, comp in enumerate(pmap.components):
            for mono, c in comp.items():
                at_weight = monomial_weight(space, mono) == cw[j]
                if at_weight and not (mono == unit_mono(space.dim, j) and c == 1):
                    raise StrictnessViolation(j, mono)
            if comp.get(unit_mono(space.dim, j), Fraction(0)) != 1:
                raise StrictnessViolation(j, unit_mono(space.dim, j))
    return SubresonantMap(pmap, strict)


def identity_map(space: FilteredSpace) -> SubresonantMap:
    comps = [{unit_mono(space.dim, j): Fraction(1)} for j in range(space.dim)]
    return SubresonantMap(PolynomialMap.endo(space, comps), True)


def translation(space: FilteredSpace, vector: Sequence) -> SubresonantMap:
    """x -> x + v; translations are strictly subresonant (constants have weight 0)."""
    if len(vector) != space.dim:
        raise ValueError("translation vector has wrong dimension")
    comps = []
    for j in range(space.dim):
        comp = {unit_mono(space.dim, j): Fraction(1)}
        v = as_fraction(vector[j])
        if v:
            comp[space.zero_mono()] = v
        comps.append(comp)
    return SubresonantMap(PolynomialMap.endo(space, comps), True)


def compose(f: SubresonantMap, g: SubresonantMap) -> SubresonantMap:
    """F after G (apply G first).  The result re-validates; closure is exact."""
    if f.space != g.space:
        raise SpaceMismatch("composition needs maps on the same filtered space")
    dim = f.space.dim
    comps = tuple(
        substitute(comp, g.poly.components, dim) for comp in f.poly.components
    )
    return validate(PolynomialMap.endo(f.space, comps))


def invert(f: SubresonantMap) -> SubresonantMap:
    """Exact polynomial inverse via the graded triangular solve.

    Outputs of weight w read F_j = L x_(w) + P_j(lighter coordinates); solve
    level by level from the lightest weight up, substituting the already
    solved lighter coordinates.  One Fraction linear solve per weight level,
    so at most (number of weight levels) <= (number of basis monomials).
    """
    space = f.space
    dim = space.dim
    solved: Dict[int, PolyComponent] = {}
    unit_polys = [
        {unit_mono(dim, i): Fraction(1)} for i in range(dim)
    ]  # coordinate functionals of the target variables
    for weight, idxs in reversed(space.weight_blocks):
        block = [[f.components[j].get(unit_mono(dim, i), Fraction(0)) for i in idxs]
                 for j in idxs]
        block_inv = fraction_solve(block)
        # r_j = y_j - P_j(solved lighter coordinates), as a polynomial in y
        rhs: List[PolyComponent] = []
        for j in idxs:
            residual = {
                m: c
                for m, c in f.components[j].items()
                if not (sum(m) == 1 and any(m[i] == 1 for i in idxs))
            }
            replacements = [solved.get(i, unit_polys[i]) for i in range(dim)]
            shifted = substitute(residual, replacements, dim)
            rhs.append(poly_add(unit_polys[j], poly_scale(shifted, Fraction(-1))))
        for row, j in enumerate(idxs):
            acc: PolyComponent = {}
            for col, _ in enumerate(idxs):
                if block_inv[row][col]:
                    acc = poly_add(acc, poly_scale(rhs[col], block_inv[row][col]))
            solved[j] = acc
    comps = tuple(solved[j] for j in range(dim))
    return validate(PolynomialMap.endo(space, comps))


def conjugate(g: SubresonantMap, f: SubresonantMap) -> SubresonantMap:
    """g o f o g^{-1}; strictness survives (strict maps form a normal subgroup)."""
    return compose(compose(g, f), invert(g))


def act(f: SubresonantMap | PolynomialMap, point: Sequence) -> Tuple:
    """Evaluate at a point.  Fraction/int coordinates stay exact; floats float."""
    poly = f.poly if isinstance(f, SubresonantMap) else f
    exact = all(not isinstance(p, float) for p in point)
    if len(point) != poly.domain.dim:
        raise ValueError("point has wrong dimension")
    coords = [as_fraction(p) for p in point] if exact else [float(p) for p in point]
    out = []
    for comp in poly.components:
        total = Fraction(0) if exact else 0.0
        for mono, c in comp.items():
            term = c if exact else float(c)
            for x, e in zip(coords, mono):
                for _ in range(e):
                    term = term * x
            total = total + term
        out.append(total)
    return tuple(out)
