"""Exact algebra of subresonant polynomial maps on filtered spaces."""

from .spaces import (
    FilteredSpace,
    Mono,
    as_fraction,
    mono_str,
    monomial_weight,
    monomials_up_to_weight,
    unit_mono,
)
from .maps import (
    PolynomialMap,
    SubresonantMap,
    SubresonanceError,
    SpaceMismatch,
    ResonanceViolation,
    StrictnessViolation,
    SingularGradedPart,
    act,
    compose,
    conjugate,
    graded_part,
    identity_map,
    invert,
    is_strict,
    translation,
    validate,
)
from .linearize import LinearizationMatrix, embed, linearization_basis, linearize
from .fibered import FiberedCocycleMap, MalformedFiberedMap, validate_fibered
from .serialize import (
    dump_map,
    load_map,
    map_from_json,
    map_to_json,
    space_from_json,
    space_to_json,
)

__all__ = [
    "FilteredSpace",
    "Mono",
    "as_fraction",
    "mono_str",
    "monomial_weight",
    "monomials_up_to_weight",
    "unit_mono",
    "PolynomialMap",
    "SubresonantMap",
    "SubresonanceError",
    "SpaceMismatch",
    "ResonanceViolation",
    "StrictnessViolation",
    "SingularGradedPart",
    "act",
    "compose",
    "conjugate",
    "graded_part",
    "identity_map",
    "invert",
    "is_strict",
    "translation",
    "validate",
    "LinearizationMatrix",
    "embed",
    "linearization_basis",
    "linearize",
    "FiberedCocycleMap",
    "MalformedFiberedMap",
    "validate_fibered",
    "dump_map",
    "load_map",
    "map_from_json",
    "map_to_json",
    "space_from_json",
    "space_to_json",
]
