"""JSON round-trip for filtered spaces and polynomial maps.

Rationals travel as strings ("2", "1/3", "0.5" all parse exactly); monomials
as sparse {coordinate index: exponent} objects with string keys.  Round-trip
is exact: parse(emit(F)) == F.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Dict, List, Union

from .maps import PolynomialMap, SubresonantMap
from .spaces import FilteredSpace, Mono


def _fraction_from_string(s: Union[str, int]) -> Fraction:
    if isinstance(s, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, str):
        return Fraction(s)  # accepts "3", "1/3" and decimal strings like "0.5"
    raise ValueError(f"expected a rational string, got {type(s).__name__}")


def _fraction_to_string(f: Fraction) -> str:
    return str(f)


def space_to_json(space: FilteredSpace) -> dict:
    return {
        "weights": [
            [_fraction_to_string(w), m]
            for w, m in zip(space.weights, space.multiplicities)
        ]
    }


def space_from_json(doc: dict) -> FilteredSpace:
    pairs = doc["weights"]
    return FilteredSpace(
        tuple(_fraction_from_string(w) for w, _ in pairs),
        tuple(int(m) for _, m in pairs),
    )


def _mono_to_json(mono: Mono) -> Dict[str, int]:
    return {str(i): e for i, e in enumerate(mono) if e}


def _mono_from_json(doc: Dict[str, int], dim: int) -> Mono:
    mono = [0] * dim
    for key, e in doc.items():
        i = int(key)
        if not 0 <= i < dim:
            raise ValueError(f"coordinate index {i} out of range for dimension {dim}")
        mono[i] = int(e)
    return tuple(mono)


def map_to_json(f: Union[SubresonantMap, PolynomialMap]) -> dict:
    poly = f.poly if isinstance(f, SubresonantMap) else f
    coeffs: List[dict] = []
    for j, comp in enumerate(poly.components):
        for mono in sorted(comp):
            coeffs.append(
                {"out": j, "mono": _mono_to_json(mono), "c": _fraction_to_string(comp[mono])}
            )
    doc = space_to_json(poly.domain)
    doc["coeffs"] = coeffs
    return doc


def map_from_json(doc: dict) -> PolynomialMap:
    space = space_from_json(doc)
    comps: List[Dict[Mono, Fraction]] = [dict() for _ in range(space.dim)]
    for item in doc.get("coeffs", []):
        j = int(item["out"])
        if not 0 <= j < space.dim:
            raise ValueError(f"output index {j} out of range")
        mono = _mono_from_json(item.get("mono", {}), space.dim)
        comps[j][mono] = comps[j].get(mono, Fraction(0)) + _fraction_from_string(item["c"])
    return PolynomialMap.endo(space, comps)


def dump_map(f: Union[SubresonantMap, PolynomialMap], path: str) -> None:
    with open(path, "w") as fh:
        json.dump(map_to_json(f), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_map(path: str) -> PolynomialMap:
    with open(path) as fh:
        return map_from_json(json.load(fh))
