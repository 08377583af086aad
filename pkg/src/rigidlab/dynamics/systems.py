"""Generator systems: the maps a random walk can draw.

Four families, each with an exact or analytic Jacobian:

* ToralAuto       -- integer matrix with |det| = 1 acting on the d-torus
* AffineInterval  -- x -> a x + b on [0, 1], exact rational a, b
* CircleRotation  -- x -> x + angle mod 1
* PerturbedToral  -- toral automorphism plus a small trigonometric
                     perturbation; the Jacobian determinant is checked to
                     stay away from zero on a sampled grid at construction.

Points are numpy arrays (scalar arrays for the one-dimensional spaces).
Torus points live in [0, 1)^d with the flat metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple, Union

import numpy as np

from ..subres.spaces import as_fraction


class DomainError(ValueError):
    """A point fed to an interval map lies outside [0, 1]."""


def _int_det(matrix: Tuple[Tuple[int, ...], ...]) -> int:
    """Exact integer determinant by cofactor expansion (desk-scale sizes)."""
    n = len(matrix)
    if n == 1:
        return matrix[0][0]
    total = 0
    rest = matrix[1:]
    for j in range(n):
        minor = tuple(tuple(row[k] for k in range(n) if k != j) for row in rest)
        term = matrix[0][j] * _int_det(minor)
        total += term if j % 2 == 0 else -term
    return total


@dataclass(frozen=True)
class ToralAuto:
    matrix: Tuple[Tuple[int, ...], ...]

    def __post_init__(self) -> None:
        m = tuple(tuple(int(v) for v in row) for row in self.matrix)
        object.__setattr__(self, "matrix", m)
        n = len(m)
        if any(len(row) != n for row in m):
            raise ValueError("matrix must be square")
        if abs(_int_det(m)) != 1:
            raise ValueError("toral automorphism needs an integer matrix with |det| = 1")

    @property
    def dim(self) -> int:
        return len(self.matrix)

    @property
    def space(self) -> str:
        return f"torus-{self.dim}"

    @property
    def is_linear(self) -> bool:
        return True

    def apply(self, q: np.ndarray) -> np.ndarray:
        m = np.asarray(self.matrix, dtype=float)
        return np.mod(m @ np.asarray(q, dtype=float), 1.0)

    def apply_many(self, pts: np.ndarray) -> np.ndarray:
        m = np.asarray(self.matrix, dtype=float)
        return np.mod(pts @ m.T, 1.0)

    def jacobian(self, q: np.ndarray) -> np.ndarray:
        return np.asarray(self.matrix, dtype=float)


@dataclass(frozen=True)
class AffineInterval:
    a: Fraction
    b: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", as_fraction(self.a))
        object.__setattr__(self, "b", as_fraction(self.b))

    @property
    def dim(self) -> int:
        return 1

    @property
    def space(self) -> str:
        return "interval"

    @property
    def is_linear(self) -> bool:
        return True

    @property
    def maps_unit_interval_into_itself(self) -> bool:
        lo = min(self.b, self.a + self.b)
        hi = max(self.b, self.a + self.b)
        return lo >= 0 and hi <= 1

    def apply(self, q) -> np.ndarray:
        x = float(np.asarray(q).reshape(()))
        if not -1e-12 <= x <= 1 + 1e-12:
            raise DomainError(f"point {x} outside [0, 1]")
        return np.asarray(float(self.a) * x + float(self.b))

    def apply_many(self, pts: np.ndarray) -> np.ndarray:
        # walk driver guarantees closure of [0,1] at WalkMeasure construction
        return float(self.a) * pts + float(self.b)

    def jacobian(self, q) -> np.ndarray:
        return np.array([[float(self.a)]])


@dataclass(frozen=True)
class CircleRotation:
    angle: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "angle", float(self.angle) % 1.0)

    @property
    def dim(self) -> int:
        return 1

    @property
    def space(self) -> str:
        return "circle"

    @property
    def is_linear(self) -> bool:
        return True

    def apply(self, q) -> np.ndarray:
        return np.asarray((float(np.asarray(q).reshape(())) + self.angle) % 1.0)

    def apply_many(self, pts: np.ndarray) -> np.ndarray:
        return np.mod(pts + self.angle, 1.0)

    def jacobian(self, q) -> np.ndarray:
        return np.array([[1.0]])


@dataclass(frozen=True)
class TrigTerm:
    """One perturbation term: amp * sin(2 pi freq.q + phase) on coordinate `coord`."""

    coord: int
    freq: Tuple[int, ...]
    amp: float
    phase: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "freq", tuple(int(k) for k in self.freq))
        object.__setattr__(self, "amp", float(self.amp))
        object.__setattr__(self, "phase", float(self.phase))


@dataclass(frozen=True)
class PerturbedToral:
    matrix: Tuple[Tuple[int, ...], ...]
    epsilon: float
    terms: Tuple[TrigTerm, ...]

    def __post_init__(self) -> None:
        m = tuple(tuple(int(v) for v in row) for row in self.matrix)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "epsilon", float(self.epsilon))
        object.__setattr__(self, "terms", tuple(self.terms))
        if abs(_int_det(m)) != 1:
            raise ValueError("linear part needs |det| = 1")
        for t in self.terms:
            if not 0 <= t.coord < self.dim or len(t.freq) != self.dim:
                raise ValueError("perturbation term indices do not match dimension")
        self._check_jacobian_grid()

    def _check_jacobian_grid(self, per_axis: int = 33) -> None:
        """Reject amplitudes large enough to let det D f vanish (sampled grid)."""
        axes = [np.linspace(0.0, 1.0, per_axis, endpoint=False)] * self.dim
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.dim)
        dets = np.array([np.linalg.det(self.jacobian(q)) for q in grid])
        if np.min(np.abs(dets)) < 1e-9 or np.min(dets) * np.max(dets) <= 0:
            raise ValueError(
                "perturbation too large: Jacobian determinant changes sign or "
                "vanishes on the sampled grid"
            )

    @property
    def dim(self) -> int:
        return len(self.matrix)

    @property
    def space(self) -> str:
        return f"torus-{self.dim}"

    @property
    def is_linear(self) -> bool:
        return self.epsilon == 0.0 or not self.terms

    def _perturbation(self, q: np.ndarray) -> np.ndarray:
        out = np.zeros(self.dim)
        for t in self.terms:
            out[t.coord] += t.amp * math.sin(
                2.0 * math.pi * float(np.dot(t.freq, q)) + t.phase
            )
        return out

    def apply(self, q: np.ndarray) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        m = np.asarray(self.matrix, dtype=float)
        return np.mod(m @ q + self.epsilon * self._perturbation(q), 1.0)

    def apply_many(self, pts: np.ndarray) -> np.ndarray:
        m = np.asarray(self.matrix, dtype=float)
        out = pts @ m.T
        for t in self.terms:
            phase = 2.0 * np.pi * (pts @ np.asarray(t.freq, dtype=float)) + t.phase
            out[:, t.coord] += self.epsilon * t.amp * np.sin(phase)
        return np.mod(out, 1.0)

    def jacobian(self, q: np.ndarray) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        jac = np.asarray(self.matrix, dtype=float).copy()
        for t in self.terms:
            c = (
                self.epsilon
                * t.amp
                * 2.0
                * math.pi
                * math.cos(2.0 * math.pi * float(np.dot(t.freq, q)) + t.phase)
            )
            for j in range(self.dim):
                jac[t.coord, j] += c * t.freq[j]
        return jac


SystemSpec = Union[ToralAuto, AffineInterval, CircleRotation, PerturbedToral]


def torus_distance(x: np.ndarray, y: np.ndarray) -> float:
    """Flat-torus distance: Euclidean norm of the coordinatewise nearest lift."""
    diff = np.mod(np.asarray(x, dtype=float) - np.asarray(y, dtype=float) + 0.5, 1.0) - 0.5
    return float(np.linalg.norm(diff))


def point_distance(space: str, x, y) -> float:
    if space == "interval":
        return abs(float(np.asarray(x).reshape(())) - float(np.asarray(y).reshape(())))
    return torus_distance(np.atleast_1d(x), np.atleast_1d(y))


# ---------------------------------------------------------------------------
# JSON forms


def system_to_json(system: SystemSpec) -> dict:
    if isinstance(system, ToralAuto):
        return {"kind": "toral", "matrix": [list(row) for row in system.matrix]}
    if isinstance(system, AffineInterval):
        return {"kind": "affine", "a": str(system.a), "b": str(system.b)}
    if isinstance(system, CircleRotation):
        return {"kind": "rotation", "angle": system.angle}
    if isinstance(system, PerturbedToral):
        return {
            "kind": "perturbed_toral",
            "matrix": [list(row) for row in system.matrix],
            "epsilon": system.epsilon,
            "terms": [
                {"coord": t.coord, "freq": list(t.freq), "amp": t.amp, "phase": t.phase}
                for t in system.terms
            ],
        }
    raise TypeError(f"unknown system {type(system).__name__}")


def system_from_json(doc: dict) -> SystemSpec:
    kind = doc.get("kind")
    if kind == "toral":
        return ToralAuto(tuple(tuple(row) for row in doc["matrix"]))
    if kind == "affine":
        return AffineInterval(Fraction(str(doc["a"])), Fraction(str(doc["b"])))
    if kind == "rotation":
        angle = doc["angle"]
        angle = float(Fraction(angle)) if isinstance(angle, str) else float(angle)
        return CircleRotation(angle)
    if kind == "perturbed_toral":
        terms = tuple(
            TrigTerm(t["coord"], tuple(t["freq"]), t["amp"], t.get("phase", 0.0))
            for t in doc.get("terms", [])
        )
        return PerturbedToral(
            tuple(tuple(row) for row in doc["matrix"]), doc.get("epsilon", 0.0), terms
        )
    raise ValueError(f"unknown system kind {kind!r}")
