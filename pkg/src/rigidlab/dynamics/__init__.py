"""Dynamical systems, tangent cocycles and Lyapunov-spectrum extraction."""

from .systems import (
    AffineInterval,
    CircleRotation,
    DomainError,
    PerturbedToral,
    SystemSpec,
    ToralAuto,
    TrigTerm,
    point_distance,
    system_from_json,
    system_to_json,
    torus_distance,
)
from .lyapunov import (
    ContractionReport,
    GapTooSmall,
    LyapunovReport,
    NonInvertibleJacobian,
    OseledetsReport,
    TangentCocycle,
    contraction_check,
    draw_word,
    lyapunov_qr,
    oseledets_flag,
)

__all__ = [
    "AffineInterval",
    "CircleRotation",
    "DomainError",
    "PerturbedToral",
    "SystemSpec",
    "ToralAuto",
    "TrigTerm",
    "point_distance",
    "system_from_json",
    "system_to_json",
    "torus_distance",
    "ContractionReport",
    "GapTooSmall",
    "LyapunovReport",
    "NonInvertibleJacobian",
    "OseledetsReport",
    "TangentCocycle",
    "contraction_check",
    "draw_word",
    "lyapunov_qr",
    "oseledets_flag",
]
