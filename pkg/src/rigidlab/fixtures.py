"""Built-in experiment fixtures with their acceptance targets.

Each fixture is a complete, schema-valid experiment config (see the cli
module) plus a human-readable target line.  They double as regression
anchors: every fixture must run inside its stated time budget and reproduce
byte-identical output for a fixed seed.
"""

from __future__ import annotations

import math
from typing import Dict

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

WORKED_MAP = {
    "weights": [["2", 1], ["1", 1]],
    "coeffs": [
        {"out": 0, "mono": {"0": 1}, "c": "3"},
        {"out": 0, "mono": {"1": 1}, "c": "1"},
        {"out": 0, "mono": {"1": 2}, "c": "2"},
        {"out": 1, "mono": {"1": 1}, "c": "2"},
    ],
}

CAT_WALK = {
    "atoms": [{"system": {"kind": "toral", "matrix": [[2, 1], [1, 1]]}, "p": "1"}]
}

CANTOR_WALK = {
    "atoms": [
        {"system": {"kind": "affine", "a": "1/3", "b": "0"}, "p": "1/2"},
        {"system": {"kind": "affine", "a": "1/3", "b": "2/3"}, "p": "1/2"},
    ]
}

GOLDEN_WALK = {
    "atoms": [{"system": {"kind": "rotation", "angle": GOLDEN}, "p": "1"}]
}

EXPANSION_WALK = {
    "atoms": [
        {"system": {"kind": "toral", "matrix": [[2, 1], [1, 1]]}, "p": "1/2"},
        {"system": {"kind": "toral", "matrix": [[1, 1], [1, 2]]}, "p": "1/2"},
    ]
}

FIXTURES: Dict[str, dict] = {
    "cat_lyapunov": {
        "description": "QR exponents of the hyperbolic automorphism [[2,1],[1,1]]",
        "targets": "lambda_1 within 1e-3 of log((3+sqrt5)/2)=0.962424; "
        "|lambda_1+lambda_2| <= 1e-9; under 1 s",
        "config": {
            "kind": "lyapunov",
            "walk": CAT_WALK,
            "q0": [0.1234, 0.5678],
            "n": 10000,
            "seeds": [7],
            "out": "cat_lyapunov.csv",
        },
    },
    "cantor_walk": {
        "description": "middle-thirds IFS {x/3, (x+2)/3} with equal weights",
        "targets": "stationarity residual < 0.02; invariance residual of x/3 "
        "in [0.4, 0.55]; box dimension within 0.05 of log2/log3=0.6309; "
        "under 10 s",
        "config": {
            "kind": "walk",
            "op": "simulate",
            "walk": CANTOR_WALK,
            # start off the attractor and drop a short transient so every
            # retained atom is a generic point of the limit set; exact
            # low-depth boundary atoms (e.g. from q0=0) bin unreliably
            "q0": 0.5,
            "n": 100000,
            "paths": 64,
            "burn_in": 64,
            "seed": 7,
            "out": "cantor_measure.csv",
        },
    },
    "golden_rotation": {
        "description": "circle rotation by the golden mean, single path",
        "targets": "Weyl coefficients |c_k| < 0.01 for k = 1..10 at N = 1e5",
        "config": {
            "kind": "walk",
            "op": "simulate",
            "walk": GOLDEN_WALK,
            "q0": 0.0,
            "n": 100000,
            "paths": 1,
            "seed": 1,
            "out": "golden_measure.csv",
        },
    },
    "expansion_pair": {
        "description": "uniform pair {[[2,1],[1,1]], [[1,1],[1,2]]}, all 2^8 words",
        "targets": "min sigma over 720 directions strictly positive "
        "(certified exact); under 5 s",
        "config": {
            "kind": "expansion",
            "op": "scan",
            "walk": EXPANSION_WALK,
            "n_steps": 8,
            "grid": {"type": "angular", "count": 720},
            "mode": "exact",
            "out": "expansion_pair.csv",
        },
    },
    "subres_check": {
        "description": "triangular polynomial map (3x+y+2y^2, 2y), weights (2,1)",
        "targets": "validates; strict=false (unit-coefficient rule fails on "
        "the diagonal)",
        "config": {
            "kind": "subres",
            "op": "check",
            "map": WORKED_MAP,
            "out": "subres_check.json",
        },
    },
    "subres_linearize": {
        "description": "linearization of the same map on the weight<=2 basis",
        "targets": "matrix [[4,0,0],[0,2,0],[2,1,3]] on basis (y^2, y, x), exact",
        "config": {
            "kind": "subres",
            "op": "linearize",
            "map": WORKED_MAP,
            "out": "subres_linearize.json",
        },
    },
}
