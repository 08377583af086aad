"""Batch experiment driver.

One experiment per invocation: parse a JSON config, validate it against the
kind's schema, compute, then write artifacts (CSV/JSON plus a
`<out>.meta.json` sidecar with the config hash, tool version, and wall time).
Nothing is written before computation finishes, so a failed run leaves no
partial outputs.

Exit codes: 0 success; 2 config/schema error (with a line/field diagnostic);
3 budget exceeded; 1 numeric or module failure (the error class is printed).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import jsonschema
import numpy as np
import pandas as pd

from . import __version__
from .dynamics.lyapunov import lyapunov_qr
from .entropy import (
    SpectrumSummary,
    ly_bounds,
    pesin_sum,
    shannon_entropy,
    stiffness_chain,
)
from .expansion import (
    DEFAULT_WORD_BUDGET,
    BudgetExceeded,
    PlaneSpec,
    angular_grid,
    line_in_full_pairs,
    random_plane_grid,
    uniform_expansion_scan,
    uniform_gaps_scan,
)
from .fixtures import FIXTURES
from .subres import (
    compose,
    invert,
    linearize,
    map_from_json,
    map_to_json,
    mono_str,
    validate,
)
from .walk import (
    EmpiricalMeasure,
    SizeBudgetExceeded,
    WalkMeasure,
    box_dimension,
    generator_image_information,
    residual_report,
    walk_from_json,
    empirical_measure,
)


class ConfigError(ValueError):
    """Config is syntactically valid JSON but semantically unusable."""


# ---------------------------------------------------------------------------
# schemas

_RATIONAL = {"type": ["string", "integer"]}

_MAP = {
    "type": "object",
    "required": ["weights", "coeffs"],
    "properties": {
        "weights": {"type": "array", "minItems": 1},
        "coeffs": {"type": "array"},
    },
}

_SYSTEM = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["toral", "affine", "rotation", "perturbed_toral"]}
    },
}

_WALK = {
    "type": "object",
    "required": ["atoms"],
    "properties": {
        "atoms": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["system", "p"],
                "properties": {"system": _SYSTEM, "p": _RATIONAL},
            },
        }
    },
}

_BUDGETS = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "words": {"type": "integer", "minimum": 1},
        "samples": {"type": "integer", "minimum": 1},
        "time_s": {"type": "number", "exclusiveMinimum": 0},
    },
}

_PLANE = {
    "type": "object",
    "required": ["base", "vectors"],
    "properties": {
        "base": {"type": "array"},
        "vectors": {"type": "array", "minItems": 1},
        "label": {"type": "string"},
    },
}

_GRID = {
    "type": "object",
    "required": ["type"],
    "properties": {
        "type": {"enum": ["angular", "random", "explicit"]},
        "count": {"type": "integer", "minimum": 1},
        "dim": {"type": "integer", "minimum": 2},
        "d": {"type": "integer", "minimum": 1},
        "planes": {"type": "array", "items": _PLANE, "minItems": 1},
    },
}

_PAIRS = {
    "type": "object",
    "required": ["type"],
    "properties": {
        "type": {"enum": ["line-in-full", "explicit"]},
        "count": {"type": "integer", "minimum": 1},
        "pairs": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "array", "items": _PLANE, "minItems": 2, "maxItems": 2},
        },
    },
}

_SPECTRUM = {
    "type": "object",
    "required": ["exponents", "multiplicities"],
    "properties": {
        "exponents": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        "multiplicities": {
            "type": "array",
            "items": {"type": "integer", "minimum": 1},
            "minItems": 1,
        },
        "dims_e1": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "dims_e2": {"type": "array", "items": {"type": "integer", "minimum": 0}},
    },
}

SCHEMAS: Dict[str, dict] = {
    "subres": {
        "type": "object",
        "additionalProperties": False,
        "required": ["kind", "op", "map"],
        "properties": {
            "kind": {"const": "subres"},
            "op": {"enum": ["check", "compose", "invert", "linearize"]},
            "map": _MAP,
            "map2": _MAP,
            "include_constant": {"type": ["boolean", "null"]},
            "out": {"type": "string"},
            "budgets": _BUDGETS,
        },
    },
    "lyapunov": {
        "type": "object",
        "additionalProperties": False,
        "required": ["kind", "walk", "q0", "n"],
        "properties": {
            "kind": {"const": "lyapunov"},
            "walk": _WALK,
            "q0": {"type": "array", "items": {"type": "number"}, "minItems": 1},
            "n": {"type": "integer", "minimum": 1},
            "seed": {"type": "integer"},
            "seeds": {"type": "array", "items": {"type": "integer"}, "minItems": 1},
            "burn_in": {"type": ["integer", "null"], "minimum": 0},
            "out": {"type": "string"},
            "budgets": _BUDGETS,
        },
    },
    "expansion": {
        "type": "object",
        "additionalProperties": False,
        "required": ["kind", "op", "walk", "n_steps"],
        "properties": {
            "kind": {"const": "expansion"},
            "op": {"enum": ["scan", "gaps"]},
            "walk": _WALK,
            "n_steps": {"type": "integer", "minimum": 1},
            "grid": _GRID,
            "pairs": _PAIRS,
            "delta": {"enum": [1, -1]},
            "mode": {"enum": ["exact", "mc"]},
            "samples": {"type": "integer", "minimum": 1},
            "margin": {"type": "number"},
            "seed": {"type": "integer"},
            "out": {"type": "string"},
            "budgets": _BUDGETS,
        },
    },
    "walk": {
        "type": "object",
        "additionalProperties": False,
        "required": ["kind", "op"],
        "properties": {
            "kind": {"const": "walk"},
            "op": {"enum": ["simulate", "residuals", "dimension"]},
            "walk": _WALK,
            "q0": {"type": ["number", "array"]},
            "n": {"type": "integer", "minimum": 1},
            "paths": {"type": "integer", "minimum": 1},
            "burn_in": {"type": "integer", "minimum": 0},
            "seed": {"type": "integer"},
            "measure": {"type": "string"},
            "space": {"enum": ["interval", "circle"]},
            "k_max": {"type": "integer", "minimum": 1},
            "bins": {"type": "integer", "minimum": 2},
            "scales": {
                "type": "array",
                "items": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "minItems": 3,
            },
            "out": {"type": "string"},
            "budgets": _BUDGETS,
        },
    },
    "entropy": {
        "type": "object",
        "additionalProperties": False,
        "required": ["kind", "op", "spectrum"],
        "properties": {
            "kind": {"const": "entropy"},
            "op": {"enum": ["bounds", "stiffness"]},
            "spectrum": _SPECTRUM,
            "H_mu": {"type": "number", "minimum": 0},
            "h_rel": {"type": "number", "minimum": 0},
            "probs": {"type": "array", "items": _RATIONAL, "minItems": 1},
            "dims": {"type": "array", "items": {"type": "integer", "minimum": 0}},
            "out": {"type": "string"},
            "budgets": _BUDGETS,
        },
    },
}


def validate_config(cfg: dict) -> None:
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    kind = cfg.get("kind")
    if kind not in SCHEMAS:
        raise ConfigError(
            f"kind must be one of {sorted(SCHEMAS)}, got {kind!r}"
        )
    jsonschema.validate(cfg, SCHEMAS[kind], cls=jsonschema.Draft202012Validator)


# ---------------------------------------------------------------------------
# small helpers

def _float_str(x) -> str:
    return repr(float(x))


def _csv(header: str, rows: List[str]) -> str:
    return "\n".join([header] + rows) + "\n"


def _kv_csv(pairs: List[Tuple[str, object]]) -> str:
    rows = []
    for k, v in pairs:
        if isinstance(v, bool):
            v = int(v)
        if isinstance(v, float):
            v = _float_str(v)
        rows.append(f"{k},{v}")
    return _csv("statistic,value", rows)


def _require(cfg: dict, field: str, op: str):
    if field not in cfg or cfg[field] is None:
        raise ConfigError(f"'{field}' is required for op {op!r}")
    return cfg[field]


class RunResult:
    """Everything a run produced, collected before any file is touched."""

    def __init__(self) -> None:
        self.stdout: List[str] = []
        self.files: List[Tuple[str, str]] = []  # (path, text)
        self.summary: dict = {}

    def say(self, line: str) -> None:
        self.stdout.append(line)


def _measure_csv(nu: EmpiricalMeasure) -> str:
    """Measure payload with shortest round-trip float formatting.

    repr via map/join runs at C speed, which matters for multi-million-row
    measures; pandas' writer is several times slower here.
    """
    if nu.points.ndim == 1:
        header = "x,weight\n"
        if np.all(nu.weights == nu.weights[0]):
            # simulate output: one shared weight, formatted once
            sep = "," + repr(float(nu.weights[0])) + "\n"
            return header + sep.join(map(repr, nu.points.tolist())) + sep
        cols = [nu.points, nu.weights]
    else:
        header = ",".join(f"x{i}" for i in range(nu.points.shape[1])) + ",weight\n"
        cols = [nu.points[:, i] for i in range(nu.points.shape[1])]
        cols.append(nu.weights)
    text_cols = [list(map(repr, c.tolist())) for c in cols]
    return header + "\n".join(",".join(t) for t in zip(*text_cols)) + "\n"


def _load_measure(path: str, space: str) -> EmpiricalMeasure:
    frame = pd.read_csv(path, float_precision="round_trip")
    if "weight" not in frame.columns:
        raise ConfigError(f"measure file {path!r} has no 'weight' column")
    coord_cols = [c for c in frame.columns if c != "weight"]
    if not coord_cols:
        raise ConfigError(f"measure file {path!r} has no coordinate columns")
    pts = frame[coord_cols].to_numpy(dtype=float)
    if pts.shape[1] == 1:
        pts = pts.reshape(-1)
    return EmpiricalMeasure(pts, frame["weight"].to_numpy(dtype=float), space)


def _budget_words(cfg: dict, args) -> int:
    if getattr(args, "budget_words", None):
        return args.budget_words
    return cfg.get("budgets", {}).get("words", DEFAULT_WORD_BUDGET)


def _budget_samples(cfg: dict, args) -> Optional[int]:
    if getattr(args, "budget_samples", None):
        return args.budget_samples
    return cfg.get("budgets", {}).get("samples")


# ---------------------------------------------------------------------------
# executors (pure compute; they fill a RunResult and never write)

def run_subres(cfg: dict, args) -> RunResult:
    res = RunResult()
    op = cfg["op"]
    try:
        pmap = map_from_json(cfg["map"])
    except (ValueError, KeyError, TypeError) as e:
        raise ConfigError(f"bad 'map': {e}") from e
    if op == "check":
        f = validate(pmap)
        res.say(f"validated, strict={str(f.strict).lower()}")
        payload = json.dumps(
            {"valid": True, "strict": f.strict}, indent=2, sort_keys=True
        ) + "\n"
        res.summary = {"valid": True, "strict": f.strict}
    elif op == "compose":
        if "map2" not in cfg:
            raise ConfigError("'map2' is required for op 'compose'")
        try:
            g = map_from_json(cfg["map2"])
        except (ValueError, KeyError, TypeError) as e:
            raise ConfigError(f"bad 'map2': {e}") from e
        h = compose(validate(pmap), validate(g))
        res.say(f"composed map on {h.space.dim} coordinates")
        payload = json.dumps(map_to_json(h), indent=2, sort_keys=True) + "\n"
        res.summary = {"strict": h.strict}
    elif op == "invert":
        h = invert(validate(pmap))
        res.say(f"inverted map on {h.space.dim} coordinates")
        payload = json.dumps(map_to_json(h), indent=2, sort_keys=True) + "\n"
        res.summary = {"strict": h.strict}
    else:  # linearize
        f = validate(pmap)
        lin = linearize(f, include_constant=cfg.get("include_constant"))
        basis = [mono_str(m) for m in lin.basis]
        rows = [[str(c) for c in row] for row in lin.rows]
        res.say(f"linearized on basis ({', '.join(basis)})")
        for row in rows:
            res.say("  [" + ", ".join(row) + "]")
        payload = json.dumps(
            {
                "basis": basis,
                "include_constant": lin.include_constant,
                "rows": rows,
            },
            indent=2,
            sort_keys=True,
        ) + "\n"
        res.summary = {"basis_size": len(basis)}
    if cfg.get("out"):
        res.files.append((cfg["out"], payload))
    return res


def run_lyapunov(cfg: dict, args) -> RunResult:
    res = RunResult()
    mu = walk_from_json(cfg["walk"])
    seeds = cfg.get("seeds")
    if getattr(args, "seed", None) is not None:
        seeds = [args.seed]
    elif seeds is None:
        if cfg.get("seed") is None:
            raise ConfigError("'seed' or 'seeds' is required for kind 'lyapunov'")
        seeds = [cfg["seed"]]
    n = args.n if getattr(args, "n", None) else cfg["n"]
    q0 = np.asarray(cfg["q0"], dtype=float)
    rows = []
    reports = []
    for s in seeds:
        rep = lyapunov_qr(mu, q0, n, seed=s, burn_in=cfg.get("burn_in"))
        reports.append(rep)
        cells = [str(s), str(n)]
        cells += [_float_str(x) for x in rep.exponents]
        cells.append(_float_str(rep.residual))
        rows.append(",".join(cells))
    d = len(reports[0].exponents)
    header = "seed,n," + ",".join(f"lambda_{i+1}" for i in range(d)) + ",residual"
    res.say(
        "lambda_1 = "
        + _float_str(reports[0].exponents[0])
        + f"  (residual {_float_str(reports[0].residual)})"
    )
    res.summary = {
        "exponents": [float(x) for x in reports[0].exponents],
        "residual": float(reports[0].residual),
    }
    if cfg.get("out"):
        res.files.append((cfg["out"], _csv(header, rows)))
    return res


def _planes_from_grid(cfg: dict, mu: WalkMeasure, args) -> List[PlaneSpec]:
    grid = _require(cfg, "grid", "scan")
    gtype = grid["type"]
    if gtype == "angular":
        return angular_grid(_require(grid, "count", "angular grid"))
    if gtype == "random":
        if cfg.get("seed") is None and getattr(args, "seed", None) is None:
            raise ConfigError("'seed' is required for a random plane grid")
        seed = args.seed if getattr(args, "seed", None) is not None else cfg["seed"]
        count = _require(grid, "count", "random grid")
        dim = grid.get("dim", mu.dim)
        return random_plane_grid(dim, grid.get("d", 1), count, seed)
    planes = _require(grid, "planes", "explicit grid")
    return [_plane_from_json(p) for p in planes]


def _plane_from_json(doc: dict) -> PlaneSpec:
    try:
        return PlaneSpec(
            tuple(float(x) for x in doc["base"]),
            tuple(tuple(float(x) for x in v) for v in doc["vectors"]),
            label=doc.get("label", ""),
        )
    except ValueError as e:
        raise ConfigError(f"bad plane: {e}") from e


def run_expansion(cfg: dict, args) -> RunResult:
    res = RunResult()
    mu = walk_from_json(cfg["walk"])
    op = cfg["op"]
    mode = cfg.get("mode", "exact")
    samples = cfg.get("samples", 4096)
    cap = _budget_samples(cfg, args)
    if cap is not None and mode == "mc" and samples > cap:
        raise BudgetExceeded(f"{samples} samples exceed budget {cap}")
    seed = args.seed if getattr(args, "seed", None) is not None else cfg.get("seed")
    if mode == "mc" and seed is None:
        raise ConfigError("'seed' is required for mc mode")
    budget = _budget_words(cfg, args)
    margin = cfg.get("margin", 0.0)
    n_steps = cfg["n_steps"]
    if op == "scan":
        planes = _planes_from_grid(cfg, mu, args)
        report = uniform_expansion_scan(
            mu, n_steps, planes, mode=mode, samples=samples, seed=seed,
            margin=margin, budget=budget,
        )
        header = "plane,label,sigma,stderr"
    else:
        pairs_cfg = _require(cfg, "pairs", "gaps")
        if pairs_cfg["type"] == "line-in-full":
            pairs = line_in_full_pairs(_require(pairs_cfg, "count", "line-in-full"))
        else:
            pairs = [
                (_plane_from_json(a), _plane_from_json(b))
                for a, b in _require(pairs_cfg, "pairs", "explicit pairs")
            ]
        report = uniform_gaps_scan(
            mu, n_steps, pairs, delta=cfg.get("delta", 1), mode=mode,
            samples=samples, seed=seed, margin=margin, budget=budget,
        )
        header = "pair,label,gap,stderr"
    rows = [
        f"{pid},{label},{_float_str(v)},{_float_str(e)}"
        for pid, label, v, e in report.rows
    ]
    res.say(
        f"min {'gap' if op == 'gaps' else 'sigma'} = {_float_str(report.min_value)}"
        f" at {report.argmin}; certified={report.certified}"
        f" rigorous={report.rigorous}"
    )
    res.summary = {
        "min_value": float(report.min_value),
        "argmin": report.argmin,
        "certified": report.certified,
        "rigorous": report.rigorous,
        "mode": report.mode,
        "n_steps": report.n_steps,
    }
    if op == "gaps":
        res.summary["delta"] = report.delta
    if cfg.get("out"):
        res.files.append((cfg["out"], _csv(header, rows)))
    return res


def run_walk(cfg: dict, args) -> RunResult:
    res = RunResult()
    op = cfg["op"]
    if op == "simulate":
        mu = walk_from_json(_require(cfg, "walk", op))
        seed = args.seed if getattr(args, "seed", None) is not None else cfg.get("seed")
        if seed is None:
            raise ConfigError("'seed' is required for op 'simulate'")
        n = args.n if getattr(args, "n", None) else _require(cfg, "n", op)
        paths = args.m if getattr(args, "m", None) else cfg.get("paths", 1)
        nu = empirical_measure(
            mu, _require(cfg, "q0", op), n, n_paths=paths, seed=seed,
            burn_in=cfg.get("burn_in", 0),
        )
        res.say(f"simulated {nu.n_points} weighted samples on {nu.space}")
        res.summary = {"n_points": nu.n_points, "space": nu.space}
        if cfg.get("out"):
            res.files.append((cfg["out"], _measure_csv(nu)))
        return res
    measure_path = (
        args.measure if getattr(args, "measure", None) else cfg.get("measure")
    )
    if not measure_path:
        raise ConfigError(f"'measure' is required for op {op!r}")
    if op == "residuals":
        mu = walk_from_json(_require(cfg, "walk", op))
        nu = _load_measure(measure_path, cfg.get("space", mu.space))
        report = residual_report(mu, nu, k_max=cfg.get("k_max", 20))
        pairs: List[Tuple[str, object]] = [("stationarity", report.stationarity)]
        pairs += [
            (f"invariance_{i}", v) for i, v in enumerate(report.invariance)
        ]
        if cfg.get("bins"):
            mi = generator_image_information(mu, nu, bins=cfg["bins"])
            pairs.append(("generator_image_information", mi))
        pairs.append(("metric", report.metric))
        res.say(
            f"stationarity {_float_str(report.stationarity)}, max invariance "
            f"{_float_str(report.max_invariance)} ({report.metric})"
        )
        res.summary = {
            "stationarity": report.stationarity,
            "invariance": list(report.invariance),
            "metric": report.metric,
        }
        if cfg.get("out"):
            res.files.append((cfg["out"], _kv_csv(pairs)))
        return res
    # dimension
    scales = _require(cfg, "scales", op)
    nu = _load_measure(measure_path, cfg.get("space", "interval"))
    report = box_dimension(nu, scales)
    rows = [
        f"{_float_str(s)},{c}" for s, c in zip(report.scales, report.counts)
    ]
    res.say(f"box-dimension slope = {_float_str(report.slope)}")
    res.summary = {"slope": report.slope, "counts": list(report.counts)}
    if cfg.get("out"):
        res.files.append((cfg["out"], _csv("scale,boxes", rows)))
    return res


def run_entropy(cfg: dict, args) -> RunResult:
    res = RunResult()
    spec_doc = cfg["spectrum"]
    spec = SpectrumSummary(
        tuple(spec_doc["exponents"]),
        tuple(spec_doc["multiplicities"]),
        dims_e1=tuple(spec_doc["dims_e1"]) if spec_doc.get("dims_e1") else None,
        dims_e2=tuple(spec_doc["dims_e2"]) if spec_doc.get("dims_e2") else None,
    )
    if cfg["op"] == "bounds":
        pairs: List[Tuple[str, object]] = [("pesin", pesin_sum(spec))]
        if spec.dims_e1 is not None and spec.dims_e2 is not None:
            lower, upper = ly_bounds(spec)
            pairs += [("lower", lower), ("upper", upper)]
            res.say(
                f"pesin {_float_str(pesin_sum(spec))}, sandwich "
                f"[{_float_str(lower)}, {_float_str(upper)}]"
            )
        else:
            res.say(f"pesin {_float_str(pesin_sum(spec))}")
        res.summary = {k: float(v) for k, v in pairs}
        if cfg.get("out"):
            res.files.append((cfg["out"], _kv_csv(pairs)))
        return res
    # stiffness
    if cfg.get("H_mu") is not None:
        H_mu = float(cfg["H_mu"])
    elif cfg.get("probs"):
        probs = [Fraction(str(p)) for p in cfg["probs"]]
        if sum(probs) != 1 or any(p <= 0 for p in probs):
            raise ConfigError("'probs' must be positive rationals summing to 1")

        class _P:
            def __init__(self, ps):
                self.probs = ps

        H_mu = shannon_entropy(_P(probs))
    else:
        raise ConfigError("'H_mu' or 'probs' is required for op 'stiffness'")
    verdict = stiffness_chain(
        H_mu,
        spec,
        dims=cfg.get("dims"),
        h_rel=cfg.get("h_rel"),
    )
    pairs = [
        ("signed_sum", verdict.signed_sum),
        ("consistent", verdict.consistent),
        ("forced_equality", verdict.forced_equality),
    ]
    pairs += [(f"slack_{q.name}", q.slack) for q in verdict.inequalities]
    res.say(f"{verdict.verdict} (signed sum {_float_str(verdict.signed_sum)})")
    res.summary = {
        "verdict": verdict.verdict,
        "signed_sum": verdict.signed_sum,
        "forced_equality": verdict.forced_equality,
    }
    if cfg.get("out"):
        res.files.append((cfg["out"], _kv_csv(pairs)))
    return res


RUNNERS = {
    "subres": run_subres,
    "lyapunov": run_lyapunov,
    "expansion": run_expansion,
    "walk": run_walk,
    "entropy": run_entropy,
}


# ---------------------------------------------------------------------------
# plumbing

def _load_config(path: str) -> Tuple[dict, bytes]:
    with open(path, "rb") as fh:
        raw = fh.read()
    return json.loads(raw.decode("utf-8")), raw


def _emit(res: RunResult, cfg: dict, raw: Optional[bytes], wall: float) -> None:
    for line in res.stdout:
        print(line)
    out_paths = []
    for path, text in res.files:
        with open(path, "w") as fh:
            fh.write(text)
        out_paths.append(path)
    for path in out_paths:
        meta = {
            "config_sha256": hashlib.sha256(raw).hexdigest() if raw else None,
            "version": __version__,
            "wall_time_s": wall,
            "kind": cfg.get("kind"),
            "op": cfg.get("op"),
            "result": res.summary,
        }
        with open(path + ".meta.json", "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _execute(cfg: dict, raw: Optional[bytes], args) -> int:
    validate_config(cfg)
    start = time.perf_counter()
    res = RUNNERS[cfg["kind"]](cfg, args)
    wall = time.perf_counter() - start
    _emit(res, cfg, raw, wall)
    return 0


def _cmd_fixtures(args) -> int:
    if args.dump:
        os.makedirs(args.dump, exist_ok=True)
        for name, entry in FIXTURES.items():
            path = os.path.join(args.dump, f"{name}.json")
            with open(path, "w") as fh:
                json.dump(entry["config"], fh, indent=2, sort_keys=True)
                fh.write("\n")
            print(f"wrote {path}")
        return 0
    for name, entry in FIXTURES.items():
        print(f"{name}: {entry['description']}")
        print(f"    targets: {entry['targets']}")
    print(f"{len(FIXTURES)} fixtures")
    return 0


def _add_common(sp: argparse.ArgumentParser, config_required: bool = True) -> None:
    sp.add_argument("--config", required=config_required, help="JSON config path")
    sp.add_argument("--seed", type=int, help="override the config seed")
    sp.add_argument("--out", help="override the config output path")
    sp.add_argument("--budget-words", type=int, dest="budget_words")
    sp.add_argument("--budget-samples", type=int, dest="budget_samples")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="rigidlab",
        description="numerical and exact-algebraic experiments for "
        "polynomial normal forms, Lyapunov spectra, expansion certificates, "
        "random-walk measures, and entropy bookkeeping",
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run any experiment config")
    _add_common(run_p)

    subres_p = sub.add_parser("subres", help="exact polynomial-map algebra")
    ssub = subres_p.add_subparsers(dest="op", required=True)
    for op in ("check", "compose", "invert", "linearize"):
        _add_common(ssub.add_parser(op))

    lyap_p = sub.add_parser("lyapunov", help="QR exponent estimation")
    _add_common(lyap_p)
    lyap_p.add_argument("--n", type=int, help="override the horizon")

    exp_p = sub.add_parser("expansion", help="word-average expansion scans")
    esub = exp_p.add_subparsers(dest="op", required=True)
    for op in ("scan", "gaps"):
        _add_common(esub.add_parser(op))

    walk_p = sub.add_parser("walk", help="random-walk empirical measures")
    wsub = walk_p.add_subparsers(dest="op", required=True)
    sim = wsub.add_parser("simulate")
    _add_common(sim)
    sim.add_argument("--N", type=int, dest="n", help="override the horizon")
    sim.add_argument("--M", type=int, dest="m", help="override the path count")
    for op in ("residuals", "dimension"):
        sp = wsub.add_parser(op)
        _add_common(sp)
        sp.add_argument("--measure", help="measure CSV produced by simulate")

    ent_p = sub.add_parser("entropy", help="entropy calculators")
    entsub = ent_p.add_subparsers(dest="op", required=True)
    for op in ("bounds", "stiffness"):
        sp = entsub.add_parser(op)
        _add_common(sp, config_required=False)
        sp.add_argument("--spectrum", help="bare SpectrumSummary JSON path")

    fix_p = sub.add_parser("fixtures", help="list built-in fixture configs")
    fix_p.add_argument("--dump", help="write fixture configs into a directory")
    return p


def _dispatch(args) -> int:
    if args.command == "fixtures":
        return _cmd_fixtures(args)
    if args.command == "entropy" and not args.config:
        if not args.spectrum:
            raise ConfigError("provide --config or --spectrum")
        with open(args.spectrum, "rb") as fh:
            raw = fh.read()
        cfg = {"kind": "entropy", "op": args.op, "spectrum": json.loads(raw)}
        if args.out:
            cfg["out"] = args.out
        return _execute(cfg, raw, args)
    cfg, raw = _load_config(args.config)
    command = getattr(args, "command", None)
    if command != "run":
        if cfg.get("kind") is None:
            cfg["kind"] = command
        elif cfg["kind"] != command:
            raise ConfigError(
                f"config kind {cfg['kind']!r} does not match subcommand {command!r}"
            )
        if getattr(args, "op", None):
            cfg["op"] = args.op
    if getattr(args, "out", None):
        cfg["out"] = args.out
    return _execute(cfg, raw, args)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except json.JSONDecodeError as e:
        print(
            f"config error: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}",
            file=sys.stderr,
        )
        return 2
    except jsonschema.ValidationError as e:
        path = getattr(e, "json_path", None) or "$"
        print(f"config error at {path}: {e.message}", file=sys.stderr)
        return 2
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (BudgetExceeded, SizeBudgetExceeded) as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return 3
    except KeyboardInterrupt:
        return 130
    except Exception as e:  # numeric or module failure
        print(f"error [{type(e).__name__}]: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
