"""Random-walk empirical measures and stationarity diagnostics.

The time-averaged empirical measure from a start point q is

    nu_{N,q} = (1/N) * sum_{t=0}^{N-1} mu^{*t} * delta_q,

sampled with M independent paths: every path contributes all N of its time
slices with weight 1/(N*M).  Paths draw their words from per-path Philox
streams split off the master seed, so output is independent of threading
(RIGIDLAB_THREADS caps worker threads; ordering is fixed by path index).

Residual metrics are declared, not canonical: Kolmogorov-Smirnov distance on
lifted coordinates for interval and circle measures, and the maximum
Weyl-Fourier coefficient gap over axis frequencies k*e_i, k = 1..K (default
20) for torus measures.  stationarity_residual compares mu * nu against nu;
invariance_residual compares each generator pushforward f_* nu against nu.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np

from .dynamics.systems import (
    AffineInterval,
    SystemSpec,
    system_from_json,
    system_to_json,
)
from .rng import generator, spawned_generators
from .subres.spaces import as_fraction


class SizeBudgetExceeded(RuntimeError):
    """Exact convolution would materialize more points than allowed."""


def thread_count() -> int:
    raw = os.environ.get("RIGIDLAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class WalkMeasure:
    """Finitely supported generator measure with exact rational weights."""

    atoms: Tuple[Tuple[SystemSpec, Fraction], ...]

    def __post_init__(self) -> None:
        atoms = tuple((s, as_fraction(p)) for s, p in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if not atoms:
            raise ValueError("a walk measure needs at least one atom")
        if any(p <= 0 for _, p in atoms):
            raise ValueError("atom probabilities must be positive")
        if sum(p for _, p in atoms) != 1:
            raise ValueError("atom probabilities must sum to 1 exactly")
        spaces = {s.space for s, _ in atoms}
        if len(spaces) != 1:
            raise ValueError(f"atoms live on different spaces: {sorted(spaces)}")
        for s, _ in atoms:
            if isinstance(s, AffineInterval) and not s.maps_unit_interval_into_itself:
                raise ValueError(
                    "interval atom does not map [0, 1] into itself; walk iteration "
                    "would leave the domain"
                )

    @property
    def systems(self) -> Tuple[SystemSpec, ...]:
        return tuple(s for s, _ in self.atoms)

    @property
    def probs(self) -> Tuple[Fraction, ...]:
        return tuple(p for _, p in self.atoms)

    @property
    def probs_float(self) -> Tuple[float, ...]:
        return tuple(float(p) for _, p in self.atoms)

    @property
    def space(self) -> str:
        return self.atoms[0][0].space

    @property
    def dim(self) -> int:
        return self.atoms[0][0].dim

    @property
    def is_linear(self) -> bool:
        return all(getattr(s, "is_linear", False) for s, _ in self.atoms)

    def shannon_entropy(self) -> float:
        """H(mu) = -sum p log p in nats."""
        return -sum(float(p) * math.log(float(p)) for p in self.probs)


def walk_to_json(mu: WalkMeasure) -> dict:
    return {
        "atoms": [
            {"system": system_to_json(s), "p": str(p)} for s, p in mu.atoms
        ]
    }


def walk_from_json(data: dict) -> WalkMeasure:
    atoms = tuple(
        (system_from_json(a["system"]), Fraction(str(a["p"])))
        for a in data["atoms"]
    )
    return WalkMeasure(atoms)


@dataclass
class EmpiricalMeasure:
    """Weighted point cloud; weights are positive and sum to 1 within 1e-12."""

    points: np.ndarray  # (n,) for 1-d spaces, (n, d) otherwise
    weights: np.ndarray  # (n,)
    space: str

    def __post_init__(self) -> None:
        self.points = np.asarray(self.points, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.ndim != 1 or len(self.weights) != len(self.points):
            raise ValueError("one weight per point required")
        if np.any(self.weights <= 0):
            raise ValueError("weights must be positive")
        total = float(np.sum(self.weights))
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {total}, not 1 within 1e-12")

    @property
    def n_points(self) -> int:
        return len(self.weights)

    @property
    def dim(self) -> int:
        return 1 if self.points.ndim == 1 else self.points.shape[1]

    @classmethod
    def uniform(cls, points: np.ndarray, space: str) -> "EmpiricalMeasure":
        n = len(points)
        return cls(points, np.full(n, 1.0 / n), space)

    @classmethod
    def dirac(cls, point, space: str) -> "EmpiricalMeasure":
        pts = np.asarray([point], dtype=float)
        if pts.ndim == 2 and pts.shape[1] == 1:
            pts = pts.reshape(-1)
        return cls(pts, np.ones(1), space)


def _simulate_paths(
    mu: WalkMeasure, q0: np.ndarray, n_steps: int, path_rngs, burn_in: int
) -> np.ndarray:
    """Time slices 0..n_steps-1 for a block of paths (vectorized over paths).

    Per-path generator words are drawn in one bulk call per path from its own
    stream, so the trajectory of path j depends only on (seed, j).
    """
    m = len(path_rngs)
    k = len(mu.atoms)
    probs = np.asarray(mu.probs_float)
    words = np.stack([rng.choice(k, size=n_steps, p=probs) for rng in path_rngs])
    dim = mu.dim
    systems = mu.systems
    kept = n_steps - burn_in
    if dim == 1:
        out = np.empty((kept, m))
        x = np.full(m, float(np.asarray(q0).reshape(())))
        affine = all(isinstance(s, AffineInterval) for s in systems)
        if affine:
            a = np.array([float(s.a) for s in systems])
            b = np.array([float(s.b) for s in systems])
        for t in range(n_steps):
            if t >= burn_in:
                out[t - burn_in] = x
            w = words[:, t]
            if affine:
                x = a[w] * x + b[w]
            else:
                for i, s in enumerate(systems):
                    mask = w == i
                    if np.any(mask):
                        x[mask] = s.apply_many(x[mask])
        return out.reshape(-1)
    out = np.empty((kept, m, dim))
    x = np.tile(np.asarray(q0, dtype=float).reshape(1, dim), (m, 1))
    for t in range(n_steps):
        if t >= burn_in:
            out[t - burn_in] = x
        w = words[:, t]
        for i, s in enumerate(systems):
            mask = w == i
            if np.any(mask):
                x[mask] = s.apply_many(x[mask])
    return out.reshape(-1, dim)


def empirical_measure(
    mu: WalkMeasure,
    q0,
    n_steps: int,
    n_paths: int = 1,
    seed: int = 0,
    burn_in: int = 0,
) -> EmpiricalMeasure:
    """Sample nu_{N,q}: n_paths independent paths, all time slices, equal weights."""
    if n_steps < 1 or n_paths < 1:
        raise ValueError("n_steps and n_paths must be >= 1")
    if not 0 <= burn_in < n_steps:
        raise ValueError("burn_in must satisfy 0 <= burn_in < n_steps")
    q0 = np.asarray(q0, dtype=float)
    rngs = spawned_generators(seed, n_paths)
    workers = min(thread_count(), n_paths)
    if workers == 1:
        blocks = [_simulate_paths(mu, q0, n_steps, rngs, burn_in)]
    else:
        bounds = np.linspace(0, n_paths, workers + 1).astype(int)
        chunks = [(rngs[a:b]) for a, b in zip(bounds, bounds[1:]) if b > a]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(
                pool.map(
                    lambda chunk: _simulate_paths(mu, q0, n_steps, chunk, burn_in),
                    chunks,
                )
            )
    kept = n_steps - burn_in
    if mu.dim == 1:
        # blocks are (kept * paths_in_chunk,) in time-major order; reassemble
        pts = np.concatenate(
            [b.reshape(kept, -1) for b in blocks], axis=1
        ).reshape(-1)
    else:
        pts = np.concatenate(
            [b.reshape(kept, -1, mu.dim) for b in blocks], axis=1
        ).reshape(-1, mu.dim)
    weights = np.full(kept * n_paths, 1.0 / (kept * n_paths))
    return EmpiricalMeasure(pts, weights, mu.space)


def push_forward(system: SystemSpec, nu: EmpiricalMeasure) -> EmpiricalMeasure:
    mapped = system.apply_many(nu.points.copy())
    return EmpiricalMeasure(mapped, nu.weights.copy(), nu.space)


def convolve_push(
    mu: WalkMeasure,
    nu: EmpiricalMeasure,
    mode: str = "exact",
    seed: Optional[int] = None,
    max_points: int = 50_000_000,
) -> EmpiricalMeasure:
    """mu * nu: push nu through every generator (exact) or one sampled
    generator per point (sampled)."""
    if mu.space != nu.space:
        raise ValueError("walk and measure live on different spaces")
    if mode == "exact":
        total = nu.n_points * len(mu.atoms)
        if total > max_points:
            raise SizeBudgetExceeded(
                f"exact convolution needs {total} points, budget {max_points}"
            )
        parts = []
        wparts = []
        for system, p in mu.atoms:
            parts.append(system.apply_many(nu.points.copy()))
            wparts.append(nu.weights * float(p))
        pts = np.concatenate(parts, axis=0)
        return EmpiricalMeasure(pts, np.concatenate(wparts), nu.space)
    if mode == "sampled":
        if seed is None:
            raise ValueError("sampled convolution needs a seed")
        rng = generator(seed)
        idx = rng.choice(len(mu.atoms), size=nu.n_points, p=np.asarray(mu.probs_float))
        pts = nu.points.copy()
        for i, (system, _) in enumerate(mu.atoms):
            mask = idx == i
            if np.any(mask):
                pts[mask] = system.apply_many(pts[mask])
        return EmpiricalMeasure(pts, nu.weights.copy(), nu.space)
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# distances between weighted point clouds


def _signed_ks(xs: np.ndarray, signed_w: np.ndarray) -> float:
    """max |cumsum| of signed weights over the sorted cloud, ties merged.

    With +w for the first cloud and -w for the second, the running sum after
    consuming every atom at positions <= x equals F1(x) - F2(x); both CDFs are
    right-continuous steps, so scanning tie-group ends is exact.
    """
    order = np.argsort(xs, kind="stable")
    xs = xs[order]
    cs = np.cumsum(signed_w[order])
    last = np.empty(len(xs), dtype=bool)
    last[:-1] = xs[1:] != xs[:-1]
    last[-1] = True
    return float(np.max(np.abs(cs[last])))


def ks_distance(nu1: EmpiricalMeasure, nu2: EmpiricalMeasure) -> float:
    """Weighted two-sample Kolmogorov-Smirnov distance on the line."""
    if nu1.dim != 1 or nu2.dim != 1:
        raise ValueError("KS distance needs one-dimensional measures")
    xs = np.concatenate([nu1.points, nu2.points])
    ws = np.concatenate([nu1.weights, -nu2.weights])
    return _signed_ks(xs, ws)


def weyl_coefficients(nu: EmpiricalMeasure, k_max: int = 20) -> np.ndarray:
    """|sum_j w_j exp(2 pi i k x_j)| for k = 1..k_max, per coordinate.

    Returns shape (k_max,) for one-dimensional measures and (dim, k_max) for
    torus measures (axis frequencies k * e_i).
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    pts = nu.points if nu.points.ndim == 2 else nu.points.reshape(-1, 1)
    w = nu.weights
    out = np.empty((pts.shape[1], k_max))
    for i in range(pts.shape[1]):
        base = np.exp(2j * np.pi * pts[:, i])
        cur = np.ones_like(base)
        for k in range(k_max):
            cur = cur * base
            out[i, k] = abs(np.sum(w * cur))
    return out[0] if nu.points.ndim == 1 else out


def _weyl_gap(nu1: EmpiricalMeasure, nu2: EmpiricalMeasure, k_max: int) -> float:
    """Max over axis frequencies of the complex coefficient difference."""
    p1 = nu1.points if nu1.points.ndim == 2 else nu1.points.reshape(-1, 1)
    p2 = nu2.points if nu2.points.ndim == 2 else nu2.points.reshape(-1, 1)
    worst = 0.0
    for i in range(p1.shape[1]):
        b1 = np.exp(2j * np.pi * p1[:, i])
        b2 = np.exp(2j * np.pi * p2[:, i])
        c1 = np.ones_like(b1)
        c2 = np.ones_like(b2)
        for _ in range(k_max):
            c1 = c1 * b1
            c2 = c2 * b2
            gap = abs(np.sum(nu1.weights * c1) - np.sum(nu2.weights * c2))
            worst = max(worst, float(gap))
    return worst


def measure_distance(
    nu1: EmpiricalMeasure, nu2: EmpiricalMeasure, k_max: int = 20
) -> Tuple[float, str]:
    """Declared metric per space: KS for interval/circle, Weyl gap for tori."""
    if nu1.space != nu2.space:
        raise ValueError("measures live on different spaces")
    if nu1.space in ("interval", "circle"):
        return ks_distance(nu1, nu2), "ks"
    return _weyl_gap(nu1, nu2, k_max), f"weyl-k{k_max}"


@dataclass
class ResidualReport:
    stationarity: float
    invariance: Tuple[float, ...]  # one residual per generator
    metric: str
    n_points: int

    @property
    def max_invariance(self) -> float:
        return max(self.invariance)


def stationarity_residual(
    mu: WalkMeasure, nu: EmpiricalMeasure, k_max: int = 20
) -> float:
    """Distance between mu * nu (exact convolution) and nu."""
    return measure_distance(convolve_push(mu, nu, "exact"), nu, k_max)[0]


def invariance_residual(
    mu: WalkMeasure, nu: EmpiricalMeasure, k_max: int = 20
) -> Tuple[float, ...]:
    """Per-generator distance between f_* nu and nu."""
    return tuple(
        measure_distance(push_forward(system, nu), nu, k_max)[0]
        for system, _ in mu.atoms
    )


def residual_report(
    mu: WalkMeasure, nu: EmpiricalMeasure, k_max: int = 20
) -> ResidualReport:
    if nu.space in ("interval", "circle"):
        # one shared sort over nu and all generator images; each residual is
        # then a cumsum with its own signed weights
        pushed = [s.apply_many(nu.points.copy()) for s, _ in mu.atoms]
        xs = np.concatenate([nu.points] + pushed)
        order = np.argsort(xs, kind="stable")
        xs_sorted = xs[order]
        last = np.empty(len(xs_sorted), dtype=bool)
        last[:-1] = xs_sorted[1:] != xs_sorted[:-1]
        last[-1] = True

        def compare(weight_blocks) -> float:
            cs = np.cumsum(np.concatenate(weight_blocks)[order])
            return float(np.max(np.abs(cs[last])))

        k = len(mu.atoms)
        stat = compare([-nu.weights] + [nu.weights * float(p) for _, p in mu.atoms])
        zeros = np.zeros(nu.n_points)
        inv = tuple(
            compare([-nu.weights] + [nu.weights if j == i else zeros for j in range(k)])
            for i in range(k)
        )
        return ResidualReport(stat, inv, "ks", nu.n_points)
    conv = convolve_push(mu, nu, "exact")
    stat, metric = measure_distance(conv, nu, k_max)
    inv = invariance_residual(mu, nu, k_max)
    return ResidualReport(stat, inv, metric, nu.n_points)


# ---------------------------------------------------------------------------
# dimension and entropy-facing diagnostics


@dataclass
class BoxDimensionReport:
    slope: float
    scales: Tuple[float, ...]
    counts: Tuple[int, ...]


def box_dimension(nu: EmpiricalMeasure, scales: Sequence[float]) -> BoxDimensionReport:
    """Least-squares slope of log(occupied boxes) against log(1/scale).

    One-dimensional measures only; needs at least 3 scales.  A single-atom
    measure occupies one box at every scale and yields slope 0.
    """
    if nu.dim != 1:
        raise ValueError("box dimension implemented for one-dimensional measures")
    scales = [float(s) for s in scales]
    if len(scales) < 3:
        raise ValueError("need at least 3 scales")
    if any(s <= 0 or s >= 1 for s in scales):
        raise ValueError("scales must lie in (0, 1)")
    counts = []
    boxes = []
    pts = nu.points
    for s in scales:
        # grid of ceil(1/s) right-open cells over [0,1].  Cell index by
        # MULTIPLYING with the exact integer count, not dividing by the
        # rounded float scale: one to-nearest rounding per point, so an atom
        # whose exact value is a cell boundary (stored one ulp off) lands on
        # the boundary integer exactly and floors into the correct cell
        nboxes = int(math.ceil(1.0 / s - 1e-9))
        idx = np.clip(np.floor(pts * nboxes).astype(np.int64), 0, nboxes - 1)
        boxes.append(nboxes)
        counts.append(int(len(np.unique(idx))))
    xs = np.log(np.asarray(boxes, dtype=float))
    ys = np.log(np.asarray(counts, dtype=float))
    slope = float(np.polyfit(xs, ys, 1)[0])
    return BoxDimensionReport(slope, tuple(scales), tuple(counts))


def _bin_cells(pts: np.ndarray, bins: int) -> Tuple[np.ndarray, int]:
    if pts.ndim == 1:
        return np.clip((pts * bins).astype(np.int64), 0, bins - 1), bins
    coords = np.clip((pts * bins).astype(np.int64), 0, bins - 1)
    cells = coords[:, 0]
    for j in range(1, pts.shape[1]):
        cells = cells * bins + coords[:, j]
    return cells, bins ** pts.shape[1]


def generator_image_information(
    mu: WalkMeasure, nu: EmpiricalMeasure, bins: int = 16
) -> float:
    """Plug-in mutual information (nats) between the generator label and the
    binned image point, for x ~ nu and f ~ mu independent.

    Computed from the exact mixture joint (every point pushed through every
    generator), so it is deterministic given nu.  Nonnegative; zero exactly
    when all generator pushforwards induce the same binned distribution — the
    finite-resolution shadow of "equal pushforwards", which together with
    stationarity means invariance.  Serves as the relative-entropy gap
    estimator: h_rel = H(mu) - MI, gap = MI.
    """
    k = len(mu.atoms)
    joint = None
    for i, (system, p) in enumerate(mu.atoms):
        pushed = system.apply_many(nu.points.copy())
        cells, n_cells = _bin_cells(pushed, bins)
        if joint is None:
            joint = np.zeros((k, n_cells))
        np.add.at(joint, (np.full(len(cells), i), cells), nu.weights * float(p))
    pf = joint.sum(axis=1)
    pc = joint.sum(axis=0)
    mask = joint > 0
    mi = float(
        np.sum(joint[mask] * np.log(joint[mask] / (pf[:, None] * pc[None, :])[mask]))
    )
    return max(0.0, mi)
