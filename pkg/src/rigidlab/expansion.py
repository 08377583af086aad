"""Average exterior-power growth and uniform expansion / uniform gap scans.

For a d-plane P with unit Plucker vector xi and a finite generator measure mu,
the N-step growth functional is

    sigma(P, N) = sum over words w of prob(w) * log || Lambda^d(D f_w) xi ||

where f_w runs over all length-N words (exact mode, budget-guarded) or a
Monte Carlo sample of words (mc mode, with a standard error).  Norms on
Lambda^d are Euclidean in the standard basis of d-fold index combinations,
i.e. Gram determinants of the pushed frame.

The scans evaluate sigma over a grid of planes (directions suffice for
constant-Jacobian generators) and report the minimum with a certificate flag:
`min > margin` for uniform expansion, `delta * (sigma(P1) - sigma(P0)) > margin`
over nested pairs for uniform gaps.  For nonlinear generators the grid also
carries base points and the report is flagged as a sampled check, not a
certificate.  For constant-Jacobian generators a Lipschitz bound on sigma in
the plane argument is recorded; when the sampled minimum clears the margin by
more than (Lipschitz constant) * (grid spacing) / 2 the certificate upgrades
to rigorous over the whole continuum of planes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .rng import generator


class BudgetExceeded(RuntimeError):
    """Exact enumeration would exceed the word budget."""


DEFAULT_WORD_BUDGET = 2**20


def index_combinations(dim: int, d: int) -> Tuple[Tuple[int, ...], ...]:
    return tuple(itertools.combinations(range(dim), d))


def compound_matrix(mat: np.ndarray, d: int) -> np.ndarray:
    """d-th exterior power of a matrix: entries are d x d minors."""
    mat = np.asarray(mat, dtype=float)
    dim = mat.shape[0]
    combs = index_combinations(dim, d)
    out = np.empty((len(combs), len(combs)))
    for i, rows in enumerate(combs):
        for j, cols in enumerate(combs):
            out[i, j] = np.linalg.det(mat[np.ix_(rows, cols)])
    return out


def plucker_vector(vectors: np.ndarray) -> np.ndarray:
    """Plucker coordinates of the span of the rows (a d x dim frame)."""
    vectors = np.asarray(vectors, dtype=float)
    d, dim = vectors.shape
    combs = index_combinations(dim, d)
    return np.array([np.linalg.det(vectors[:, list(c)]) for c in combs])


@dataclass(frozen=True)
class PlaneSpec:
    """A d-plane through a base point, stored as an orthonormal row frame.

    The frame must be orthonormal to 1e-12 and the derived Plucker vector
    has unit norm to the same tolerance (Gram determinant of an orthonormal
    frame is 1).
    """

    base_point: Tuple[float, ...]
    vectors: Tuple[Tuple[float, ...], ...]
    label: str = ""

    def __post_init__(self) -> None:
        v = np.asarray(self.vectors, dtype=float)
        gram = v @ v.T
        if not np.allclose(gram, np.eye(v.shape[0]), atol=1e-12):
            raise ValueError("plane frame must be orthonormal within 1e-12")
        xi = plucker_vector(v)
        if abs(np.linalg.norm(xi) - 1.0) > 1e-12:
            raise ValueError("Plucker vector must have unit norm within 1e-12")

    @property
    def d(self) -> int:
        return len(self.vectors)

    @property
    def dim(self) -> int:
        return len(self.vectors[0])

    @property
    def plucker(self) -> np.ndarray:
        return plucker_vector(np.asarray(self.vectors, dtype=float))

    @classmethod
    def from_angle(cls, theta: float, base_point: Sequence[float] = (0.0, 0.0)) -> "PlaneSpec":
        v = (math.cos(theta), math.sin(theta))
        return cls(tuple(float(x) for x in base_point), (v,), label=f"angle={theta!r}")

    @classmethod
    def from_vectors(
        cls, vectors: Sequence[Sequence[float]], base_point: Sequence[float] | None = None,
        label: str = "",
    ) -> "PlaneSpec":
        """Orthonormalize a spanning set (Gram-Schmidt) and wrap it."""
        arr = np.asarray(vectors, dtype=float)
        q, r = np.linalg.qr(arr.T)
        if np.min(np.abs(np.diag(r))) < 1e-12:
            raise ValueError("spanning vectors are linearly dependent")
        frame = q.T[: arr.shape[0]]
        if base_point is None:
            base_point = (0.0,) * arr.shape[1]
        return cls(
            tuple(float(x) for x in base_point),
            tuple(tuple(float(x) for x in row) for row in frame),
            label=label,
        )


def _walk_parts(mu) -> Tuple[List, np.ndarray]:
    # single system == Dirac walk measure on that system
    if hasattr(mu, "systems") and hasattr(mu, "probs_float"):
        return list(mu.systems), np.asarray(mu.probs_float)
    return [mu], np.ones(1)


def _all_linear(systems) -> bool:
    return all(getattr(s, "is_linear", False) for s in systems)


def linear_word_products(mu, n_steps: int, budget: int = DEFAULT_WORD_BUDGET):
    """All length-N word Jacobian products for constant-Jacobian generators.

    Returns (probabilities, products); words are enumerated lexicographically
    in generator index, first step as the most significant digit.
    """
    systems, probs = _walk_parts(mu)
    if not _all_linear(systems):
        raise ValueError("word-product table needs constant-Jacobian generators")
    k = len(systems)
    if k**n_steps > budget:
        raise BudgetExceeded(
            f"{k}^{n_steps} = {k**n_steps} words exceed budget {budget}"
        )
    dim = systems[0].dim
    zero = np.zeros(dim) if dim > 1 else np.zeros(())
    jacs = [s.jacobian(zero) for s in systems]
    prods = [np.eye(dim)]
    pws = [1.0]
    for _ in range(n_steps):
        # each step left-multiplies: the new letter is the word's last symbol,
        # iterated fastest, so earlier letters stay most significant
        prods = [j @ p for p in prods for j in jacs]
        pws = [pp * float(pr) for pp in pws for pr in probs]
    return np.asarray(pws), np.stack(prods)


def sigma(
    mu,
    n_steps: int,
    plane: PlaneSpec,
    mode: str = "exact",
    samples: int = 4096,
    seed: Optional[int] = None,
    budget: int = DEFAULT_WORD_BUDGET,
) -> Tuple[float, float]:
    """Average log growth of the plane's Plucker vector over N-step words.

    Returns (value, stderr); stderr is 0.0 in exact mode.  Exact mode
    enumerates all words (BudgetExceeded past the budget); mc mode draws
    `samples` words with the given seed.
    """
    systems, probs = _walk_parts(mu)
    dim = systems[0].dim
    if plane.dim != dim:
        raise ValueError("plane dimension does not match the systems")
    d = plane.d
    xi = plane.plucker
    if mode == "exact":
        k = len(systems)
        if k**n_steps > budget:
            raise BudgetExceeded(
                f"{k}^{n_steps} = {k**n_steps} words exceed budget {budget}"
            )
        value = _sigma_exact_dfs(systems, probs, n_steps, plane, xi, d)
        return value, 0.0
    if mode == "mc":
        if seed is None:
            raise ValueError("mc mode needs a seed")
        if samples < 2:
            raise ValueError("mc mode needs at least 2 samples")
        rng = generator(seed)
        words = rng.choice(len(systems), size=(samples, n_steps), p=probs)
        logs = np.empty(samples)
        base = np.asarray(plane.base_point) if dim > 1 else np.asarray(
            plane.base_point[0]
        )
        for s in range(samples):
            logs[s] = _word_log_growth(systems, words[s], base, xi, d)
        value = float(np.mean(logs))
        stderr = float(np.std(logs, ddof=1) / math.sqrt(samples))
        return value, stderr
    raise ValueError(f"unknown mode {mode!r}")


def _word_log_growth(systems, word, q0, xi: np.ndarray, d: int) -> float:
    q = q0
    dim = systems[0].dim
    prod = np.eye(dim)
    for idx in word:
        system = systems[idx]
        prod = system.jacobian(q) @ prod
        q = system.apply(q)
    pushed = (prod @ xi) if d == 1 else (compound_matrix(prod, d) @ xi)
    return float(np.log(np.linalg.norm(pushed)))


def _sigma_exact_dfs(systems, probs, n_steps, plane: PlaneSpec, xi, d) -> float:
    """Depth-first enumeration sharing prefixes (orbit point + partial product)."""
    dim = systems[0].dim
    base = np.asarray(plane.base_point) if dim > 1 else np.asarray(plane.base_point[0])
    total = 0.0

    def recurse(depth: int, q, prod: np.ndarray, weight: float) -> None:
        nonlocal total
        if depth == n_steps:
            if d == 1:
                pushed = prod @ xi
            else:
                pushed = compound_matrix(prod, d) @ xi
            total += weight * float(np.log(np.linalg.norm(pushed)))
            return
        for idx, system in enumerate(systems):
            recurse(
                depth + 1,
                system.apply(q),
                system.jacobian(q) @ prod,
                weight * float(probs[idx]),
            )

    recurse(0, base, np.eye(dim), 1.0)
    return total


def _sigma_exact_linear_batch(
    mu, n_steps: int, planes: Sequence[PlaneSpec], budget: int
) -> np.ndarray:
    """Vectorized exact sigma over many planes for constant-Jacobian systems."""
    pws, prods = linear_word_products(mu, n_steps, budget)
    d = planes[0].d
    if d > 1:
        prods = np.stack([compound_matrix(p, d) for p in prods])
    xis = np.stack([p.plucker for p in planes])
    pushed = np.einsum("wij,pj->wpi", prods, xis)
    norms = np.linalg.norm(pushed, axis=2)
    return pws @ np.log(norms)


@dataclass
class ExpansionReport:
    """Scan result table plus the certificate summary."""

    kind: str  # "expansion" or "gaps"
    n_steps: int
    d: int
    mode: str
    rows: List[Tuple[str, str, float, float]]  # (plane id, label, value, stderr)
    min_value: float
    argmin: str
    margin: float
    certified: bool
    sampled_check: bool  # True when base points matter (nonlinear generators)
    lipschitz_bound: Optional[float] = None
    grid_spacing: Optional[float] = None
    rigorous: bool = False
    delta: Optional[int] = None


def _lipschitz_constant(mu, n_steps: int) -> float:
    """|d sigma / d xi| <= max over words of cond(Lambda^d product); bounded by
    the product of per-generator condition numbers."""
    systems, _ = _walk_parts(mu)
    dim = systems[0].dim
    zero = np.zeros(dim) if dim > 1 else np.zeros(())
    conds = [np.linalg.cond(s.jacobian(zero)) for s in systems]
    return float(max(conds) ** n_steps)


def angular_grid(count: int) -> List[PlaneSpec]:
    """Directions theta = i*pi/count in [0, pi); lines, so antipodes coincide."""
    return [PlaneSpec.from_angle(i * math.pi / count) for i in range(count)]


def random_plane_grid(
    dim: int, d: int, count: int, seed: int, random_base: bool = False
) -> List[PlaneSpec]:
    rng = generator(seed)
    out = []
    for i in range(count):
        mat = rng.standard_normal((d, dim))
        base = rng.random(dim) if random_base else np.zeros(dim)
        out.append(PlaneSpec.from_vectors(mat, base, label=f"random-{i}"))
    return out


def uniform_expansion_scan(
    mu,
    n_steps: int,
    planes: Sequence[PlaneSpec],
    mode: str = "exact",
    samples: int = 4096,
    seed: Optional[int] = None,
    margin: float = 0.0,
    budget: int = DEFAULT_WORD_BUDGET,
) -> ExpansionReport:
    """Evaluate sigma over the plane grid; certificate: min > margin."""
    systems, _ = _walk_parts(mu)
    linear = _all_linear(systems)
    values: List[float]
    errs: List[float]
    if mode == "exact" and linear:
        values = list(_sigma_exact_linear_batch(mu, n_steps, planes, budget))
        errs = [0.0] * len(planes)
    else:
        values, errs = [], []
        for i, plane in enumerate(planes):
            sub_seed = None if seed is None else seed + i
            v, e = sigma(
                mu, n_steps, plane, mode=mode, samples=samples, seed=sub_seed,
                budget=budget,
            )
            values.append(v)
            errs.append(e)
    rows = [
        (f"plane-{i}", p.label or f"plane-{i}", float(v), float(e))
        for i, (p, v, e) in enumerate(zip(planes, values, errs))
    ]
    imin = int(np.argmin(values))
    min_value = float(values[imin])
    certified = mode == "exact" and linear and min_value > margin
    lip = None
    spacing = None
    rigorous = False
    if linear and mode == "exact":
        lip = _lipschitz_constant(mu, n_steps)
        spacing = _angular_spacing(planes)
        if spacing is not None:
            rigorous = min_value - lip * spacing / 2.0 > margin
    return ExpansionReport(
        "expansion", n_steps, planes[0].d, mode, rows, min_value,
        rows[imin][1], margin, certified, sampled_check=not linear,
        lipschitz_bound=lip, grid_spacing=spacing, rigorous=rigorous,
    )


def _angular_spacing(planes: Sequence[PlaneSpec]) -> Optional[float]:
    """Grid spacing when the planes form an angular grid of lines in R^2."""
    if any(p.d != 1 or p.dim != 2 for p in planes):
        return None
    if not all(p.label.startswith("angle=") for p in planes):
        return None
    return math.pi / len(planes)


def uniform_gaps_scan(
    mu,
    n_steps: int,
    pairs: Sequence[Tuple[PlaneSpec, PlaneSpec]],
    delta: int = 1,
    mode: str = "exact",
    samples: int = 4096,
    seed: Optional[int] = None,
    margin: float = 0.0,
    budget: int = DEFAULT_WORD_BUDGET,
) -> ExpansionReport:
    """Gap functional delta * (sigma(P1) - sigma(P0)) over nested pairs P0 < P1.

    delta is +1 or -1; the pair must be nested with dim P1 = dim P0 + 1.
    """
    if delta not in (1, -1):
        raise ValueError("delta must be +1 or -1")
    for p0, p1 in pairs:
        if p1.d != p0.d + 1:
            raise ValueError("pairs must have dim P1 = dim P0 + 1")
        _check_nested(p0, p1)
    systems, _ = _walk_parts(mu)
    linear = _all_linear(systems)
    rows = []
    values = []
    for i, (p0, p1) in enumerate(pairs):
        sub_seed = None if seed is None else seed + i
        v0, e0 = sigma(mu, n_steps, p0, mode=mode, samples=samples,
                       seed=sub_seed, budget=budget)
        v1, e1 = sigma(mu, n_steps, p1, mode=mode, samples=samples,
                       seed=None if sub_seed is None else sub_seed + len(pairs),
                       budget=budget)
        gap = delta * (v1 - v0)
        err = math.hypot(e0, e1)
        label = p0.label or f"pair-{i}"
        rows.append((f"pair-{i}", label, float(gap), float(err)))
        values.append(gap)
    imin = int(np.argmin(values))
    certified = mode == "exact" and linear and values[imin] > margin
    return ExpansionReport(
        "gaps", n_steps, pairs[0][0].d, mode, rows, float(values[imin]),
        rows[imin][1], margin, certified, sampled_check=not linear, delta=delta,
    )


def _check_nested(p0: PlaneSpec, p1: PlaneSpec, tol: float = 1e-10) -> None:
    """Every frame vector of P0 must lie in the span of P1's frame."""
    v0 = np.asarray(p0.vectors, dtype=float)
    v1 = np.asarray(p1.vectors, dtype=float)
    proj = v0 @ v1.T @ v1
    if not np.allclose(proj, v0, atol=tol):
        raise ValueError("pair is not nested: P0 is not contained in P1")


def full_space_plane(dim: int) -> PlaneSpec:
    """The whole space as a plane (its Plucker line is one-dimensional)."""
    return PlaneSpec(
        (0.0,) * dim, tuple(tuple(float(i == j) for j in range(dim)) for i in range(dim)),
        label="full-space",
    )


def line_in_full_pairs(count: int) -> List[Tuple[PlaneSpec, PlaneSpec]]:
    """Angular grid of (line, R^2) nested pairs for two-dimensional systems."""
    full = full_space_plane(2)
    return [(PlaneSpec.from_angle(i * math.pi / count), full) for i in range(count)]
