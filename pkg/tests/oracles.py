"""Independent cross-check oracles for the test suite.

Everything here is computed by deliberately different means than the package
under test: direct Fraction evaluation of sparse polynomials, exhaustive word
enumeration with plain numpy products, Gram determinants instead of compound
matrices, closed-form trigonometric sums, and the exact self-similar CDF of
the middle-thirds attractor.  Agreement is then evidence, not tautology.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

# ---------------------------------------------------------------------------
# exact polynomial evaluation and rational linear algebra


def eval_components(components, point):
    """Evaluate sparse {exponent-tuple: Fraction} dicts at a rational point."""
    point = [Fraction(p) for p in point]
    out = []
    for comp in components:
        total = Fraction(0)
        for mono, c in comp.items():
            term = Fraction(c)
            for x, e in zip(point, mono):
                if e:
                    term *= x**e
            total += term
        out.append(total)
    return tuple(out)


def frac_matmul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    return [
        [sum((a[i][t] * b[t][j] for t in range(k)), Fraction(0)) for j in range(m)]
        for i in range(n)
    ]


def frac_det(mat):
    m = [list(row) for row in mat]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        inv = Fraction(1) / m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] * inv
            if f:
                m[r] = [a - f * b for a, b in zip(m[r], m[col])]
    return det


# ---------------------------------------------------------------------------
# randomized admissible polynomial maps (generation is brute force over
# exponent tuples; validity is then the package's job to confirm)


def admissible_monomials(coord_weights, cap, include_constant=False):
    """All exponent tuples m with sum(m_i * w_i) <= cap, by direct product."""
    coord_weights = [Fraction(w) for w in coord_weights]
    cap = Fraction(cap)
    ranges = [range(int(cap / w) + 1) for w in coord_weights]
    out = []
    for m in itertools.product(*ranges):
        w = sum((e * cw for e, cw in zip(m, coord_weights)), Fraction(0))
        if w > cap:
            continue
        if sum(m) == 0 and not include_constant:
            continue
        out.append(m)
    return out


def random_admissible_components(coord_weights, rng, strict=False, translate=True):
    """Random coefficient dicts respecting the weight cap per output slot.

    The same-weight linear block of each level is identity for strict maps and
    a random invertible rational matrix otherwise, so the result always has an
    invertible graded part.  Strict maps keep nothing else at critical weight.
    """
    coord_weights = [Fraction(w) for w in coord_weights]
    dim = len(coord_weights)

    def frac(lo=-3, hi=3):
        return Fraction(int(rng.integers(lo, hi + 1)), int(rng.integers(1, 4)))

    comps = []
    for j, wj in enumerate(coord_weights):
        comp = {}
        for m in admissible_monomials(coord_weights, wj, include_constant=translate):
            w = sum((e * cw for e, cw in zip(m, coord_weights)), Fraction(0))
            linear_same = sum(m) == 1 and w == wj
            if linear_same:
                continue  # filled from the block below
            if strict and w == wj:
                continue  # critical-weight terms barred for strict maps
            if rng.random() < 0.4:
                c = frac()
                if c:
                    comp[m] = c
        comps.append(comp)

    levels = {}
    for j, wj in enumerate(coord_weights):
        levels.setdefault(wj, []).append(j)
    for wj, idxs in levels.items():
        k = len(idxs)
        if strict:
            block = [[Fraction(int(r == c)) for c in range(k)] for r in range(k)]
        else:
            while True:
                block = [[frac(-2, 2) for _ in range(k)] for _ in range(k)]
                if frac_det(block) != 0:
                    break
        for r, j in enumerate(idxs):
            for c, i in enumerate(idxs):
                if block[r][c]:
                    comps[j][tuple(int(t == i) for t in range(dim))] = block[r][c]
    return comps


# ---------------------------------------------------------------------------
# exhaustive word averages of d-volume growth (Gram determinant route)


def brute_sigma(systems, probs, n_steps, frame):
    """Average log d-volume growth over all words, by exhaustion.

    frame: (dim, d) array with orthonormal columns; constant-Jacobian systems
    only.  Growth for one word is sqrt(det(V^T V)) with V = J_word @ frame.
    """
    frame = np.asarray(frame, dtype=float)
    dim = frame.shape[0]
    zero = np.zeros(dim) if dim > 1 else np.zeros(())
    jacs = [np.atleast_2d(np.asarray(s.jacobian(zero), dtype=float)) for s in systems]
    total = 0.0
    for word in itertools.product(range(len(systems)), repeat=n_steps):
        mat = np.eye(dim)
        for idx in word:
            mat = jacs[idx] @ mat
        v = mat @ frame
        p = 1.0
        for idx in word:
            p *= float(probs[idx])
        total += p * 0.5 * math.log(np.linalg.det(v.T @ v))
    return total


def brute_sigma_lines(systems, probs, n_steps, directions):
    """Vectorized d=1 variant: one value per unit direction (rows)."""
    directions = np.asarray(directions, dtype=float)
    dim = directions.shape[1]
    zero = np.zeros(dim)
    jacs = [np.asarray(s.jacobian(zero), dtype=float) for s in systems]
    mats = [np.eye(dim)]
    pws = [1.0]
    for _ in range(n_steps):
        mats = [j @ m for m in mats for j in jacs]
        pws = [p * float(pr) for p in pws for pr in probs]
    stack = np.stack(mats)  # (words, dim, dim)
    imgs = np.einsum("wij,dj->wdi", stack, directions)
    growth = 0.5 * np.log(np.einsum("wdi,wdi->wd", imgs, imgs))
    return np.asarray(pws) @ growth


# ---------------------------------------------------------------------------
# closed-form distribution oracles


def cantor_cdf(x: float) -> float:
    """Exact CDF of the middle-thirds self-similar measure (devil staircase)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    val, scale = 0.0, 0.5
    for _ in range(200):
        x *= 3.0
        if x >= 2.0:
            val += scale
            x -= 2.0
        elif x >= 1.0:
            return val + scale
        scale *= 0.5
        if x == 0.0:
            break
    return val


def ks_to_cdf(points, weights, cdf):
    """sup_x |F_emp(x) - F(x)| for a continuous-CDF reference, checked at atoms."""
    points = np.asarray(points, dtype=float).ravel()
    weights = np.asarray(weights, dtype=float).ravel()
    order = np.argsort(points, kind="stable")
    pts = points[order]
    cum = np.cumsum(weights[order])
    best = 0.0
    prev = 0.0
    i = 0
    n = len(pts)
    while i < n:
        j = i
        while j + 1 < n and pts[j + 1] == pts[i]:
            j += 1
        f = cdf(float(pts[i]))
        best = max(best, abs(prev - f), abs(cum[j] - f))
        prev = cum[j]
        i = j + 1
    return best


def ks_between_atoms(p1, w1, p2, w2):
    """Quadratic-time KS distance between two atomic measures on the line."""
    support = np.unique(np.concatenate([p1, p2]))
    best = 0.0
    for x in support:
        f1 = float(np.sum(np.asarray(w1)[np.asarray(p1) <= x]))
        f2 = float(np.sum(np.asarray(w2)[np.asarray(p2) <= x]))
        best = max(best, abs(f1 - f2))
    return best


def rotation_weyl(alpha: float, n: int, k: int) -> float:
    """|(1/n) sum_{j<n} e^{2 pi i k j alpha}| in closed form (geometric sum)."""
    s = math.sin(math.pi * k * alpha)
    if abs(s) < 1e-300:
        return 1.0
    return abs(math.sin(math.pi * k * n * alpha) / (n * s))


def log_abs_eigenvalues(matrix):
    """Descending log|eigenvalue| list from the generic numpy eigensolver."""
    vals = np.linalg.eigvals(np.asarray(matrix, dtype=float))
    return np.sort(np.log(np.abs(vals)))[::-1]


def shannon(probs):
    return -sum(float(p) * math.log(float(p)) for p in probs if p > 0)
