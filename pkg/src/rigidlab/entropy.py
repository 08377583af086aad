"""Entropy bookkeeping calculators.

Everything here is a calculator over supplied exponents, dimensions, and
entropies — metric entropy is never estimated from orbit data.  Wire the
inputs from the QR exponent estimates (linear fixtures satisfy the Pesin
equality h = sum of positive exponents for volume) or from the walk module's
relative-entropy gap estimator.  Logarithms are natural; entropies in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

TOL = 1e-12


@dataclass(frozen=True)
class SpectrumSummary:
    """Lyapunov exponents with multiplicities and optional nested bundle dims.

    dims_e1/dims_e2 are per-exponent fiber dimensions of two nested invariant
    bundles inside the unstable; dims_e1 <= dims_e2 <= multiplicity entrywise.
    """

    exponents: Tuple[float, ...]
    multiplicities: Tuple[int, ...]
    dims_e1: Optional[Tuple[int, ...]] = None
    dims_e2: Optional[Tuple[int, ...]] = None

    def __post_init__(self) -> None:
        exps = tuple(float(x) for x in self.exponents)
        mults = tuple(int(m) for m in self.multiplicities)
        object.__setattr__(self, "exponents", exps)
        object.__setattr__(self, "multiplicities", mults)
        if not exps:
            raise ValueError("empty spectrum")
        if len(exps) != len(mults):
            raise ValueError("one multiplicity per exponent")
        if any(a <= b for a, b in zip(exps, exps[1:])):
            raise ValueError("exponents must be strictly decreasing")
        if any(m < 1 for m in mults):
            raise ValueError("multiplicities must be positive")
        for name in ("dims_e1", "dims_e2"):
            val = getattr(self, name)
            if val is not None:
                val = tuple(int(d) for d in val)
                object.__setattr__(self, name, val)
                if len(val) != len(exps):
                    raise ValueError(f"{name} needs one entry per exponent")
                if any(d < 0 for d in val):
                    raise ValueError(f"{name} entries must be nonnegative")
                if any(d > m for d, m in zip(val, mults)):
                    raise ValueError(f"{name} exceeds multiplicity")
        if self.dims_e1 is not None and self.dims_e2 is not None:
            if any(a > b for a, b in zip(self.dims_e1, self.dims_e2)):
                raise ValueError("nested bundles need dims_e1 <= dims_e2")

    @property
    def total_dim(self) -> int:
        return sum(self.multiplicities)


def shannon_entropy(mu) -> float:
    """-sum p log p over the atoms of a walk measure, in nats."""
    return -sum(float(p) * math.log(float(p)) for p in mu.probs)


def _positive_weighted_sum(spec: SpectrumSummary, dims: Sequence[int]) -> float:
    return sum(
        lam * d for lam, d in zip(spec.exponents, dims) if lam > 0
    )


def pesin_sum(spec: SpectrumSummary, dims: Optional[Sequence[int]] = None) -> float:
    """Positive exponents weighted by dimension; dims default to multiplicities."""
    if dims is None:
        dims = spec.multiplicities
    if len(dims) != len(spec.exponents):
        raise ValueError("one dim per exponent")
    return _positive_weighted_sum(spec, dims)


def ly_bounds(spec: SpectrumSummary) -> Tuple[float, float]:
    """Entropy sandwich from the two nested bundle dimension profiles.

    lower = positive-exponent sum against dims_e1, upper against dims_e2;
    lower <= upper is forced by the nesting invariant.
    """
    if spec.dims_e1 is None or spec.dims_e2 is None:
        raise ValueError("both dimension profiles are required")
    lower = _positive_weighted_sum(spec, spec.dims_e1)
    upper = _positive_weighted_sum(spec, spec.dims_e2)
    return lower, upper


@dataclass
class BoundCheck:
    consistent: bool  # h_rel <= H_mu within TOL
    gap: float  # H_mu - h_rel
    invariance_consistent: bool  # gap ~ 0


def relative_entropy_bound_check(
    H_mu: float, h_rel: float, invariance_tol: float = 1e-9
) -> BoundCheck:
    """Check h_rel <= H_mu; a gap of ~0 is the invariance-consistent case.

    A violation (h_rel exceeding H_mu beyond tolerance) signals an estimation
    error upstream, not dynamics.
    """
    if H_mu < 0 or h_rel < 0:
        raise ValueError("entropies must be nonnegative")
    gap = H_mu - h_rel
    consistent = h_rel <= H_mu + TOL
    return BoundCheck(consistent, gap, consistent and abs(gap) <= invariance_tol)


@dataclass
class ChainInequality:
    name: str
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.lhs - self.rhs

    @property
    def holds(self) -> bool:
        return self.slack >= -TOL


@dataclass
class StiffnessVerdict:
    signed_sum: float
    consistent: bool
    forced_equality: bool
    inequalities: List[ChainInequality] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "stiffness-consistent" if self.consistent else "inconsistent"


def stiffness_chain(
    H_mu: float,
    spec: SpectrumSummary,
    dims: Optional[Sequence[int]] = None,
    h_rel: Optional[float] = None,
) -> StiffnessVerdict:
    """Signed exponent sum over an invariant bundle and the inequality chain.

    signed_sum = sum over ALL exponents of lambda * dim (dims default to
    multiplicities).  Consistency needs signed_sum >= 0: together with
    h_rel - H_mu >= signed_sum and the bound h_rel <= H_mu, everything is
    pinched to zero, which forces the entropy equality and hence invariance
    of the stationary measure.  Each link is recorded with its slack.
    """
    if dims is None:
        dims = spec.multiplicities
    if len(dims) != len(spec.exponents):
        raise ValueError("one dim per exponent")
    if any(d < 0 or d > m for d, m in zip(dims, spec.multiplicities)):
        raise ValueError("dims must satisfy 0 <= dim <= multiplicity")
    signed = sum(lam * d for lam, d in zip(spec.exponents, dims))
    chain = [ChainInequality("signed-sum-nonnegative", signed, 0.0)]
    if h_rel is not None:
        if h_rel < 0 or H_mu < 0:
            raise ValueError("entropies must be nonnegative")
        chain.append(ChainInequality("chain-lower", h_rel - H_mu, signed))
        chain.append(ChainInequality("entropy-bound", H_mu, h_rel))
    consistent = chain[0].holds
    forced = h_rel is not None and all(q.holds for q in chain)
    return StiffnessVerdict(signed, consistent, forced, chain)
