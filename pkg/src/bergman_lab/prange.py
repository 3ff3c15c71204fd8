"""Exponent intervals for L^p boundedness from a weight factorisation.

Each zero ``|z - a|**alpha`` or pole ``|z - b|**(-beta)`` of the pulled-back
Jacobian receives a share of a Hölder budget. A zero with share ``theta``
yields the admissible interval
``((2 alpha + 2 theta) / (alpha + 2 theta), (2 alpha + 2 theta) / alpha)``
and a pole with share ``sigma`` (``beta > 2 sigma``) yields
``((2 beta - 2 sigma) / beta, (2 beta - 2 sigma) / (beta - 2 sigma))``.
Every such interval has conjugate endpoints around 2, so an intersection is
fixed by its largest lower endpoint.

The best split minimises the largest lower endpoint. Each lower endpoint is
strictly decreasing in its own share, so the optimum equalises them: find
the level ``L`` at which the shares needed to reach ``L`` exactly exhaust the
budget. That is a one-dimensional monotone root-finding problem, solved here
by bisection; no search over the simplex is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .covering import CoveringMap, WeightFactorization, q_weight_factorization

CONJUGACY_TOL = 1e-12
CAP_EPS = 1e-6


class ConjugacyError(ArithmeticError):
    """An interval failed the ``1/r + 1/r' = 1`` check."""


def conjugate(p: float) -> float:
    return p / (p - 1.0)


@dataclass(frozen=True)
class Interval:
    lower: float
    upper: float

    @property
    def conjugate(self) -> bool:
        return abs(1.0 / self.lower + 1.0 / self.upper - 1.0) < CONJUGACY_TOL

    def __contains__(self, p: float) -> bool:
        return self.lower < p < self.upper

    def check(self) -> "Interval":
        if not self.conjugate:
            raise ConjugacyError(f"endpoints {self.lower!r}, {self.upper!r} are not conjugate")
        if not self.lower < 2.0 < self.upper:
            raise ConjugacyError("interval does not contain 2")
        return self

    def intersect(self, other: "Interval") -> "Interval":
        return from_lower(max(self.lower, other.lower))

    def to_json(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "conjugate": self.conjugate}


def from_lower(r: float) -> Interval:
    """The interval ``(r, r')`` with ``r'`` the conjugate exponent of ``r``."""
    if not 1.0 < r < 2.0:
        raise ValueError(f"lower endpoint {r!r} outside (1, 2)")
    return Interval(r, conjugate(r))


# -- single-factor intervals -------------------------------------------------

def zero_lower(alpha: float, theta):
    return (2 * alpha + 2 * theta) / (alpha + 2 * theta)


def pole_lower(beta: float, sigma):
    return (2 * beta - 2 * sigma) / beta


def prop_mu1_range(alpha: float, theta: float) -> Interval:
    """Exponents for which ``|z - w|**(alpha (2 - p) / theta)`` is an A_p^+ weight."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if not 0 < theta <= 1:
        raise ValueError("theta must lie in (0, 1]")
    lo = zero_lower(alpha, theta)
    hi = (2 * alpha + 2 * theta) / alpha
    return Interval(lo, hi).check()


def prop_mu2_range(beta: float, sigma: float) -> Interval:
    """Exponents for which ``|z - w|**(-beta (2 - p) / sigma)`` is an A_p^+ weight."""
    if not 0 < sigma <= 1:
        raise ValueError("sigma must lie in (0, 1]")
    if not beta > 2 * sigma:
        raise ValueError("need beta > 2 sigma")
    lo = pole_lower(beta, sigma)
    hi = (2 * beta - 2 * sigma) / (beta - 2 * sigma)
    return Interval(lo, hi).check()


# -- allocations ------------------------------------------------------------

@dataclass(frozen=True)
class VariableFactors:
    """Zero multiplicities ``alphas`` and pole multiplicities ``betas`` of one variable."""

    alphas: tuple[float, ...] = ()
    betas: tuple[float, ...] = ()

    def __post_init__(self):
        if not self.alphas and not self.betas:
            raise ValueError("a variable needs at least one factor")
        if any(a <= 0 for a in self.alphas) or any(b <= 0 for b in self.betas):
            raise ValueError("multiplicities must be positive")

    @property
    def caps(self) -> np.ndarray:
        """Largest admissible share per factor: 1 for zeros, below ``min(1, beta/2)`` for poles."""
        zc = [1.0] * len(self.alphas)
        pc = [min(1.0, b / 2.0 - CAP_EPS) for b in self.betas]
        return np.array(zc + pc)


@dataclass(frozen=True)
class ThetaAllocation:
    zero_thetas: tuple[float, ...]
    pole_sigmas: tuple[float, ...]
    slack: float = 0.0

    @property
    def total(self) -> float:
        return math.fsum(self.zero_thetas) + math.fsum(self.pole_sigmas)

    def to_json(self) -> dict:
        return {"zero_thetas": list(self.zero_thetas), "pole_sigmas": list(self.pole_sigmas),
                "slack": self.slack}


def _lowers(fac: VariableFactors, shares: np.ndarray) -> np.ndarray:
    k = len(fac.alphas)
    out = np.empty(shares.size)
    out[:k] = zero_lower(np.array(fac.alphas), shares[:k])
    out[k:] = pole_lower(np.array(fac.betas), shares[k:])
    return out


def _shares_for_level(fac: VariableFactors, level: float) -> np.ndarray:
    """Smallest share of each factor whose lower endpoint is at most ``level``."""
    a = np.array(fac.alphas, dtype=float)
    b = np.array(fac.betas, dtype=float)
    zs = a * (2.0 - level) / (2.0 * (level - 1.0))
    ps = b * (2.0 - level) / 2.0
    return np.concatenate([zs, ps])


def interval_for_allocation(fac: VariableFactors, alloc: ThetaAllocation) -> Interval:
    """Intersection of the single-factor intervals under a given split."""
    if len(alloc.zero_thetas) != len(fac.alphas) or len(alloc.pole_sigmas) != len(fac.betas):
        raise ValueError("allocation does not match the factors")
    if alloc.total > 1.0 + 1e-12:
        raise ValueError("allocation exceeds the Hölder budget")
    lows = []
    for alpha, theta in zip(fac.alphas, alloc.zero_thetas):
        lows.append(prop_mu1_range(alpha, theta).lower)
    for beta, sigma in zip(fac.betas, alloc.pole_sigmas):
        lows.append(prop_mu2_range(beta, sigma).lower)
    return from_lower(max(lows)).check()


def optimize_variable(fac: VariableFactors, tol: float = 1e-15) -> tuple[ThetaAllocation, Interval]:
    """Split of the unit budget that minimises the largest lower endpoint.

    A level ``L`` is reachable iff every factor can reach it within its cap
    and the required shares sum to at most 1. The least reachable level is the
    larger of the cap-imposed floor and the root of ``sum(shares(L)) = 1``.
    Any budget left over once every factor sits at its cap is reported as
    ``slack`` (absorbed by the constant weight, which lies in every class).
    """
    caps = fac.caps
    floor = float(np.max(_lowers(fac, caps)))
    need = lambda L: float(np.sum(_shares_for_level(fac, L)))  # noqa: E731
    if need(floor) <= 1.0:
        level = floor
    else:
        lo, hi = floor, 2.0          # need(lo) > 1 >= need(hi) = 0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if need(mid) > 1.0:
                lo = mid
            else:
                hi = mid
            if hi - lo <= tol:
                break
        level = hi
    shares = np.minimum(_shares_for_level(fac, level), caps)
    spare = 1.0 - float(np.sum(shares))
    # hand any spare budget to factors below their cap, proportionally to room
    room = caps - shares
    if spare > 0 and room.sum() > 0:
        shares = shares + room * min(1.0, spare / room.sum())
    slack = max(0.0, 1.0 - math.fsum(shares))
    k = len(fac.alphas)
    alloc = ThetaAllocation(tuple(float(s) for s in shares[:k]),
                            tuple(float(s) for s in shares[k:]), slack)
    interval = from_lower(float(np.max(_lowers(fac, shares)))).check()
    return alloc, interval


@dataclass
class PRangeResult:
    label: str
    allocations: dict[int, ThetaAllocation]
    variable_intervals: dict[int, Interval]
    interval: Interval
    factorization: WeightFactorization | None = field(default=None, repr=False)

    def to_json(self) -> dict:
        return {
            "map": self.label,
            "per_variable_allocations": {
                f"z{j}": {**a.to_json(), "interval": self.variable_intervals[j].to_json()}
                for j, a in sorted(self.allocations.items())},
            "interval": self.interval.to_json(),
        }


def variable_factors(fac: WeightFactorization) -> dict[int, VariableFactors]:
    out = {}
    for j in sorted(fac.variables):
        zeros, poles = fac.exponents(j)
        out[j] = VariableFactors(tuple(zeros), tuple(poles))
    return out


def optimize_allocation(fac: WeightFactorization | dict[int, VariableFactors],
                        label: str | None = None) -> PRangeResult:
    """Best split per variable and the intersection over all variables."""
    per_var = variable_factors(fac) if isinstance(fac, WeightFactorization) else dict(fac)
    allocs, intervals = {}, {}
    for j, vf in per_var.items():
        allocs[j], intervals[j] = optimize_variable(vf)
    overall = from_lower(max(iv.lower for iv in intervals.values())).check()
    if label is None:
        label = fac.cmap.label if isinstance(fac, WeightFactorization) else "custom"
    return PRangeResult(label, allocs, intervals, overall,
                        fac if isinstance(fac, WeightFactorization) else None)


def prange_for_map(cmap: CoveringMap) -> PRangeResult:
    return optimize_allocation(q_weight_factorization(cmap))


def prange_hartogs(m: int, n: int) -> Interval:
    from .covering import Hartogs
    return prange_for_map(Hartogs(m, n)).interval


def theta_star(n: int) -> float:
    """Common share of the ``n - 1`` Vandermonde zeros at the optimum."""
    if n < 2:
        raise ValueError("n must be >= 2")
    return (math.sqrt(n * n - 1) - n + 1) / (2 * n - 2)


def prange_symmetrized_closed_form(n: int) -> Interval:
    if n < 2:
        raise ValueError("n must be >= 2")
    s = math.sqrt(n * n - 1)
    return Interval((s + n - 1) / s, (s + n - 1) / (n - 1)).check()
