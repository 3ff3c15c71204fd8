"""The Friedrichs operator ``F(f) = B(conj f)`` on the symmetric space and on ``G``.

On ``A^2(D^2, nu) ∩ {f = f∘tau}`` the operator is

    F_nu(f)(z) = int_{D^2} B_nu(z, zeta) conj(f(zeta)) nu(zeta) dV(zeta),

and rotation invariance of the bidisk leaves only the constant term, so
``F_nu(f) = conj(f(0))``. Pulled down to ``G`` this is ``F_G(g) = conj(g(0))``,
a rank-one operator. The uniform angular rules used here keep the discrete
rotation symmetry, so the vanishing terms cancel to roundoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import (BasisIndex, SymmetricBergmanElement, kernel_G, kernel_nu_factored,
                      nu_weight)
from .projector import DEFAULT_GRID
from .quadrature import BidiskRule, bidisk_rule

__all__ = ["SymmetricBergmanElement", "FriedrichsResult", "FriedrichsEvaluator",
           "friedrichs_nu", "coefficient_a10", "friedrichs_G", "linfty_bound_check",
           "random_element"]

VALUE_TOL = 1e-6
VARIATION_TOL = 1e-8


@dataclass(frozen=True)
class FriedrichsResult:
    value: complex
    variation: float
    values: np.ndarray
    expected: complex

    @property
    def rank_one_pass(self) -> bool:
        return abs(self.value - self.expected) < VALUE_TOL and self.variation < VARIATION_TOL

    def to_json(self) -> dict:
        return {"value": {"re": self.value.real, "im": self.value.imag},
                "expected": {"re": self.expected.real, "im": self.expected.imag},
                "variation": self.variation, "rank_one_pass": self.rank_one_pass}


class FriedrichsEvaluator:
    """Quadrature weights ``w B_nu(z, zeta) nu(zeta)`` precomputed per grid point."""

    def __init__(self, quad: BidiskRule | None = None, z_grid=DEFAULT_GRID):
        self.quad = quad if quad is not None else bidisk_rule(20, 40)
        self.z_grid = [(complex(a), complex(b)) for a, b in z_grid]
        self.zeta1, self.zeta2, w = self.quad.grid()
        nu_w = w * nu_weight(self.zeta1, self.zeta2)
        self.weights = np.stack([kernel_nu_factored(z, (self.zeta1, self.zeta2)) * nu_w
                                 for z in self.z_grid])

    def __call__(self, f) -> FriedrichsResult:
        values = self.weights @ np.conj(f(self.zeta1, self.zeta2))
        if not np.all(np.isfinite(values)):
            raise FloatingPointError("non-finite Friedrichs value")
        mean = complex(np.mean(values))
        variation = float(np.max(np.abs(values - mean)))
        return FriedrichsResult(mean, variation, values, complex(np.conj(coefficient_a10(f))))


def friedrichs_nu(f: SymmetricBergmanElement, quad: BidiskRule | None = None,
                  z_grid=DEFAULT_GRID) -> FriedrichsResult:
    """``F_nu(f)`` on ``z_grid``: the mean value and the spread around it."""
    return FriedrichsEvaluator(quad, z_grid)(f)


def coefficient_a10(f) -> complex:
    """``a_{1,0}``, read off as ``f(0)``: the (1,0) quotient is 1 and all others vanish at 0."""
    return complex(f(0.0, 0.0))


def friedrichs_G(g: SymmetricBergmanElement, check: bool = False,
                 quad: BidiskRule | None = None) -> complex:
    """``F_G(g) = conj(g(0))`` for ``g`` given through its pullback ``g∘Phi``.

    With ``check`` the value is compared against the quadrature of ``F_nu``.
    """
    value = complex(np.conj(coefficient_a10(g)))
    if check:
        res = friedrichs_nu(g, quad)
        if abs(res.value - value) > VALUE_TOL:
            raise ArithmeticError(f"quadrature {res.value} disagrees with {value}")
    return value


@dataclass(frozen=True)
class LinftyBound:
    linf: float
    l2: float
    ratio: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.ratio <= self.bound + 1e-6

    def to_json(self) -> dict:
        return {"linf": self.linf, "l2": self.l2, "ratio": self.ratio, "bound": self.bound,
                "holds": self.holds}


def linfty_bound_check(g: SymmetricBergmanElement,
                       quad: BidiskRule | None = None) -> LinftyBound:
    """``||F_G g||_inf / ||g||_{L^2(G)}`` against ``sqrt(K_G(0, 0))``.

    ``F_G g`` is the constant ``conj(g(0))`` and ``||g||^2 = 1/2 int |g∘Phi|^2 nu dV``
    because the symmetrization map is 2-to-1.
    """
    quad = quad if quad is not None else bidisk_rule(2 + g.max_degree, 4 + 2 * g.max_degree)
    z1, z2, w = quad.grid()
    l2 = math.sqrt(0.5 * float(np.sum(w * np.abs(g(z1, z2)) ** 2 * nu_weight(z1, z2))))
    linf = abs(coefficient_a10(g))
    ratio = linf / l2 if l2 > 0 else 0.0
    bound = math.sqrt(kernel_G((0.0, 0.0), (0.0, 0.0)).real)
    return LinftyBound(linf, l2, ratio, bound)


def random_element(rng: np.random.Generator, max_degree: int = 6,
                   density: float = 0.5) -> SymmetricBergmanElement:
    """Random finite combination of quotients with ``j + k <= max_degree``."""
    from .kernels import basis_indices

    coeffs: dict[BasisIndex, complex] = {}
    for idx in basis_indices(max_degree):
        if idx == BasisIndex(1, 0) or rng.uniform() < density:
            coeffs[idx] = complex(rng.normal(), rng.normal())
    return SymmetricBergmanElement(coeffs)
