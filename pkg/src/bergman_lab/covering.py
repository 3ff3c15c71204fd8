"""Rational proper covering maps, their Jacobians, fibers and weight factors.

Three map families are supported:

* ``Symmetrization(n)``: ``w -> (p1(w), ..., pn(w))``, the elementary
  symmetric polynomials, from the polydisk onto the symmetrized polydisk;
* ``Hartogs(m, n)``: ``(w1, w2) -> (w1 * w2**n, w2**m)`` from ``D x D*`` onto
  the Hartogs triangle with exponent ``m / n``;
* ``CayleyProduct(n)``: the coordinatewise Cayley transform ``U^n -> D^n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .domains import cayley, cayley_derivative, symmetrized_roots


@dataclass(frozen=True)
class CoveringMap:
    kind: str
    n: int
    m: int | None = None

    def __post_init__(self):
        if self.kind not in ("symmetrization", "hartogs", "cayley"):
            raise ValueError(f"unknown covering kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.kind == "hartogs":
            if self.m is None or self.m < 1:
                raise ValueError("Hartogs cover needs positive m")
            if math.gcd(self.m, self.n) != 1:
                raise ValueError("Hartogs cover needs gcd(m, n) = 1")

    @property
    def dim(self) -> int:
        return 2 if self.kind == "hartogs" else self.n

    @property
    def label(self) -> str:
        if self.kind == "hartogs":
            return f"Hartogs({self.m},{self.n})"
        return f"{'Symmetrization' if self.kind == 'symmetrization' else 'CayleyProduct'}({self.n})"

    def __call__(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=complex)
        if self.kind == "symmetrization":
            return symmetrize(w)
        if self.kind == "hartogs":
            return np.array(hartogs_cover(w[0], w[1], self.m, self.n, check=False))
        return cayley(w)


def Symmetrization(n: int) -> CoveringMap:
    return CoveringMap("symmetrization", n)


def Hartogs(m: int, n: int) -> CoveringMap:
    return CoveringMap("hartogs", n, m)


def CayleyProduct(n: int) -> CoveringMap:
    return CoveringMap("cayley", n)


def symmetrize(w) -> np.ndarray:
    """Elementary symmetric polynomials ``(p1, ..., pn)`` of ``w``.

    Expands ``prod_j (t + w_j)`` one factor at a time; the coefficient of
    ``t**(n-k)`` is ``p_k``.
    """
    w = np.asarray(w, dtype=complex).ravel()
    coeffs = np.zeros(w.size + 1, dtype=complex)
    coeffs[0] = 1.0
    for k, wj in enumerate(w, start=1):
        coeffs[1:k + 1] = coeffs[1:k + 1] + wj * coeffs[0:k]
    return coeffs[1:]


def vandermonde_jacobian(w) -> complex:
    """Complex Jacobian ``prod_{j<k} (w_j - w_k)`` of the symmetrization map."""
    w = np.asarray(w, dtype=complex).ravel()
    out = 1.0 + 0j
    for j in range(w.size):
        for k in range(j + 1, w.size):
            out *= w[j] - w[k]
    return out


@dataclass(frozen=True)
class NumericJacobian:
    det: complex
    matrix: np.ndarray
    condition: float
    warnings: tuple[str, ...] = ()


def numeric_jacobian_det(cmap: CoveringMap, w, h: float = 1e-5) -> NumericJacobian:
    """Determinant of the central-difference complex Jacobian of ``cmap`` at ``w``.

    For a holomorphic map the complex partial derivative equals the real
    directional derivative along each coordinate axis.
    """
    if not 1e-7 <= h <= 1e-3:
        raise ValueError("step h must lie in [1e-7, 1e-3]")
    w = np.asarray(w, dtype=complex).ravel()
    d = w.size
    J = np.empty((d, d), dtype=complex)
    for k in range(d):
        e = np.zeros(d, dtype=complex)
        e[k] = h
        J[:, k] = (cmap(w + e) - cmap(w - e)) / (2.0 * h)
    det = complex(np.linalg.det(J))
    cond = float(np.linalg.cond(J))
    notes = []
    if not np.isfinite(cond) or cond > 1e10:
        notes.append("ill-conditioned Jacobian")
    if det == 0:
        notes.append("singular Jacobian")
    return NumericJacobian(det, J, cond, tuple(notes))


def hartogs_cover(w1: complex, w2: complex, m: int, n: int, check: bool = True):
    """``(w1 * w2**n, w2**m)``, a proper cover of the Hartogs triangle ``H^{m/n}``."""
    if check:
        if math.gcd(m, n) != 1:
            raise ValueError("gcd(m, n) must be 1")
        if w2 == 0:
            raise ValueError("w2 = 0 is not in the punctured disk")
    return w1 * w2 ** n, w2 ** m


def hartogs_jacobian(w1: complex, w2: complex, m: int, n: int) -> complex:
    return m * w2 ** (n + m - 1)


@dataclass(frozen=True)
class Fiber:
    roots: np.ndarray
    multiplicities: tuple[int, ...]
    cardinality: int


def fiber_of_symmetrization(s) -> Fiber:
    """Root multiset of ``w^n - p1 w^(n-1) + ... + (-1)^n pn``.

    The fiber is every ordering of the roots, so its cardinality is
    ``n! / prod(m_i!)`` over the root multiplicities ``m_i``.
    """
    rs = symmetrized_roots(s)
    n = rs.roots.size
    card = math.factorial(n)
    for m in rs.multiplicities:
        card //= math.factorial(m)
    return Fiber(rs.roots, rs.multiplicities, card)


# -- weight factorisation on U^n ---------------------------------------------

@dataclass(frozen=True)
class FactorSpec:
    """A factor ``(z_j - center)**multiplicity`` of the pulled-back Jacobian.

    ``center`` is one of ``("cayley_pole",)`` (= -i), ``("cayley_zero",)``
    (= +i), ``("constant", w)`` or ``("other_variable", k)``; variables are
    numbered from 1.
    """

    variable_index: int
    center: tuple
    multiplicity: int

    def __post_init__(self):
        if self.multiplicity == 0:
            raise ValueError("multiplicity must be nonzero")
        if self.variable_index < 1:
            raise ValueError("variable index starts at 1")

    @property
    def is_pole(self) -> bool:
        return self.multiplicity < 0

    def center_value(self, z) -> complex:
        tag = self.center[0]
        if tag == "cayley_pole":
            return -1j
        if tag == "cayley_zero":
            return 1j
        if tag == "constant":
            return complex(self.center[1])
        if tag == "other_variable":
            return complex(z[self.center[1] - 1])
        raise ValueError(f"unknown centre tag {tag!r}")

    def to_json(self) -> dict:
        tag = self.center[0]
        center: dict = {"kind": tag}
        if tag == "constant":
            c = complex(self.center[1])
            center["value"] = {"re": c.real, "im": c.imag}
        elif tag == "other_variable":
            center["variable"] = self.center[1]
        else:
            center["value"] = {"re": 0.0, "im": -1.0 if tag == "cayley_pole" else 1.0}
        return {"center": center, "multiplicity": self.multiplicity}


@dataclass(frozen=True)
class WeightFactorization:
    """Per-variable factors of ``Q = J(Psi) * (J(Phi) o Psi)`` on ``U^n``."""

    cmap: CoveringMap
    variables: dict[int, tuple[FactorSpec, ...]]
    constant: float | None = field(default=None, compare=False)

    def exponents(self, j: int) -> tuple[list[int], list[int]]:
        """Zero multiplicities and pole multiplicities seen by variable ``j``."""
        zeros = [f.multiplicity for f in self.variables[j] if not f.is_pole]
        poles = [-f.multiplicity for f in self.variables[j] if f.is_pole]
        return zeros, poles

    def distinct_factors(self) -> list[FactorSpec]:
        seen, out = set(), []
        for j, facs in self.variables.items():
            for f in facs:
                if f.center[0] == "other_variable":
                    key = ("pair", frozenset((j, f.center[1])))
                else:
                    key = (j, f.center)
                if key not in seen:
                    seen.add(key)
                    out.append(f)
        return out

    def abs_factored(self, z) -> float:
        """``prod |z_j - center|**multiplicity`` over the distinct factors."""
        z = np.asarray(z, dtype=complex).ravel()
        val = 1.0
        for f in self.distinct_factors():
            val *= abs(z[f.variable_index - 1] - f.center_value(z)) ** f.multiplicity
        return val

    def to_json(self) -> dict:
        return {
            "map": self.cmap.label,
            "variables": {f"z{j}": [f.to_json() for f in facs]
                          for j, facs in sorted(self.variables.items())},
            "constant": self.constant,
        }


def q_weight(cmap: CoveringMap, z) -> complex:
    """``Q(z) = J(Psi)(z) * J(Phi)(Psi(z))`` evaluated directly."""
    z = np.asarray(z, dtype=complex).ravel()
    w = cayley(z)
    jpsi = np.prod(cayley_derivative(z))
    if cmap.kind == "symmetrization":
        return jpsi * vandermonde_jacobian(w)
    if cmap.kind == "hartogs":
        return jpsi * hartogs_jacobian(w[0], w[1], cmap.m, cmap.n)
    raise ValueError(f"no weight factorisation for {cmap.label}")


def q_weight_factorization(cmap: CoveringMap, sample_constant: bool = True,
                           seed: int = 0) -> WeightFactorization:
    """Zeros and poles of ``Q`` in each variable, centres kept symbolic.

    For the symmetrization map every variable sees simple zeros at the other
    variables and a pole of order ``n + 1`` at ``-i``. For the Hartogs cover
    ``J(Phi) = m * w2**(n+m-1)``; composing with the Cayley transform puts a
    pole of order 2 at ``-i`` in ``z1`` and, in ``z2``, a zero of order
    ``n + m - 1`` at ``+i`` with a pole of order ``n + m + 1`` at ``-i``.

    With ``sample_constant`` the modulus of the omitted constant is estimated
    as ``|Q| / prod|factors|`` at one random point of ``U^n``.
    """
    variables: dict[int, tuple[FactorSpec, ...]] = {}
    if cmap.kind == "symmetrization":
        n = cmap.n
        for j in range(1, n + 1):
            facs = [FactorSpec(j, ("other_variable", k), 1) for k in range(1, n + 1) if k != j]
            facs.append(FactorSpec(j, ("cayley_pole",), -(n + 1)))
            variables[j] = tuple(facs)
    elif cmap.kind == "hartogs":
        m, n = cmap.m, cmap.n
        variables[1] = (FactorSpec(1, ("cayley_pole",), -2),)
        variables[2] = (FactorSpec(2, ("cayley_zero",), n + m - 1),
                        FactorSpec(2, ("cayley_pole",), -(n + m + 1)))
    else:
        raise ValueError(f"no weight factorisation for {cmap.label}")
    fac = WeightFactorization(cmap, variables)
    if not sample_constant:
        return fac
    rng = np.random.default_rng(seed)
    z = rng.uniform(-2, 2, cmap.dim) + 1j * rng.uniform(0.2, 2, cmap.dim)
    const = abs(q_weight(cmap, z)) / fac.abs_factored(z)
    return WeightFactorization(cmap, variables, float(const))


def multiplicity_summary(fac: WeightFactorization) -> dict[int, dict[str, list[int]]]:
    out = {}
    for j in fac.variables:
        zeros, poles = fac.exponents(j)
        out[j] = {"zeros": zeros, "poles": poles}
    return out

