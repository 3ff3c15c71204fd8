"""Membership predicates and canonical maps for the domains in play.

Every predicate tests the open set. Closures are queried through the
separate ``*_closure`` helpers, which take an explicit tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

CLOSURE_TOL = 1e-9


class RootFindingError(ArithmeticError):
    """The polynomial root finder could not certify its output."""


class CayleyPoleError(ZeroDivisionError):
    """Evaluation of the Cayley transform at its pole ``-i``."""


def _finite(*zs) -> None:
    for z in zs:
        if not np.all(np.isfinite(z)):
            raise ValueError("non-finite coordinate")


def in_unit_disk(z: complex) -> bool:
    _finite(z)
    return abs(z) < 1.0


def in_upper_halfplane(z: complex) -> bool:
    _finite(z)
    return complex(z).imag > 0.0


def cayley(z):
    """The Cayley transform ``(i - z) / (i + z)``, mapping U onto D."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == -1j):
        raise CayleyPoleError("Cayley transform evaluated at -i")
    out = (1j - z) / (1j + z)
    return out[()] if out.ndim == 0 else out


def cayley_inverse(w):
    """Inverse Cayley transform ``i (1 - w) / (1 + w)``."""
    w = np.asarray(w, dtype=complex)
    out = 1j * (1.0 - w) / (1.0 + w)
    return out[()] if out.ndim == 0 else out


def cayley_derivative(z):
    """Complex derivative ``-2i / (i + z)**2`` of the Cayley transform."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == -1j):
        raise CayleyPoleError("Cayley derivative evaluated at -i")
    out = -2j / (1j + z) ** 2
    return out[()] if out.ndim == 0 else out


# -- polynomial roots -------------------------------------------------------

@dataclass(frozen=True)
class RootSet:
    """Roots of a monic polynomial with their multiplicities."""

    roots: np.ndarray          # each root repeated according to multiplicity
    distinct: np.ndarray
    multiplicities: tuple[int, ...]
    residual: float


def _polyder_n(coeffs: np.ndarray, k: int) -> np.ndarray:
    for _ in range(k):
        coeffs = np.polyder(coeffs)
    return coeffs


def _newton(coeffs: np.ndarray, z: complex, iters: int = 8) -> complex:
    d = np.polyder(coeffs)
    best, best_res = z, abs(np.polyval(coeffs, z))
    for _ in range(iters):
        dv = np.polyval(d, z)
        if dv == 0:
            break
        z = z - np.polyval(coeffs, z) / dv
        res = abs(np.polyval(coeffs, z))
        if res < best_res:
            best, best_res = z, res
        if res == 0.0:
            break
    return best


def _clusters(points: np.ndarray, radius: float) -> list[np.ndarray]:
    """Single-linkage clusters of ``points`` at the given (relative) radius."""
    n = points.size
    labels = np.arange(n)
    for i in range(n):
        for j in range(i + 1, n):
            if abs(points[i] - points[j]) < radius * max(1.0, abs(points[i])):
                labels[labels == labels[j]] = labels[i]
    return [points[labels == lab] for lab in np.unique(labels)]


def _is_multiple_root(c: np.ndarray, centre: complex, m: int) -> bool:
    n = c.size - 1
    scale = np.sum(np.abs(c)) * max(1.0, abs(centre)) ** n
    for k in range(m):
        bound = 64.0 * np.finfo(float).eps * scale * math.factorial(n) / math.factorial(n - k)
        if abs(np.polyval(_polyder_n(c, k), centre)) > max(bound, 1e-13):
            return False
    return True


def _resolve(c: np.ndarray, members: np.ndarray, radius: float, out: list) -> None:
    m = members.size
    if m == 1:
        out.append((members[0], 1))
        return
    centre = _newton(_polyder_n(c, m - 1), members.mean())
    if _is_multiple_root(c, centre, m):
        out.append((centre, m))
        return
    if radius < 1e-8:
        out.extend((z, 1) for z in members)
        return
    for sub in _clusters(members, radius / 10.0):
        _resolve(c, sub, radius / 10.0, out)


def polynomial_roots(coeffs, cluster_tol: float = 5e-2, tol: float = 1e-10) -> RootSet:
    """Roots of the polynomial with coefficients ``coeffs`` (highest first).

    Companion-matrix eigenvalues are polished by Newton's method. Nearby
    roots are grouped and each group is tested as a single multiple root
    (all derivatives below the multiplicity vanish at the refined mean); a
    confirmed group is replaced by that mean, which is far more accurate than
    the individual eigenvalues of a multiple root. Groups that fail the test
    are split at a ten times smaller radius until they resolve.

    Raises
    ------
    RootFindingError
        If a root cannot be brought to a small backward residual.
    """
    c = np.asarray(coeffs, dtype=complex)
    c = np.trim_zeros(c, "f")
    if c.size < 2:
        raise ValueError("polynomial must have degree >= 1")
    c = c / c[0]
    n = c.size - 1
    if n == 1:
        r = np.array([-c[1]])
        return RootSet(r, r.copy(), (1,), 0.0)
    raw = np.roots(c)
    if raw.size != n or not np.all(np.isfinite(raw)):
        raise RootFindingError("eigenvalue solver failed")
    polished = np.array([_newton(c, z) for z in raw])

    found: list = []
    for group in _clusters(polished, cluster_tol):
        _resolve(c, group, cluster_tol, found)
    distinct = np.array([z for z, _ in found])
    mults = [m for _, m in found]
    roots = np.repeat(distinct, mults)
    residual = float(np.max(np.abs(np.polyval(c, roots))))
    scale = np.sum(np.abs(c))
    bound = max(tol, 1e3 * np.finfo(float).eps * scale) * max(1.0, float(np.max(np.abs(roots)))) ** n
    if residual > bound:
        raise RootFindingError(f"root residual {residual:.3e} exceeds {bound:.3e}")
    order = np.lexsort((distinct.imag, distinct.real))
    distinct = distinct[order]
    mults = tuple(int(mults[i]) for i in order)
    return RootSet(np.repeat(distinct, mults), distinct, mults, residual)


def symmetrized_polynomial(s) -> np.ndarray:
    """Coefficients of ``w^n - p1 w^(n-1) + p2 w^(n-2) - ... + (-1)^n pn``."""
    s = np.asarray(s, dtype=complex).ravel()
    signs = (-1.0) ** np.arange(1, s.size + 1)
    return np.concatenate([[1.0 + 0j], signs * s])


def symmetrized_roots(s) -> RootSet:
    s = np.asarray(s, dtype=complex).ravel()
    _finite(s)
    if s.size < 1:
        raise ValueError("need n >= 1 coordinates")
    return polynomial_roots(symmetrized_polynomial(s))


def in_symmetrized_polydisk(s) -> bool:
    """Whether ``s = (p1, ..., pn)`` lies in the open symmetrized polydisk."""
    return bool(np.max(np.abs(symmetrized_roots(s).roots)) < 1.0)


def in_symmetrized_polydisk_closure(s, tol: float = CLOSURE_TOL) -> bool:
    return bool(np.max(np.abs(symmetrized_roots(s).roots)) <= 1.0 + tol)


def in_polydisk(w) -> bool:
    w = np.asarray(w, dtype=complex)
    _finite(w)
    return bool(np.all(np.abs(w) < 1.0))


def in_hartogs_triangle(z1: complex, z2: complex, gamma: float) -> bool:
    """``|z1|**gamma < |z2| < 1``."""
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    _finite(z1, z2)
    return abs(z1) ** gamma < abs(z2) < 1.0


def in_hartogs_triangle_closure(z1: complex, z2: complex, gamma: float,
                                tol: float = CLOSURE_TOL) -> bool:
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    _finite(z1, z2)
    return abs(z1) ** gamma <= abs(z2) + tol and abs(z2) <= 1.0 + tol
