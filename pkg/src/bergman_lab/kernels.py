"""Bergman kernels of the disk, the upper half-plane, the bidisk and of the
symmetric subspace ``A^2(D^2, nu) ∩ {f = f∘tau}`` with ``nu = |z1 - z2|^2``.

The symmetric space has the orthonormal basis

    e_{jk}(z) = sqrt((k+1)(j+1) / (2 pi^2)) * (z1^j z2^k - z1^k z2^j) / (z1 - z2),  j > k >= 0,

and its kernel ``B_nu`` has a closed form with a removable singularity on
the diagonals ``z1 = z2`` and ``zeta1 = zeta2``. The quotient is evaluated as
``(z1 z2)^k h_{j-k-1}(z1, z2)`` with ``h_d`` the complete homogeneous
polynomial of degree ``d``, which is finite everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .domains import cayley, cayley_derivative, in_symmetrized_polydisk, symmetrized_roots
from .quadrature import BidiskRule, bidisk_rule

PI2 = math.pi ** 2
DIAGONAL_TOL = 1e-6
SERIES_DEGREE = 60


# -- classical kernels -----------------------------------------------------

def kernel_disk(z, w):
    """``1 / (pi (1 - z conj(w))^2)``."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return 1.0 / (np.pi * (1.0 - z * np.conj(w)) ** 2)


def kernel_disk_truncated(z, w, M: int):
    """``sum_{n<M} (n+1) (z conj(w))^n / pi``, the disk kernel cut at degree ``M``.

    Paired with a polar rule that integrates ``|zeta|^(2n)`` exactly for
    ``n < M``, this kernel makes the discrete projection an exact orthogonal
    projection onto polynomials of degree ``< M``.
    """
    x = np.asarray(z, dtype=complex) * np.conj(np.asarray(w, dtype=complex))
    with np.errstate(divide="ignore", invalid="ignore"):
        xm = x ** M
        out = (1.0 - (M + 1) * xm + M * xm * x) / (1.0 - x) ** 2
    close = np.abs(1.0 - x) < 0.25
    if np.any(close):
        xc = x[close]
        acc = np.full(xc.shape, float(M), dtype=complex)
        for n in range(M - 1, 0, -1):
            acc = acc * xc + n
        out[close] = acc
    return out / np.pi


def kernel_halfplane(z, w):
    """``-1 / (pi (z - conj(w))^2)``."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return -1.0 / (np.pi * (z - np.conj(w)) ** 2)


def kernel_halfplane_via_cayley(z, w):
    """Half-plane kernel pulled back from the disk through the Cayley map."""
    return (cayley_derivative(z) * kernel_disk(cayley(z), cayley(w))
            * np.conj(cayley_derivative(w)))


def kernel_bidisk(z1, z2, w1, w2):
    return kernel_disk(z1, w1) * kernel_disk(z2, w2)


# -- the symmetric basis ----------------------------------------------------

@dataclass(frozen=True, order=True)
class BasisIndex:
    j: int
    k: int

    def __post_init__(self):
        if not (self.j > self.k >= 0):
            raise ValueError(f"need j > k >= 0, got ({self.j}, {self.k})")

    @property
    def degree(self) -> int:
        return self.j + self.k

    @property
    def norm_sq(self) -> float:
        """``int_{D^2} |z1^j z2^k - z1^k z2^j|^2 dV``."""
        return 2.0 * PI2 / ((self.k + 1) * (self.j + 1))

    @property
    def scale(self) -> float:
        return math.sqrt((self.k + 1) * (self.j + 1) / (2.0 * PI2))


def basis_indices(max_degree: int) -> list[BasisIndex]:
    """All ``(j, k)`` with ``j > k >= 0`` and ``j + k <= max_degree``."""
    return [BasisIndex(j, k) for j in range(1, max_degree + 1)
            for k in range(j) if j + k <= max_degree]


def _as_index(idx) -> BasisIndex:
    return idx if isinstance(idx, BasisIndex) else BasisIndex(*idx)


def complete_homogeneous(d: int, z1, z2):
    """``sum_{t=0}^{d} z1^t z2^(d-t)``."""
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    h = np.ones(np.broadcast(z1, z2).shape, dtype=complex)
    p2 = np.ones_like(h)
    for _ in range(d):
        p2 = p2 * z2
        h = z1 * h + p2
    return h


def basis_quotient(idx, z1, z2):
    """``(z1^j z2^k - z1^k z2^j) / (z1 - z2)``, finite on the diagonal."""
    idx = _as_index(idx)
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    return (z1 * z2) ** idx.k * complete_homogeneous(idx.j - idx.k - 1, z1, z2)


def basis_nu(idx, z1, z2):
    """Orthonormal basis element ``e_{jk}`` at ``(z1, z2)``."""
    idx = _as_index(idx)
    return idx.scale * basis_quotient(idx, z1, z2)


def basis_norm_integral(idx, quad: BidiskRule | None = None) -> float:
    """Quadrature value of ``int_{D^2} |z1^j z2^k - z1^k z2^j|^2 dV``.

    The default rule integrates polynomials of this degree exactly.
    """
    idx = _as_index(idx)
    if quad is None:
        quad = bidisk_rule(radial=idx.j + 2, angular=2 * idx.j + 2)
    j, k = idx.j, idx.k
    val = quad.integrate(lambda a, b: np.abs(a ** j * b ** k - a ** k * b ** j) ** 2)
    return float(np.real(val))


def nu_weight(z1, z2):
    """``|z1 - z2|^2``, written out term by term."""
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    return np.real(z1 * np.conj(z1) - np.conj(z1) * z2 - z1 * np.conj(z2) + z2 * np.conj(z2))


# -- the kernel B_nu --------------------------------------------------------

def _series_tables(z1, z2, N: int):
    """Rows ``(z1 z2)^k`` for ``k <= N/2`` and ``h_d`` for ``d < N``."""
    z1 = np.atleast_1d(np.asarray(z1, dtype=complex))
    z2 = np.atleast_1d(np.asarray(z2, dtype=complex))
    K = N // 2 + 1
    prod = z1 * z2
    P = np.empty(z1.shape + (K,), dtype=complex)
    P[..., 0] = 1.0
    for k in range(1, K):
        P[..., k] = P[..., k - 1] * prod
    H = np.empty(z1.shape + (max(N, 1),), dtype=complex)
    H[..., 0] = 1.0
    p2 = np.ones_like(z2)
    for d in range(1, N):
        p2 = p2 * z2
        H[..., d] = z1 * H[..., d - 1] + p2
    return P, H


def _series_coefficients(N: int) -> np.ndarray:
    """``c[k, d] = (k+1)(j+1) / (2 pi^2)`` with ``j = k + d + 1`` and ``j + k <= N``."""
    K = N // 2 + 1
    k = np.arange(K)[:, None]
    d = np.arange(max(N, 1))[None, :]
    j = k + d + 1
    return np.where(j + k <= N, (k + 1) * (j + 1) / (2.0 * PI2), 0.0)


def kernel_nu_series(z, zeta, N: int = SERIES_DEGREE):
    """Partial sum of ``sum e_{jk}(z) conj(e_{jk}(zeta))`` over ``j + k <= N``.

    ``z`` and ``zeta`` are pairs ``(z1, z2)`` of scalars or equal-shape arrays.
    """
    if N < 1:
        raise ValueError("truncation degree must be >= 1")
    z1, z2 = (np.asarray(c, dtype=complex) for c in z)
    w1, w2 = (np.asarray(c, dtype=complex) for c in zeta)
    shape = np.broadcast(z1, z2, w1, w2).shape
    z1, z2, w1, w2 = (np.broadcast_to(c, shape).ravel() for c in (z1, z2, w1, w2))
    Pz, Hz = _series_tables(z1, z2, N)
    Pw, Hw = _series_tables(w1, w2, N)
    C = _series_coefficients(N)
    out = np.einsum("pk,kd,pd->p", Pz * np.conj(Pw), C, Hz * np.conj(Hw))
    out = out.reshape(shape)
    return out[()] if out.ndim == 0 else out


def kernel_nu_closed(z, zeta, N: int = SERIES_DEGREE, tol: float = DIAGONAL_TOL):
    """Closed form of ``B_nu``; the series (degree ``N``) is used within ``tol``
    of either diagonal."""
    z1, z2 = (np.asarray(c, dtype=complex) for c in z)
    w1, w2 = (np.asarray(c, dtype=complex) for c in zeta)
    shape = np.broadcast(z1, z2, w1, w2).shape
    z1, z2, w1, w2 = (np.broadcast_to(c, shape).ravel() for c in (z1, z2, w1, w2))
    near = (np.abs(z1 - z2) < tol) | (np.abs(w1 - w2) < tol)
    out = np.empty(z1.shape, dtype=complex)
    far = ~near
    if np.any(far):
        a, b, c, d = z1[far], z2[far], np.conj(w1[far]), np.conj(w2[far])
        bracket = (1.0 / ((1 - a * c) ** 2 * (1 - b * d) ** 2)
                   - 1.0 / ((1 - a * d) ** 2 * (1 - b * c) ** 2))
        out[far] = bracket / (2.0 * PI2 * (a - b) * (c - d))
    if np.any(near):
        out[near] = kernel_nu_series((z1[near], z2[near]), (w1[near], w2[near]), N)
    out = out.reshape(shape)
    return out[()] if out.ndim == 0 else out


def kernel_nu_factored(z, zeta):
    """``B_nu`` with the diagonal factor cancelled.

    Writing ``a = 1 - z1 conj(zeta1)``, ``b = 1 - z2 conj(zeta2)``,
    ``c = 1 - z1 conj(zeta2)``, ``d = 1 - z2 conj(zeta1)`` one has
    ``cd - ab = (z1 - z2) conj(zeta1 - zeta2)``, hence
    ``B_nu = (ab + cd) / (2 pi^2 (abcd)^2)``, smooth on all of ``D^2 x D^2``.
    """
    z1, z2 = (np.asarray(c, dtype=complex) for c in z)
    w1, w2 = (np.asarray(c, dtype=complex) for c in zeta)
    a = 1 - z1 * np.conj(w1)
    b = 1 - z2 * np.conj(w2)
    c = 1 - z1 * np.conj(w2)
    d = 1 - z2 * np.conj(w1)
    return (a * b + c * d) / (2.0 * PI2 * (a * b * c * d) ** 2)


@dataclass(frozen=True)
class KernelComparison:
    z: tuple[complex, complex]
    zeta: tuple[complex, complex]
    series_value: complex
    closed_value: complex
    truncation_degree: int

    @property
    def abs_error(self) -> float:
        return abs(self.series_value - self.closed_value)


def compare_kernels(n_pairs: int = 1000, radius: float = 0.5, N: int = SERIES_DEGREE,
                    seed: int = 0) -> list[KernelComparison]:
    """Series against closed form at random pairs with coordinates in ``|.| <= radius``."""
    rng = np.random.default_rng(seed)
    r = radius * np.sqrt(rng.uniform(0, 1, (4, n_pairs)))
    pts = r * np.exp(2j * np.pi * rng.uniform(0, 1, (4, n_pairs)))
    series = kernel_nu_series((pts[0], pts[1]), (pts[2], pts[3]), N)
    closed = kernel_nu_closed((pts[0], pts[1]), (pts[2], pts[3]), N)
    return [KernelComparison((complex(pts[0, i]), complex(pts[1, i])),
                             (complex(pts[2, i]), complex(pts[3, i])),
                             complex(series[i]), complex(closed[i]), N)
            for i in range(n_pairs)]


# -- symmetric elements and reproduction -------------------------------------

@dataclass
class SymmetricBergmanElement:
    """``f(z) = sum a_{jk} (z1^j z2^k - z1^k z2^j) / (z1 - z2)``, finitely supported.

    Coefficients multiply the unnormalised quotients, so ``f(0) = a_{1,0}``.
    """

    coefficients: dict[BasisIndex, complex] = field(default_factory=dict)

    def __post_init__(self):
        self.coefficients = {_as_index(i): complex(a) for i, a in self.coefficients.items()}

    @classmethod
    def from_orthonormal(cls, coeffs: dict) -> "SymmetricBergmanElement":
        """Element ``sum c_{jk} e_{jk}`` given in the orthonormal basis."""
        return cls({_as_index(i): c * _as_index(i).scale for i, c in coeffs.items()})

    def __call__(self, z1, z2):
        z1 = np.asarray(z1, dtype=complex)
        z2 = np.asarray(z2, dtype=complex)
        out = np.zeros(np.broadcast(z1, z2).shape, dtype=complex)
        for idx, a in self.coefficients.items():
            out = out + a * basis_quotient(idx, z1, z2)
        return out[()] if out.ndim == 0 else out

    def __add__(self, other: "SymmetricBergmanElement") -> "SymmetricBergmanElement":
        out = dict(self.coefficients)
        for i, a in other.coefficients.items():
            out[i] = out.get(i, 0j) + a
        return SymmetricBergmanElement(out)

    def __rmul__(self, c: complex) -> "SymmetricBergmanElement":
        return SymmetricBergmanElement({i: c * a for i, a in self.coefficients.items()})

    @property
    def max_degree(self) -> int:
        return max((i.degree for i in self.coefficients), default=0)

    def norm_sq(self) -> float:
        """``||f||^2`` in ``L^2(D^2, nu)`` from orthonormality."""
        return float(sum(abs(a / i.scale) ** 2 for i, a in self.coefficients.items()))

    def to_json(self) -> dict:
        return {f"({i.j},{i.k})": {"re": a.real, "im": a.imag}
                for i, a in sorted(self.coefficients.items())}


def reproducing_check(f, z: tuple[complex, complex], quad: BidiskRule | None = None,
                      kernel=kernel_nu_factored) -> float:
    """``|int B_nu(z, .) f nu dV - f(z)|`` by quadrature over the bidisk."""
    if quad is None:
        quad = bidisk_rule(radial=24, angular=48)
    z1, z2 = complex(z[0]), complex(z[1])
    val = quad.integrate(lambda a, b: kernel((z1, z2), (a, b)) * f(a, b) * nu_weight(a, b))
    return float(abs(val - f(z1, z2)))


def fiber_representative(s) -> tuple[complex, complex]:
    """A point ``(z1, z2)`` of ``D^2`` with ``(z1 + z2, z1 z2) = s``."""
    if not in_symmetrized_polydisk(s):
        raise ValueError(f"{s!r} is not in the symmetrized bidisk")
    roots = symmetrized_roots(s).roots
    if roots.size != 2:
        raise ValueError("kernel_G is implemented for n = 2 only")
    return complex(roots[0]), complex(roots[1])


def kernel_G(s, t, swap: bool = False) -> complex:
    """Bergman kernel of the symmetrized bidisk, ``2 B_nu(z, zeta)`` on fiber points."""
    z = fiber_representative(s)
    zeta = fiber_representative(t)
    if swap:
        z = z[::-1]
    return complex(2.0 * kernel_nu_closed(z, zeta))
