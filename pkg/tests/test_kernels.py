from __future__ import annotations

import math

import numpy as np
import pytest

from bergman_lab import kernels as kn
from bergman_lab.covering import symmetrize
from bergman_lab.quadrature import bidisk_rule

PI2 = math.pi ** 2


def _disk_points(rng, size, radius=0.9):
    return radius * np.sqrt(rng.uniform(0, 1, size)) * np.exp(2j * np.pi * rng.uniform(0, 1, size))


def _half_plane_points(rng, size):
    return rng.uniform(-5, 5, size) + 1j * rng.uniform(0.01, 5, size)


# -- classical kernels -----------------------------------------------------------

def test_disk_kernel_values():
    assert kn.kernel_disk(0, 0) == pytest.approx(1 / math.pi)
    assert kn.kernel_disk(0.5, 0.5) == pytest.approx(1 / (math.pi * 0.75 ** 2))


def test_truncated_disk_kernel_matches_partial_sum(rng):
    z, w = _disk_points(rng, 200), _disk_points(rng, 200)
    M = 17
    direct = sum((n + 1) * (z * np.conj(w)) ** n for n in range(M)) / math.pi
    assert np.max(np.abs(kn.kernel_disk_truncated(z, w, M) - direct)) < 1e-11
    # near x = 1 the Horner branch is used
    z = np.array([0.99, 0.95 + 0.05j])
    direct = sum((n + 1) * (z * np.conj(z)) ** n for n in range(M)) / math.pi
    assert np.allclose(kn.kernel_disk_truncated(z, z, M), direct, rtol=1e-12)


def test_halfplane_kernel_values(rng):
    assert kn.kernel_halfplane(1j, 1j) == pytest.approx(1 / (4 * math.pi))
    z, w = _half_plane_points(rng, 500), _half_plane_points(rng, 500)
    a = kn.kernel_halfplane(z, w)
    b = kn.kernel_halfplane_via_cayley(z, w)
    assert np.max(np.abs(a - b) / np.abs(a)) < 1e-10


@pytest.mark.parametrize("kernel, sampler", [
    (kn.kernel_disk, _disk_points), (kn.kernel_halfplane, _half_plane_points)])
def test_classical_kernels_hermitian(rng, kernel, sampler):
    z, w = sampler(rng, 1000), sampler(rng, 1000)
    a, b = kernel(z, w), np.conj(kernel(w, z))
    assert np.max(np.abs(a - b) / np.abs(a)) < 1e-12


def test_bidisk_kernel_is_product():
    assert kn.kernel_bidisk(0, 0, 0, 0) == pytest.approx(1 / PI2)


# -- basis ----------------------------------------------------------------------

def test_basis_index_validation():
    with pytest.raises(ValueError):
        kn.BasisIndex(1, 1)
    assert len(kn.basis_indices(6)) == 12


def test_basis_examples(rng):
    z1, z2 = _disk_points(rng, 10), _disk_points(rng, 10)
    assert np.allclose(kn.basis_nu((1, 0), z1, z2), 1 / math.pi)
    a = 0.3 - 0.4j
    assert kn.basis_nu((2, 0), a, a) == pytest.approx(math.sqrt(3 / (2 * PI2)) * 2 * a)


def test_basis_quotient_matches_division(rng):
    z1, z2 = _disk_points(rng, 100), _disk_points(rng, 100)
    for idx in kn.basis_indices(8):
        j, k = idx.j, idx.k
        direct = (z1 ** j * z2 ** k - z1 ** k * z2 ** j) / (z1 - z2)
        assert np.allclose(kn.basis_quotient(idx, z1, z2), direct, atol=1e-12)


def test_basis_tau_invariant(rng):
    z1, z2 = _disk_points(rng, 100), _disk_points(rng, 100)
    for idx in kn.basis_indices(8):
        assert np.max(np.abs(kn.basis_nu(idx, z1, z2) - kn.basis_nu(idx, z2, z1))) < 1e-12


@pytest.mark.parametrize("idx, expected", [((1, 0), PI2), ((2, 1), 2 * PI2 / 6),
                                           ((3, 0), 2 * PI2 / 4)])
def test_basis_norm_examples(idx, expected):
    assert kn.basis_norm_integral(idx) == pytest.approx(expected, rel=1e-12)


def test_gram_matrix_is_identity():
    # j + k <= 6 gives degree <= 5 per variable; with nu this rule is exact
    idx = kn.basis_indices(6)
    z1, z2, w = bidisk_rule(10, 20).grid()
    E = np.stack([kn.basis_nu(i, z1, z2) for i in idx])
    G = (E * (w * kn.nu_weight(z1, z2))) @ E.conj().T
    assert np.max(np.abs(G - np.eye(len(idx)))) < 1e-6


def test_nu_weight_expanded_form(rng):
    z1, z2 = _disk_points(rng, 100), _disk_points(rng, 100)
    assert np.allclose(kn.nu_weight(z1, z2), np.abs(z1 - z2) ** 2, atol=1e-15)


# -- B_nu -----------------------------------------------------------------------

def test_series_at_origin():
    for N in (1, 2, 10, 60):
        assert kn.kernel_nu_series((0, 0), (0, 0), N) == pytest.approx(1 / PI2)
    assert kn.kernel_nu_closed((0, 0), (0, 0)) == pytest.approx(1 / PI2)
    with pytest.raises(ValueError):
        kn.kernel_nu_series((0, 0), (0, 0), 0)


def test_series_matches_basis_sum(rng):
    z = (_disk_points(rng, 20), _disk_points(rng, 20))
    zeta = (_disk_points(rng, 20), _disk_points(rng, 20))
    N = 9
    direct = sum(kn.basis_nu(i, *z) * np.conj(kn.basis_nu(i, *zeta))
                 for i in kn.basis_indices(N))
    assert np.max(np.abs(kn.kernel_nu_series(z, zeta, N) - direct)) < 1e-13


def test_series_diagonal_positive_and_hermitian(rng):
    z = (_disk_points(rng, 200), _disk_points(rng, 200))
    zeta = (_disk_points(rng, 200), _disk_points(rng, 200))
    diag = kn.kernel_nu_series(z, z, 30)
    assert np.all(diag.real > 0) and np.max(np.abs(diag.imag)) < 1e-12 * np.max(diag.real)
    a = kn.kernel_nu_series(z, zeta, 30)
    b = np.conj(kn.kernel_nu_series(zeta, z, 30))
    assert np.max(np.abs(a - b)) < 1e-12


def test_series_against_closed(rng):
    res = kn.compare_kernels(1000, 0.5, 60, seed=3)
    assert max(r.abs_error for r in res) < 1e-8
    assert all(r.abs_error == abs(r.series_value - r.closed_value) for r in res)


def test_closed_form_swap_invariance(rng):
    z1, z2, w1, w2 = (_disk_points(rng, 500) for _ in range(4))
    a = kn.kernel_nu_closed((z1, z2), (w1, w2))
    assert np.max(np.abs(a - kn.kernel_nu_closed((z2, z1), (w1, w2)))) < 1e-12 * np.max(np.abs(a))
    assert np.max(np.abs(a - kn.kernel_nu_closed((z2, z1), (w2, w1)))) < 1e-12 * np.max(np.abs(a))


def test_closed_form_diagonal_fallback():
    a = 0.3 + 0.2j
    on = kn.kernel_nu_closed((a, a), (0.1, -0.4j))
    off = kn.kernel_nu_closed((a, a + 1e-5), (0.1, -0.4j))
    assert abs(on - off) < 1e-4 * abs(on)
    assert on == pytest.approx(kn.kernel_nu_series((a, a), (0.1, -0.4j)))


def test_factored_equals_closed(rng):
    z1, z2, w1, w2 = (_disk_points(rng, 500) for _ in range(4))
    a = kn.kernel_nu_closed((z1, z2), (w1, w2))
    b = kn.kernel_nu_factored((z1, z2), (w1, w2))
    assert np.max(np.abs(a - b) / np.abs(a)) < 1e-8


# -- reproduction ------------------------------------------------------------------

@pytest.mark.parametrize("idx, z", [((1, 0), (0.3, 0.1j)), ((2, 1), (0.2, -0.4))])
def test_reproducing_examples(idx, z):
    f = lambda a, b: kn.basis_nu(idx, a, b)     # noqa: E731
    assert kn.reproducing_check(f, z) < 1e-6


def test_reproducing_zero():
    assert kn.reproducing_check(lambda a, b: np.zeros(np.broadcast(a, b).shape), (0.1, 0.2)) == 0


def test_element_from_orthonormal():
    f = kn.SymmetricBergmanElement.from_orthonormal({(1, 0): 1.0})
    assert f(0.2, 0.3) == pytest.approx(1 / math.pi)
    assert f.norm_sq() == pytest.approx(1.0)
    g = 2 * f + kn.SymmetricBergmanElement({(3, 1): 1j})
    assert g.max_degree == 4
    assert g.to_json()["(3,1)"] == {"re": 0.0, "im": 1.0}


# -- the kernel of G --------------------------------------------------------------

def test_kernel_G_fiber_choice_and_factor_two():
    z, zeta = (0.3 + 0.1j, -0.2j), (0.1, 0.4 - 0.1j)
    s, t = symmetrize(z), symmetrize(zeta)
    k = kn.kernel_G(s, t)
    assert abs(k - kn.kernel_G(s, t, swap=True)) < 1e-12 * abs(k)
    assert k == pytest.approx(2 * kn.kernel_nu_closed(z, zeta), rel=1e-10)
    assert kn.kernel_G(s, s).real > 0


def test_kernel_G_rejects_outside_points():
    with pytest.raises(ValueError):
        kn.kernel_G((2j, 1), (0, 0))


def test_reproducing_on_G():
    # g = sqrt(2) e_{10} pulled back; dV_G = (1/2) nu dV on D^2 through the 2-to-1 cover
    z = (0.25 - 0.1j, -0.3)
    g = lambda a, b: math.sqrt(2) * kn.basis_nu((1, 0), a, b)      # noqa: E731
    z1, z2, w = bidisk_rule(24, 48).grid()
    val = np.sum(w * 0.5 * kn.nu_weight(z1, z2) * 2 * kn.kernel_nu_factored(z, (z1, z2))
                 * g(z1, z2))
    assert abs(val - g(*z)) < 1e-5
    # the orthonormal element of A^2(G) has unit norm under the same measure
    norm = np.sum(w * 0.5 * kn.nu_weight(z1, z2) * np.abs(g(z1, z2)) ** 2)
    assert norm == pytest.approx(1.0, abs=1e-10)
