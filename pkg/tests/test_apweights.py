from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bergman_lab.apweights import (DiskSpec, PowerWeight, SingularPointError, ap_sweep,
                                   canonical_family, diverges, growth_detected, mu1_weight,
                                   mu2_weight, n_d_functional, rule_for, weight_eval)
from bergman_lab.prange import prop_mu1_range, prop_mu2_range


# -- evaluation ----------------------------------------------------------------

def test_weight_eval_examples():
    assert weight_eval(PowerWeight(2.5, ((1j, 0.0),)), 3 + 4j) == 2.5
    assert weight_eval(PowerWeight(1.0, ((0, 2.0),)), 2j) == pytest.approx(4.0)
    mu = PowerWeight(1.0, ((1j, 1.0), (-1j, -1.0)))
    assert weight_eval(mu, 1.0) == pytest.approx(1.0)


def test_weight_eval_singular_point():
    with pytest.raises(SingularPointError):
        weight_eval(PowerWeight(1.0, ((0.5, -1.0),)), 0.5)
    assert weight_eval(PowerWeight(1.0, ((0.5, 1.0),)), 0.5) == 0.0


def test_power_weight_validation_and_algebra():
    with pytest.raises(ValueError):
        PowerWeight(0.0)
    with pytest.raises(ValueError):
        PowerWeight(1.0, ((0, math.inf),))
    mu = PowerWeight(2.0, ((1j, 1.0),)) * PowerWeight(3.0, ((1j, -0.5), (2, 1.0)))
    assert mu.prefactor == 6.0
    assert mu.merged() == {1j: 0.5, 2 + 0j: 1.0}
    assert mu.power(2.0).merged() == {1j: 1.0, 2 + 0j: 2.0}
    json.dumps(mu.to_json())


def test_disk_spec_validation():
    with pytest.raises(ValueError):
        DiskSpec(0.0, 0.0)
    with pytest.raises(ValueError):
        DiskSpec(math.nan, 1.0)


def test_canonical_family_shape():
    fam = canonical_family()
    assert len(fam) == 21 * 14
    assert min(d.center_x for d in fam) == -5 and max(d.center_x for d in fam) == 5
    assert min(d.radius for d in fam) == 2.0 ** -10 and max(d.radius for d in fam) == 8


# -- the functional -------------------------------------------------------------

@pytest.mark.parametrize("p", [1.3, 2.0, 3.7])
@pytest.mark.parametrize("disk", [DiskSpec(0, 1), DiskSpec(-3.5, 0.01), DiskSpec(2, 7)])
def test_constant_weight(p, disk):
    # |D ∩ U| = pi R^2 / 2, so each average is 1/2
    assert n_d_functional(PowerWeight(), p, disk) == pytest.approx(0.5 ** p, rel=1e-4)


def test_abs_z_on_unit_half_disk():
    # oracle: (1/pi) int_0^pi int_0^1 r * r dr dphi = 1/3 and the dual average is 1
    val = n_d_functional(PowerWeight(1.0, ((0, 1.0),)), 2.0, DiskSpec(0, 1))
    assert val == pytest.approx(1 / 3, rel=1e-6)


def test_centred_power_closed_form():
    # avg |z|^s = 1/(s + 2) on D(0, 1) ∩ U; for s = -1, p = 2.5 the dual exponent is 2/3
    val = n_d_functional(PowerWeight(1.0, ((0, -1.0),)), 2.5, DiskSpec(0, 1))
    assert val == pytest.approx(1.0 * (3 / 8) ** 1.5, rel=1e-10)


@pytest.mark.parametrize("s", [-1.5, -0.7, 0.8, 2.5])
@pytest.mark.parametrize("p", [1.5, 2.5])
def test_far_centre_bound_chain(s, p):
    disk = DiskSpec(0.3, 0.2)
    L = 12 * disk.radius
    w = disk.center_x + L * np.exp(0.9j)
    val = n_d_functional(PowerWeight(1.0, ((w, s),)), p, disk)
    base = 0.5 ** p
    assert base * (9 / 11) ** (abs(s) * p) <= val <= base * (11 / 9) ** (abs(s) * p)
    # the tighter stated window holds as well
    assert base * (9 / 11) ** abs(s) <= val <= base * (11 / 9) ** abs(s)


def test_divergence_reported_as_inf():
    mu = PowerWeight(1.0, ((0.1, -2.0),))
    assert diverges(mu, DiskSpec(0, 1))
    assert n_d_functional(mu, 2.5, DiskSpec(0, 1)) == math.inf
    # the dual weight blows up instead
    mu = PowerWeight(1.0, ((0.1j, 3.0),))
    assert n_d_functional(mu, 2.0, DiskSpec(0, 1)) == math.inf
    # centre outside the closed half-disk: finite
    assert n_d_functional(mu, 2.0, DiskSpec(5, 1)) < math.inf


def test_rule_choice():
    assert rule_for(PowerWeight(), DiskSpec(0, 1)).meta["pivot"] == 0
    r = rule_for(PowerWeight(1.0, ((0.3 + 0.2j, -1.0),)), DiskSpec(0, 1))
    assert r.meta["pivot"] == 0.3 + 0.2j and r.meta["grading"] == pytest.approx(1.0)
    r = rule_for(PowerWeight(1.0, ((0.3 - 0.01j, -1.5),)), DiskSpec(0, 1))
    assert r.meta["near"] == pytest.approx(0.01)


def test_fixed_rule_is_shared():
    from bergman_lab.quadrature import half_disk_rule
    rule = half_disk_rule(0.0, 1.0, order=48)
    mu = PowerWeight(1.0, ((3j, 1.0),))
    assert n_d_functional(mu, 2.0, DiskSpec(0, 1), rule) == pytest.approx(
        n_d_functional(mu, 2.0, DiskSpec(0, 1)), rel=1e-10)


# -- scale invariance and Hölder ----------------------------------------------

@settings(max_examples=100, deadline=None)
@given(st.floats(1e-3, 1e3), st.floats(1.1, 4), st.floats(-5, 5), st.floats(1e-3, 8),
       st.floats(-1.5, 1.5))
def test_scale_invariance(c, p, x, R, s):
    mu = PowerWeight(1.0, ((0.2 + 0.1j, s),))
    disk = DiskSpec(x, R)
    a = n_d_functional(mu, p, disk)
    b = n_d_functional(mu.scaled(c), p, disk)
    if math.isinf(a):
        assert math.isinf(b)
        return
    assert abs(a - b) <= 1e-12 * max(1.0, abs(a))


def _random_disks(rng, count):
    return [DiskSpec(float(rng.uniform(-5, 5)), float(2.0 ** rng.uniform(-10, 3)))
            for _ in range(count)]


@pytest.mark.parametrize("theta", [0.25, 0.5, 0.75])
def test_holder_per_disk(rng, theta):
    p = 2.4
    mu1 = mu1_weight(1.0, 0.5, p, 0.25)
    mu2 = mu2_weight(3.0, 0.5, p, -1j)
    for disk in _random_disks(rng, 50):
        lhs = n_d_functional(mu1.power(theta) * mu2.power(1 - theta), p, disk)
        rhs = n_d_functional(mu1, p, disk) ** theta * n_d_functional(mu2, p, disk) ** (1 - theta)
        assert lhs <= rhs + 1e-8


# -- sweeps ------------------------------------------------------------------------

def test_constant_sweep_is_flat():
    rep = ap_sweep(PowerWeight(), 2.7)
    vals = np.array([v for _, v in rep.table])
    assert np.allclose(vals, vals[0], rtol=1e-10)
    assert not rep.growth_flag and not rep.diverged


def test_mu1_inside_bounded():
    rep = ap_sweep(mu1_weight(1.0, 0.5, 2.5, 0.25), 2.5)
    assert not rep.growth_flag
    assert math.isfinite(rep.sup_ND)


def test_mu1_outside_flagged():
    rep = ap_sweep(mu1_weight(1.0, 0.5, 3.5, 0.25), 3.5)
    assert rep.growth_flag and rep.diverged
    singular = [d for d, v in rep.table if math.isinf(v)]
    assert all(abs(d.center_x - 0.25) <= d.radius for d in singular)


@pytest.mark.parametrize("beta, sigma", [(3.0, 0.5), (4.0, 0.6)])
def test_mu2_inside_and_outside(beta, sigma):
    iv = prop_mu2_range(beta, sigma)
    for p in (iv.lower + 0.05, 2.0, iv.upper - 0.05):
        assert not ap_sweep(mu2_weight(beta, sigma, p, 0.0), p).growth_flag
    for p in (iv.lower - 0.05, iv.upper + 0.05):
        assert ap_sweep(mu2_weight(beta, sigma, p, 0.0), p).growth_flag


def test_uniformity_in_w(rng):
    p = 2.5
    sups = []
    for _ in range(20):
        w = 10 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        sups.append(ap_sweep(mu1_weight(1.0, 0.5, p, w), p).sup_ND)
    assert max(sups) / min(sups) < 3


def test_lower_half_plane_centre_is_not_flagged():
    # outside the interval, but the centre never touches the closed half-disks
    rep = ap_sweep(mu1_weight(1.0, 0.5, 3.5, -1j), 3.5)
    assert not rep.diverged and not rep.growth_flag


def test_growth_detector():
    rows = [(DiskSpec(0, 2.0 ** -k), 2.0 ** k) for k in range(8)]
    assert growth_detected(rows)                   # 16x over a factor 16 in R
    rows = [(DiskSpec(0, 2.0 ** -k), 1.2 ** k) for k in range(8)]
    assert not growth_detected(rows)
    # growth spread over more than two decades does not count
    rows = [(DiskSpec(0, 10.0 ** -k), 3.0 ** k) for k in range(6)]
    assert not growth_detected(rows)


def test_sweep_threads_deterministic(monkeypatch):
    mu = mu2_weight(3.0, 0.5, 2.2, 0.1)
    fam = canonical_family(np.arange(-4, 5) * 0.5, 2.0 ** np.arange(-6, 2))
    a = ap_sweep(mu, 2.2, fam, threads=1)
    monkeypatch.setenv("BERGMAN_LAB_THREADS", "4")
    b = ap_sweep(mu, 2.2, fam)
    assert [v for _, v in a.table] == [v for _, v in b.table]


def test_report_serialisation():
    rep = ap_sweep(mu1_weight(1.0, 0.5, 3.5, 0.25), 3.5,
                   canonical_family([0.0], [1.0, 0.5]))
    doc = rep.to_json()
    assert doc["growth_rule"]["heuristic"] is True
    assert rep.csv_rows()[0] == ["center_x", "radius", "n_d"]
    assert doc["sup_ND"] == math.inf
    with pytest.raises(ValueError):
        ap_sweep(PowerWeight(), 2.0, [])
