"""Bergman projections by quadrature and numerical probes built on them.

* ``project_disk`` applies the disk projection by quadrature.
* ``bell_transform_residual`` compares both sides of the transformation law
  for the symmetrization map ``D^2 -> G``.
* ``weighted_norm_ratio`` estimates ``||B f||_{L^p(mu)} / ||f||_{L^p(mu)}`` for
  the half-plane projection on a truncated box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .apweights import PowerWeight, weight_eval
from .kernels import (kernel_disk, kernel_disk_truncated, kernel_halfplane, kernel_nu_factored,
                      nu_weight)
from .quadrature import BidiskRule, QuadratureRule, bidisk_rule, box_rule, disk_rule

CHUNK = 512


@dataclass(frozen=True)
class SampledFunction:
    """A function given by a vectorised callback, with an optional analytic tag."""

    func: Callable
    name: str = "f"
    tag: dict | None = None

    def __call__(self, *z):
        return np.asarray(self.func(*z), dtype=complex)


def _kernel_apply(kernel, targets: np.ndarray, rule: QuadratureRule, values: np.ndarray,
                  chunk: int = CHUNK) -> np.ndarray:
    """``sum_i w_i kernel(t, zeta_i) values_i`` for every target ``t``.

    ``values`` may carry extra trailing columns; they are projected together.
    """
    wv = rule.weights[:, None] * values.reshape(rule.size, -1)
    out = np.empty((targets.size, wv.shape[1]), dtype=complex)
    for s in range(0, targets.size, chunk):
        K = kernel(targets[s:s + chunk, None], rule.nodes[None, :])
        out[s:s + chunk] = K @ wv
    return out if values.ndim > 1 else out[:, 0]


def project_disk(f: SampledFunction, quad: QuadratureRule | None = None,
                 kernel: str = "truncated") -> SampledFunction:
    """``z -> int_D K_D(z, zeta) f(zeta) dA(zeta)``, evaluated lazily.

    Parameters
    ----------
    kernel : {"truncated", "closed"}
        ``"truncated"`` cuts the kernel series at the largest degree the polar
        rule resolves, so repeated projection is idempotent to roundoff.
        ``"closed"`` uses ``1 / (pi (1 - z conj(w))^2)``, whose angular
        aliasing at nodes near the circle spoils idempotence.
    """
    rule = quad if quad is not None else disk_rule(64, 128)
    samples = f(rule.nodes)
    if kernel == "truncated":
        M = min(rule.meta.get("radial", 64), rule.meta.get("angular", 128) // 2)
        kfun = lambda z, w: kernel_disk_truncated(z, w, M)  # noqa: E731
    elif kernel == "closed":
        kfun = kernel_disk
    else:
        raise ValueError(f"unknown kernel {kernel!r}")

    def Bf(z):
        z = np.asarray(z, dtype=complex)
        return _kernel_apply(kfun, z.ravel(), rule, samples).reshape(z.shape)

    return SampledFunction(Bf, f"B[{f.name}]", {"kernel": kernel})


def inner_disk(f, g, quad: QuadratureRule | None = None) -> complex:
    """``<f, g> = int_D f conj(g) dA``."""
    rule = quad if quad is not None else disk_rule(64, 128)
    return complex(rule.integrate(f(rule.nodes) * np.conj(g(rule.nodes))))


# -- transformation law on the symmetrized bidisk ---------------------------

@dataclass(frozen=True)
class BellResidual:
    residual: float
    lhs: np.ndarray
    rhs: np.ndarray
    points: list[tuple[complex, complex]]

    def to_json(self) -> dict:
        return {
            "residual": self.residual,
            "points": [[{"re": a.real, "im": a.imag}, {"re": b.real, "im": b.imag}]
                       for a, b in self.points],
            "lhs": [{"re": v.real, "im": v.imag} for v in self.lhs],
            "rhs": [{"re": v.real, "im": v.imag} for v in self.rhs],
        }


DEFAULT_GRID = ((0.3, 0.1j), (-0.2 + 0.1j, 0.4), (0.45, -0.45), (0.1j, -0.3 - 0.2j),
                (0.25 + 0.25j, -0.1))


def bell_transform_residuals(hs: list[Callable], points=DEFAULT_GRID,
                             quad: BidiskRule | None = None) -> list[BellResidual]:
    """Both sides of the transformation law for several ``h`` at once.

    ``h(s, t)`` is a function on ``G``, ``Phi(z) = (z1 + z2, z1 z2)`` and
    ``J = z1 - z2``. The left side ``B_{D^2}(J (h∘Phi))`` uses the product
    kernel of the bidisk, which separates as ``k(z1)^T F k(z2)`` with ``F``
    the weighted samples. The right side ``J (B_G h)∘Phi`` uses
    ``B_G h(Phi z) = int B_nu(z, zeta) h(Phi zeta) nu dV``, the kernel
    ``2 B_nu`` of ``G`` pulled back through the 2-to-1 cover.
    """
    quad = quad if quad is not None else bidisk_rule(24, 48)
    a = quad.first.nodes
    b = quad.second.nodes
    A, Bn = np.meshgrid(a, b, indexing="ij")
    W = np.outer(quad.first.weights, quad.second.weights)
    S, T = A + Bn, A * Bn
    nuW = W * nu_weight(A, Bn)
    hv = [np.asarray(h(S, T), dtype=complex) for h in hs]
    lhs = np.empty((len(hs), len(points)), dtype=complex)
    rhs = np.empty_like(lhs)
    for p_i, (z1, z2) in enumerate(points):
        k1 = kernel_disk(z1, a)
        k2 = kernel_disk(z2, b)
        Bnu = kernel_nu_factored((z1, z2), (A, Bn)) * nuW
        for h_i, v in enumerate(hv):
            lhs[h_i, p_i] = k1 @ (W * (A - Bn) * v) @ k2
            rhs[h_i, p_i] = (z1 - z2) * np.sum(Bnu * v)
    if not (np.all(np.isfinite(lhs)) and np.all(np.isfinite(rhs))):
        raise FloatingPointError("non-finite projection value")
    pts = [(complex(z1), complex(z2)) for z1, z2 in points]
    return [BellResidual(float(np.max(np.abs(lhs[i] - rhs[i]))), lhs[i], rhs[i], pts)
            for i in range(len(hs))]


def bell_transform_residual(h: Callable, points=DEFAULT_GRID,
                            quad: BidiskRule | None = None) -> BellResidual:
    """Max over ``points`` of ``|B_{D^2}(J (h∘Phi)) - J (B_G h)∘Phi|``."""
    return bell_transform_residuals([h], points, quad)[0]


def g_monomials(max_degree: int = 3) -> list[tuple[str, Callable]]:
    """Monomials ``s^a t^b conj(s)^c conj(t)^d`` of total degree ``<= max_degree``."""
    out = []
    for total in range(max_degree + 1):
        for a in range(total + 1):
            for b in range(total + 1 - a):
                for c in range(total + 1 - a - b):
                    d = total - a - b - c
                    name = f"s^{a} t^{b} conj(s)^{c} conj(t)^{d}"
                    out.append((name, lambda s, t, a=a, b=b, c=c, d=d:
                                s ** a * t ** b * np.conj(s) ** c * np.conj(t) ** d))
    return out


# -- weighted L^p ratios on the half-plane ----------------------------------

def gaussian_bump(center: complex, width: float) -> SampledFunction:
    c = complex(center)
    return SampledFunction(lambda z: np.exp(-np.abs(z - c) ** 2 / (2 * width ** 2)),
                           f"gauss({c.real:g}{c.imag:+g}i,{width:g})",
                           {"kind": "gaussian", "center": [c.real, c.imag], "width": width})


def concentrating_reciprocal(w0: complex, eps: float) -> SampledFunction:
    """``(z - w0 + i eps)^-1``, restricted to the box by the quadrature."""
    w0 = complex(w0)
    return SampledFunction(lambda z: 1.0 / (z - w0 + 1j * eps),
                           f"recip({w0.real:g}{w0.imag:+g}i,eps={eps:g})",
                           {"kind": "reciprocal", "w0": [w0.real, w0.imag], "eps": eps})


def standard_family() -> list[SampledFunction]:
    """The fixed functions used for the unweighted contraction check (version 1)."""
    g = gaussian_bump(1 + 1.5j, 0.6)
    return [
        gaussian_bump(2j, 0.5),
        g,
        gaussian_bump(-2 + 3j, 1.0),
        SampledFunction(lambda z: (z - 1.5j) * g(z), "poly*gauss", {"kind": "poly_gauss"}),
        SampledFunction(lambda z: np.conj(z - 1.5j) * g(z), "conj*gauss", {"kind": "conj_gauss"}),
        concentrating_reciprocal(0.0, 0.1),
    ]


@dataclass
class NormRatioReport:
    p: float
    ratios: dict[str, float]
    weight: str
    quadrature: dict
    tail_bound: dict[str, float] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"p": self.p, "weight": self.weight, "ratios": self.ratios,
                "quadrature": self.quadrature, "tail_bound": self.tail_bound, **self.meta}


def _panel_moments(s: np.ndarray, m: int) -> np.ndarray:
    """``M_k(s) = int_{-1}^{1} t^k / (s - t)^2 dt`` for ``k < m`` and ``Im s > 0``.

    Upward recurrences through ``Q_k = int t^k / (s - t) dt``; they are only
    used for ``s`` within distance 2 of ``[-1, 1]``, where they are stable.
    """
    Q = np.log(s + 1.0) - np.log(s - 1.0)
    M = np.empty(s.shape + (m,), dtype=complex)
    M[..., 0] = 1.0 / (s - 1.0) - 1.0 / (s + 1.0)
    for k in range(1, m):
        M[..., k] = -Q + s * M[..., k - 1]
        Q = s * Q - (1.0 - (-1.0) ** k) / k
    return M


def _near_boundary_correction(rule: QuadratureRule, samples: np.ndarray) -> np.ndarray:
    """Product-integration fix for the half-plane kernel on a tensor box rule.

    For a target ``x + iy`` and a source row ``v`` the kernel in ``u`` is
    ``-1 / (pi (x - u + i(y + v))^2)``, a bump of width ``y + v``. When that
    width is below the panel size, Gauss-Legendre in ``u`` is inaccurate. On
    such panels the sampled row is replaced by its interpolating polynomial
    and integrated against the kernel exactly; the returned array is the
    difference from the plain rule.
    """
    meta = rule.meta
    m = meta["per_panel"]
    xe = np.asarray(meta["x_edges"])
    nx, ny = meta["nx"], meta["ny"]
    x = rule.nodes.reshape(nx, ny)[:, 0].real
    y = rule.nodes.reshape(nx, ny)[0, :].imag
    wy = rule.weights.reshape(nx, ny)[0, :] / _x_weight(rule, 0)
    F = samples.reshape(nx, ny, -1)
    out = np.zeros_like(F)
    tref, wref = np.polynomial.legendre.leggauss(m)
    VinvT = np.linalg.inv(np.vander(tref, m, increasing=True)).T
    Y = y[:, None] + y[None, :]                      # (target row, source row)
    for c, (a, b) in enumerate(zip(xe[:-1], xe[1:])):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        sel = np.nonzero(np.abs(x - mid) < 3.0 * half)[0]
        if sel.size == 0:
            continue
        s = (x[sel, None, None] - mid + 1j * Y[None, :, :]) / half
        dist = np.abs(s - np.clip(s.real, -1.0, 1.0))
        ia, ib, idd = np.nonzero(dist < 2.0)
        if ia.size == 0:
            continue
        sn = s[ia, ib, idd]
        omega = _panel_moments(sn, m) @ VinvT.T
        plain = wref[None, :] / (sn[:, None] - tref[None, :]) ** 2
        rows = F[c * m:(c + 1) * m].transpose(1, 0, 2)[idd]      # (K, m, nf)
        contrib = np.einsum("km,kmf->kf", omega - plain, rows)
        contrib *= (-wy[idd] / (np.pi * half))[:, None]
        np.add.at(out, (sel[ia], ib), contrib)
    return out.reshape(samples.shape)


def _x_weight(rule: QuadratureRule, ix: int) -> float:
    xs = np.asarray(rule.meta["x_edges"])
    m = rule.meta["per_panel"]
    c = ix // m
    _, w = np.polynomial.legendre.leggauss(m)
    return float(0.5 * (xs[c + 1] - xs[c]) * w[ix % m])


def halfplane_project(rule: QuadratureRule, samples: np.ndarray) -> np.ndarray:
    """``B_U`` of the sampled function(s) at the rule's own nodes."""
    out = _kernel_apply(kernel_halfplane, rule.nodes, rule, samples)
    if rule.meta.get("kind") == "box" and "x_edges" in rule.meta:
        out = out + _near_boundary_correction(rule, samples)
    return out


def default_box(focus=(0.0,), h0: float = 0.05) -> QuadratureRule:
    """``[-8, 8] x (1e-3, 8]`` with 5-point panels refined around ``focus``."""
    return box_rule((-8.0, 8.0), (1e-3, 8.0), focus=focus, per_panel=5, h0=h0, hmax=1.0)


def weighted_norm_ratio(p: float, weight: PowerWeight | None = None,
                        functions: list[SampledFunction] | None = None,
                        quad: QuadratureRule | None = None) -> NormRatioReport:
    """``||B_U f||_{L^p(mu)} / ||f||_{L^p(mu)}`` on a truncated box.

    ``B_U f`` is computed at the box nodes from samples of ``f`` at the same
    nodes, so both norms see the truncated function. The reported tail bound
    controls ``int |B_U f|^p`` outside the box for ``mu = 1`` through
    ``|B_U f(z)| <= ||f||_1 / (pi dist(z, conj(box))^2)``.
    """
    if not p > 1:
        raise ValueError("p must exceed 1")
    functions = standard_family() if functions is None else functions
    rule = quad if quad is not None else default_box()
    mu = np.ones(rule.size) if weight is None else weight_eval(weight, rule.nodes)
    samples = np.stack([f(rule.nodes) for f in functions], axis=1)
    projected = halfplane_project(rule, samples)
    ratios, tails = {}, {}
    meta = rule.meta
    x_hi = max(abs(meta.get("x_range", [-8, 8])[0]), abs(meta.get("x_range", [-8, 8])[1]))
    for i, f in enumerate(functions):
        num = float(np.sum(rule.weights * mu * np.abs(projected[:, i]) ** p))
        den = float(np.sum(rule.weights * mu * np.abs(samples[:, i]) ** p))
        if not (math.isfinite(num) and math.isfinite(den)) or den == 0.0:
            ratios[f.name] = math.inf
            continue
        ratios[f.name] = (num / den) ** (1.0 / p)
        l1 = float(np.sum(rule.weights * np.abs(samples[:, i])))
        # outside a disk of radius x_hi/2 around the support: int (c r^-2)^p r dr dphi
        r0 = 0.5 * x_hi
        tails[f.name] = (l1 / math.pi) ** p * math.pi * r0 ** (2 - 2 * p) / (2 * p - 2)
    return NormRatioReport(p, ratios, "1" if weight is None else weight.describe(),
                           dict(meta), tails)


# -- trend probe for the symmetrized-bidisk weight ----------------------------

PROBE_EPS = (0.1, 0.05, 0.025)
GROWTH_RATIO = 2.0


@dataclass
class PnormProbe:
    p: float
    interval: tuple[float, float]
    inside: bool
    thetas: tuple[float, float]
    eps: tuple[float, ...]
    ratios: list[float]
    report: NormRatioReport

    @property
    def growth(self) -> float:
        return self.ratios[-1] / self.ratios[0]

    @property
    def verdict(self) -> str:
        return "growing" if self.growth > GROWTH_RATIO else "bounded"

    def to_json(self) -> dict:
        return {"p": self.p, "interval": list(self.interval), "inside": self.inside,
                "thetas": {"pole": self.thetas[0], "zero": self.thetas[1]},
                "eps": list(self.eps), "ratios": self.ratios, "growth": self.growth,
                "verdict": self.verdict, "heuristic": True,
                "growth_threshold": GROWTH_RATIO, "weight": self.report.weight,
                "quadrature": self.report.quadrature}


def symmetrized_slice_weight(p: float, w0: complex = 0.0) -> tuple[PowerWeight, tuple]:
    """``|z + i|^(-3(2-p)/theta1) |z - w0|^((2-p)/theta2)`` with the optimal split
    of a variable of the symmetrized bidisk."""
    from .covering import Symmetrization
    from .prange import prange_for_map

    res = prange_for_map(Symmetrization(2))
    alloc = res.allocations[1]
    th1, th2 = alloc.pole_sigmas[0], alloc.zero_thetas[0]
    w = PowerWeight(1.0, ((-1j, -3.0 * (2.0 - p) / th1), (complex(w0), (2.0 - p) / th2)))
    return w, (th1, th2), (res.interval.lower, res.interval.upper)


def pnorm_probe(p: float, w0: complex = 0.0, eps=PROBE_EPS) -> PnormProbe:
    """Weighted ratios along ``f_eps = (z - w0 + i eps)^-1`` for shrinking ``eps``.

    Only the trend is meaningful; the verdict is a heuristic indicator.
    """
    weight, thetas, interval = symmetrized_slice_weight(p, w0)
    funcs = [concentrating_reciprocal(w0, e) for e in eps]
    rule = default_box(focus=(complex(w0).real,), h0=min(eps) / 4.0)
    rep = weighted_norm_ratio(p, weight, funcs, rule)
    ratios = [rep.ratios[f.name] for f in funcs]
    return PnormProbe(p, interval, interval[0] < p < interval[1], thetas, tuple(eps),
                      ratios, rep)
