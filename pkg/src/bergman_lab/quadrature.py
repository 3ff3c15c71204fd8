"""Quadrature rules on disks, half-disks, bidisks and half-plane boxes.

All rules are plain node/weight arrays over the complex plane (area measure
``dA = dx dy``). Polar rules combine Gauss-Legendre in the radius with either
a uniform (trapezoidal) angular rule, which keeps the discrete rotation
symmetry of the disk, or piecewise Gauss-Legendre when the angular integrand
has kinks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss


class QuadratureError(RuntimeError):
    """Raised when a quadrature sum is not finite."""


@lru_cache(maxsize=None)
def _leggauss(n: int):
    x, w = leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n: int, a: float, b: float):
    """Gauss-Legendre nodes and weights on ``[a, b]``."""
    x, w = _leggauss(n)
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * x, half * w


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes (complex) and positive weights of a planar quadrature rule."""

    nodes: np.ndarray
    weights: np.ndarray
    meta: dict = field(default_factory=dict)
    offsets: np.ndarray | None = None   # exact ``node - pivot`` for polar rules

    @property
    def size(self) -> int:
        return int(self.nodes.size)

    def integrate(self, values) -> complex | float:
        total = np.sum(self.weights * values)
        if not np.isfinite(total):
            raise QuadratureError("non-finite quadrature sum")
        return total

    def apply(self, func: Callable[[np.ndarray], np.ndarray]):
        return self.integrate(func(self.nodes))


def disk_rule(radial: int = 32, angular: int = 64, radius: float = 1.0,
              center: complex = 0j) -> QuadratureRule:
    """Polar rule on the disk ``|z - center| < radius``.

    Exact for ``z^a conj(z)^b`` (centered) whenever ``|a - b| < angular`` and
    ``a + b + 1 <= 2 * radial - 1``.
    """
    r, wr = gauss_legendre(radial, 0.0, radius)
    theta = 2.0 * np.pi * np.arange(angular) / angular
    nodes = center + r[:, None] * np.exp(1j * theta)[None, :]
    weights = (r * wr)[:, None] * np.full(angular, 2.0 * np.pi / angular)[None, :]
    return QuadratureRule(nodes.ravel(), weights.ravel(),
                          {"kind": "disk", "radial": radial, "angular": angular,
                           "radius": radius})


@dataclass(frozen=True)
class BidiskRule:
    """Tensor product of two disk rules, integrated in row chunks."""

    first: QuadratureRule
    second: QuadratureRule

    @property
    def size(self) -> int:
        return self.first.size * self.second.size

    @property
    def meta(self) -> dict:
        return {"kind": "bidisk", "first": self.first.meta, "second": self.second.meta}

    def grid(self):
        z1 = np.repeat(self.first.nodes, self.second.size)
        z2 = np.tile(self.second.nodes, self.first.size)
        w = np.outer(self.first.weights, self.second.weights).ravel()
        return z1, z2, w

    def integrate(self, func, chunk: int = 256):
        """Integrate ``func(z1, z2)`` (broadcast arrays) over the bidisk."""
        total = 0.0
        z2 = self.second.nodes[None, :]
        w2 = self.second.weights[None, :]
        for start in range(0, self.first.size, chunk):
            z1 = self.first.nodes[start:start + chunk, None]
            w1 = self.first.weights[start:start + chunk, None]
            total = total + np.sum(w1 * w2 * func(z1, z2))
        if not np.isfinite(total):
            raise QuadratureError("non-finite quadrature sum")
        return total


def bidisk_rule(radial: int = 24, angular: int = 48) -> BidiskRule:
    rule = disk_rule(radial, angular)
    return BidiskRule(rule, rule)


# -- half-disks D(x, R) ∩ U --------------------------------------------------

def project_to_half_disk(c: complex, x: float, R: float) -> complex:
    """Closest point of the closed half-disk ``{|z - x| <= R, Im z >= 0}``."""
    c = complex(c)
    if abs(c - x) <= R and c.imag >= 0.0:
        return c
    candidates = [complex(min(max(c.real, x - R), x + R), 0.0)]
    if abs(c - x) > 0.0:
        on_arc = x + R * (c - x) / abs(c - x)
        if on_arc.imag >= 0.0:
            candidates.append(on_arc)
    return min(candidates, key=lambda q: abs(q - c))


def _ray_extent(P: complex, phi: np.ndarray, x: float, R: float) -> np.ndarray:
    u = np.exp(1j * phi)
    d = P - x
    b = (d * np.conj(u)).real
    c = abs(d) ** 2 - R * R
    r_circ = -b + np.sqrt(np.maximum(b * b - c, 0.0))
    with np.errstate(divide="ignore"):
        r_axis = np.where(u.imag < 0.0, P.imag / np.where(u.imag < 0.0, -u.imag, 1.0),
                          np.inf)
    return np.maximum(np.minimum(r_circ, r_axis), 0.0)


def _angular_breaks(P: complex, x: float, R: float, tol: float) -> list[float]:
    breaks = [0.0, 2.0 * np.pi]
    for corner in (x - R, x + R):
        if abs(corner - P) > tol:
            breaks.append(np.angle(corner - P) % (2.0 * np.pi))
    if abs(P.imag) <= tol:
        breaks.append(np.pi)
    if abs(abs(P - x) - R) <= tol and abs(P - x) > 0:
        tangent = 1j * (P - x)
        breaks.extend([np.angle(tangent) % (2 * np.pi), np.angle(-tangent) % (2 * np.pi)])
    return sorted(set(breaks))


def half_disk_rule(x: float, R: float, pivot: complex | None = None, order: int = 32,
                   grading: float = 1.0, near: float | None = None) -> QuadratureRule:
    """Polar rule on ``D(x, R) ∩ U`` centred at ``pivot``.

    The half-disk is convex, so every ray from a pivot in its closure leaves
    it exactly once. Angles are split at the directions of the two corners
    (and at tangents when the pivot sits on the arc) so the radial extent is
    smooth on each piece.

    Parameters
    ----------
    pivot : complex, optional
        Point of the closed half-disk; defaults to the disk centre ``x``.
    grading : float
        Radial map ``r = rho * t**grading``; ``1 / (s + 2)`` integrates
        ``|z - pivot|**s`` exactly up to the smooth remainder.
    near : float, optional
        Distance of an exterior near-singular point from ``pivot``. Radial
        panels are then refined geometrically towards the pivot.
    """
    P = complex(x if pivot is None else pivot)
    tol = 1e-13 * max(1.0, R)
    breaks = _angular_breaks(P, x, R, tol)

    if near is not None and near > 0.0:
        rho_max = float(np.max(_ray_extent(P, np.linspace(0, 2 * np.pi, 721), x, R)))
        edges = [0.0]
        h = near / rho_max
        while h < 0.5:
            edges.append(h)
            h *= 2.0
        edges.append(1.0)
        m = max(8, order // 2)
        parts = [gauss_legendre(m, a, b) for a, b in zip(edges[:-1], edges[1:])]
        tau = np.concatenate([p[0] for p in parts])
        wtau = np.concatenate([p[1] for p in parts])
        jac = np.ones_like(tau)
    else:
        t, wt = gauss_legendre(order, 0.0, 1.0)
        tau = t ** grading
        # dr = rho * grading * t**(grading - 1) dt
        wtau = wt
        jac = grading * t ** (grading - 1.0)

    offsets, weights = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        if b - a < 1e-15:
            continue
        if _ray_extent(P, np.array([0.5 * (a + b)]), x, R)[0] <= tol:
            continue
        phi, wphi = gauss_legendre(order, a, b)
        rho = _ray_extent(P, phi, x, R)
        r = rho[:, None] * tau[None, :]
        w = wphi[:, None] * rho[:, None] ** 2 * (tau * jac * wtau)[None, :]
        offsets.append(r * np.exp(1j * phi)[:, None])
        weights.append(w)
    offsets = np.concatenate([o.ravel() for o in offsets])
    weights = np.concatenate([w.ravel() for w in weights])
    keep = (weights > 0.0) & (offsets != 0.0)
    return QuadratureRule(P + offsets[keep], weights[keep],
                          {"kind": "half_disk", "x": x, "R": R, "pivot": P,
                           "order": order, "grading": grading, "near": near},
                          offsets[keep])


# -- truncated half-plane boxes ---------------------------------------------

def _graded_edges(lo: float, hi: float, focus: list[float], h0: float, hmax: float):
    """Panel edges on [lo, hi] refined geometrically around focus points."""
    pts = {lo, hi}
    for f in focus:
        if not lo <= f <= hi:
            continue
        pts.add(f)
        for sign in (-1.0, 1.0):
            h = h0
            pos = f
            while True:
                pos = f + sign * h
                if not lo < pos < hi:
                    break
                pts.add(pos)
                h *= 2.0
    edges = sorted(pts)
    out = [edges[0]]
    for e in edges[1:]:
        gap = e - out[-1]
        if gap <= 1e-15:
            continue
        k = int(np.ceil(gap / hmax))
        out.extend(out[-1] + gap * np.arange(1, k + 1) / k)
    return np.array(out)


def box_rule(x_range=(-8.0, 8.0), y_range=(1e-3, 8.0), focus=(0.0,), per_panel: int = 6,
             h0: float = 0.02, hmax: float = 0.5) -> QuadratureRule:
    """Composite Gauss-Legendre rule on a box in the upper half-plane.

    Panels in ``y`` are graded geometrically from ``y_range[0]`` and panels in
    ``x`` are refined around the ``focus`` abscissae.
    """
    xe = _graded_edges(x_range[0], x_range[1], list(focus), h0, hmax)
    ylo, yhi = y_range
    ye = [ylo]
    h = max(ylo, h0 / 8.0)
    while ye[-1] + h < yhi:
        ye.append(ye[-1] + h)
        h = min(2.0 * h, hmax)
    ye.append(yhi)
    xs = [gauss_legendre(per_panel, a, b) for a, b in zip(xe[:-1], xe[1:])]
    ys = [gauss_legendre(per_panel, a, b) for a, b in zip(ye[:-1], ye[1:])]
    x = np.concatenate([p[0] for p in xs])
    wx = np.concatenate([p[1] for p in xs])
    y = np.concatenate([p[0] for p in ys])
    wy = np.concatenate([p[1] for p in ys])
    nodes = (x[:, None] + 1j * y[None, :]).ravel()
    weights = np.outer(wx, wy).ravel()
    return QuadratureRule(nodes, weights,
                          {"kind": "box", "x_range": list(x_range), "y_range": list(y_range),
                           "per_panel": per_panel, "nx": int(x.size), "ny": int(y.size),
                           "x_edges": [float(e) for e in xe], "y_edges": [float(e) for e in ye]})
