"""The half-disk Muckenhoupt functional ``N_D`` and power-weight probes.

For a weight ``mu`` on the upper half-plane and a disk ``D = D(x, R)`` with
``x`` real,

    N_D(mu) = (1/(pi R^2) int_{D ∩ U} mu) * (1/(pi R^2) int_{D ∩ U} mu^(-q/p))^(p/q)

with ``1/p + 1/q = 1``. Both integrals are taken with the polar half-disk
rule from :mod:`bergman_lab.quadrature`, pivoted at whichever weight centre
is closest to the half-disk. A centre inside the closed half-disk whose
effective exponent is ``<= -2`` makes the integral infinite; that case is
detected from the exponents and reported as ``inf`` rather than integrated.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .quadrature import QuadratureRule, half_disk_rule, project_to_half_disk

DEFAULT_ORDER = 32
GROWTH_FACTOR = 10.0
GROWTH_SPAN = 100.0          # two decades of R


class SingularPointError(ValueError):
    """A weight with a negative exponent was evaluated at its centre."""


@dataclass(frozen=True)
class PowerWeight:
    """``prefactor * prod_j |z - c_j|**s_j``."""

    prefactor: float = 1.0
    factors: tuple[tuple[complex, float], ...] = ()

    def __post_init__(self):
        if not self.prefactor > 0 or not math.isfinite(self.prefactor):
            raise ValueError("prefactor must be a positive finite number")
        for _, s in self.factors:
            if not math.isfinite(s):
                raise ValueError("exponents must be finite")
        object.__setattr__(self, "factors",
                           tuple((complex(c), float(s)) for c, s in self.factors))

    def scaled(self, c: float) -> "PowerWeight":
        return PowerWeight(self.prefactor * c, self.factors)

    def power(self, t: float) -> "PowerWeight":
        """``mu**t``."""
        return PowerWeight(self.prefactor ** t, tuple((c, s * t) for c, s in self.factors))

    def __mul__(self, other: "PowerWeight") -> "PowerWeight":
        return PowerWeight(self.prefactor * other.prefactor, self.factors + other.factors)

    def merged(self) -> dict[complex, float]:
        """Total exponent per distinct centre (zero totals dropped)."""
        out: dict[complex, float] = {}
        for c, s in self.factors:
            out[c] = out.get(c, 0.0) + s
        return {c: s for c, s in out.items() if s != 0.0}

    def __call__(self, z):
        return weight_eval(self, z)

    def describe(self) -> str:
        parts = [f"|z-({c.real:g}{c.imag:+g}j)|^{s:g}" for c, s in self.factors]
        return " * ".join([f"{self.prefactor:g}"] + parts)

    def to_json(self) -> dict:
        return {"prefactor": self.prefactor,
                "factors": [{"center": {"re": c.real, "im": c.imag}, "exponent": s}
                            for c, s in self.factors]}


def weight_eval(mu: PowerWeight, z, pivot: complex | None = None, offsets=None):
    """Pointwise value of ``mu``; vectorised over ``z``.

    When ``offsets = z - pivot`` is supplied, the factor centred at ``pivot``
    uses ``|offsets|`` directly; nodes clustered at the pivot would otherwise
    lose their distance to rounding in ``z - pivot``.
    """
    z = np.asarray(z, dtype=complex)
    out = np.full(z.shape, mu.prefactor, dtype=float)
    for c, s in mu.merged().items():
        d = np.abs(offsets) if offsets is not None and c == pivot else np.abs(z - c)
        if s < 0 and np.any(d == 0.0):
            raise SingularPointError(f"weight evaluated at its singular centre {c}")
        out = out * d ** s
    return out[()] if out.ndim == 0 else out


def mu1_weight(alpha: float, theta: float, p: float, w: complex) -> PowerWeight:
    """``|z - w|**(alpha (2 - p) / theta)``, the zero-type weight."""
    return PowerWeight(1.0, ((w, alpha * (2.0 - p) / theta),))


def mu2_weight(beta: float, sigma: float, p: float, w: complex) -> PowerWeight:
    """``|z - w|**(-beta (2 - p) / sigma)``, the pole-type weight."""
    return PowerWeight(1.0, ((w, -beta * (2.0 - p) / sigma),))


@dataclass(frozen=True)
class DiskSpec:
    center_x: float
    radius: float

    def __post_init__(self):
        if not self.radius > 0 or not math.isfinite(self.radius):
            raise ValueError("radius must be positive")
        if not math.isfinite(self.center_x):
            raise ValueError("centre must be finite")

    def to_json(self) -> dict:
        return {"center_x": self.center_x, "radius": self.radius}


def canonical_family(centers=None, radii=None) -> list[DiskSpec]:
    """Centres -5..5 in steps of 0.5 times radii 2**-10..2**3."""
    if centers is None:
        centers = np.arange(-10, 11) * 0.5
    if radii is None:
        radii = 2.0 ** np.arange(-10, 4)
    return [DiskSpec(float(x), float(r)) for x in centers for r in radii]


# -- the functional ---------------------------------------------------------

def _in_closed_half_disk(c: complex, disk: DiskSpec) -> bool:
    tol = 1e-12 * max(1.0, disk.radius)
    return abs(c - disk.center_x) <= disk.radius + tol and c.imag >= -tol


def diverges(mu: PowerWeight, disk: DiskSpec) -> bool:
    """Whether ``int_{D ∩ U} mu`` is infinite, decided from the exponents."""
    return any(s <= -2.0 and _in_closed_half_disk(c, disk) for c, s in mu.merged().items())


def rule_for(mu: PowerWeight, disk: DiskSpec, order: int = DEFAULT_ORDER) -> QuadratureRule:
    """Half-disk rule adapted to the most threatening centre of ``mu``.

    A centre in the closed half-disk becomes the polar pivot, with the radial
    grading chosen so ``r**s * r dr`` turns into an integer power of the
    reference variable. A centre just outside (closer than ``R``) pivots the
    rule at its projection with geometric radial panels. Otherwise the rule is
    centred at ``x``.
    """
    x, R = disk.center_x, disk.radius
    best = None
    for c, s in mu.merged().items():
        proj = project_to_half_disk(c, x, R)
        d = abs(c - proj)
        key = (d / R, s)
        if best is None or key < best[0]:
            best = (key, c, s, proj, d)
    if best is None or best[4] >= R:
        return half_disk_rule(x, R, order=order)
    _, c, s, proj, d = best
    if d <= 1e-12 * max(1.0, R):
        grading = math.ceil(s + 2.0) / (s + 2.0)
        return half_disk_rule(x, R, pivot=proj, order=order, grading=grading)
    return half_disk_rule(x, R, pivot=proj, order=order, near=d)


def _average(mu: PowerWeight, disk: DiskSpec, quad: QuadratureRule | None, order: int) -> float:
    rule = quad if quad is not None else rule_for(mu, disk, order)
    values = weight_eval(mu, rule.nodes, rule.meta.get("pivot"), rule.offsets)
    return float(rule.integrate(values)) / (math.pi * disk.radius ** 2)


def n_d_functional(mu: PowerWeight, p: float, disk: DiskSpec,
                   quad: QuadratureRule | int | None = None) -> float:
    """``N_D(mu)`` over the half-disk ``D(x, R) ∩ U``.

    Parameters
    ----------
    quad : QuadratureRule or int, optional
        A fixed rule used for both integrals, or the order of the adaptive
        rules built per integrand (default 32).

    Returns
    -------
    float
        ``inf`` when either integral diverges.
    """
    if not p > 1:
        raise ValueError("p must exceed 1")
    rule = quad if isinstance(quad, QuadratureRule) else None
    order = DEFAULT_ORDER if quad is None or rule is not None else int(quad)
    dual = mu.power(-1.0 / (p - 1.0))
    if diverges(mu, disk) or diverges(dual, disk):
        return math.inf
    a = _average(mu, disk, rule, order)
    b = _average(dual, disk, rule, order)
    return a * b ** (p - 1.0)


@dataclass
class ApReport:
    p: float
    weight: PowerWeight
    table: list[tuple[DiskSpec, float]]
    growth_flag: bool
    diverged: bool
    order: int = DEFAULT_ORDER
    meta: dict = field(default_factory=dict)

    @property
    def sup_ND(self) -> float:
        return max(v for _, v in self.table)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "weight": self.weight.to_json(),
            "sup_ND": self.sup_ND,
            "growth_flag": self.growth_flag,
            "diverged": self.diverged,
            "order": self.order,
            "growth_rule": {"factor": GROWTH_FACTOR, "radius_span": GROWTH_SPAN,
                            "heuristic": True},
            "table": [{**d.to_json(), "n_d": v} for d, v in self.table],
            **self.meta,
        }

    def csv_rows(self) -> list[list]:
        return [["center_x", "radius", "n_d"]] + [[d.center_x, d.radius, v] for d, v in self.table]


def growth_detected(table: list[tuple[DiskSpec, float]], factor: float = GROWTH_FACTOR,
                    span: float = GROWTH_SPAN) -> bool:
    """Whether ``N_D`` at some fixed centre grows by more than ``factor`` as the
    radius shrinks by at most ``span``."""
    by_center: dict[float, list[tuple[float, float]]] = {}
    for d, v in table:
        by_center.setdefault(d.center_x, []).append((d.radius, v))
    for rows in by_center.values():
        rows.sort()
        for i, (r_small, v_small) in enumerate(rows):
            for r_big, v_big in rows[i + 1:]:
                if r_big > span * r_small * (1 + 1e-9):
                    break
                if math.isinf(v_small) or v_small > factor * v_big:
                    return True
    return False


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("BERGMAN_LAB_THREADS", "1")))
    except ValueError:
        return 1


def ap_sweep(mu: PowerWeight, p: float, family: list[DiskSpec] | None = None,
             quad: int = DEFAULT_ORDER, threads: int | None = None) -> ApReport:
    """Evaluate ``N_D(mu)`` over a disk family.

    Disks are independent; with several threads the results are still
    collected in family order. Divergent disks show up as ``inf`` entries and
    count as blow-up for ``growth_flag``.
    """
    family = canonical_family() if family is None else list(family)
    if not family:
        raise ValueError("disk family is empty")
    nthreads = threads if threads is not None else _threads()
    job = lambda d: n_d_functional(mu, p, d, quad)  # noqa: E731
    if nthreads > 1:
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            values = list(pool.map(job, family))
    else:
        values = [job(d) for d in family]
    table = list(zip(family, values))
    diverged = any(math.isinf(v) for v in values)
    return ApReport(p, mu, table, diverged or growth_detected(table), diverged, quad)
