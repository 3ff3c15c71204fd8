"""Command-line entry point ``bergman-lab``.

Every subcommand writes one report: JSON by default (schema
``bergman-lab/1``), CSV for the tabular sweeps. Exit status is 0 on
success, 2 when a numerical contract is violated and 1 on usage errors.
"""

from __future__ import annotations

import argparse
import math
import re
import sys
import time
from typing import Callable

import numpy as np

from . import __version__
from .report import SCHEMA, dumps_csv, dumps_json, write_atomic

EXIT_OK, EXIT_USAGE, EXIT_CONTRACT = 0, 1, 2


class UsageError(Exception):
    pass


class ContractViolation(Exception):
    def __init__(self, message: str, result: dict | None = None):
        super().__init__(message)
        self.result = result


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


# -- argument parsing helpers ------------------------------------------------

_IMAG_UNIT = re.compile(r"(^|[+\-])([ij])$")


def parse_complex(text: str) -> complex:
    """Parse ``"2i"``, ``"-0.5+1.5j"``, ``"i"`` or ``"3"`` into a complex number."""
    t = text.strip().replace(" ", "").replace("i", "j")
    t = _IMAG_UNIT.sub(lambda m: f"{m.group(1)}1j", t)
    try:
        return complex(t)
    except ValueError as exc:
        raise UsageError(f"cannot parse complex number {text!r}") from exc


def parse_point(text: str) -> list[complex]:
    return [parse_complex(tok) for tok in text.split(",") if tok.strip()]


_COEFF = re.compile(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*:\s*([^,()]+)")


def parse_coefficients(text: str) -> dict[tuple[int, int], complex]:
    """Parse ``"(1,0):1, (2,1):0.5-1i"`` into ``{(j, k): a}``."""
    out: dict[tuple[int, int], complex] = {}
    pos = 0
    for m in _COEFF.finditer(text):
        if text[pos:m.start()].strip(" ,"):
            raise UsageError(f"cannot parse coefficients {text!r}")
        j, k = int(m.group(1)), int(m.group(2))
        if not j > k >= 0:
            raise UsageError(f"index ({j},{k}) needs j > k >= 0")
        out[(j, k)] = out.get((j, k), 0j) + parse_complex(m.group(3))
        pos = m.end()
    if text[pos:].strip(" ,") or not out:
        raise UsageError(f"cannot parse coefficients {text!r}")
    return out


def parse_range(text: str) -> np.ndarray:
    """``"start:stop:step"`` inclusive of ``stop`` (up to rounding)."""
    try:
        start, stop, step = (float(v) for v in text.split(":"))
    except ValueError as exc:
        raise UsageError(f"range {text!r} must look like start:stop:step") from exc
    if step <= 0 or stop < start:
        raise UsageError(f"empty range {text!r}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


# -- subcommands ---------------------------------------------------------------

def cmd_prange(args) -> dict:
    from .covering import Hartogs, Symmetrization
    from .prange import prange_for_map, prange_symmetrized_closed_form, theta_star

    if args.map == "sym":
        if args.n < 2:
            raise UsageError("--n must be >= 2 for the symmetrization map")
        res = prange_for_map(Symmetrization(args.n))
        closed = prange_symmetrized_closed_form(args.n)
        out = res.to_json()
        out["closed_form"] = closed.to_json()
        out["theta_star"] = theta_star(args.n)
        err = max(abs(closed.lower - res.interval.lower), abs(closed.upper - res.interval.upper))
        out["closed_form_error"] = err
        if err > args.tol:
            raise ContractViolation("optimiser disagrees with the closed form", out)
    else:
        if args.m is None:
            raise UsageError("--m is required for the Hartogs map")
        if math.gcd(args.m, args.n) != 1:
            raise UsageError("--m and --n must be coprime")
        out = prange_for_map(Hartogs(args.m, args.n)).to_json()
    if not out["interval"]["conjugate"]:
        raise ContractViolation("interval endpoints are not conjugate", out)
    return out


def _ap_weight(args):
    from .apweights import PowerWeight, mu1_weight, mu2_weight

    w = parse_complex(args.w)
    if args.weight == "mu1":
        if not args.alpha > 0 or not 0 < args.theta <= 1:
            raise UsageError("need alpha > 0 and theta in (0, 1]")
        return mu1_weight(args.alpha, args.theta, args.p, w)
    if args.weight == "mu2":
        if not 0 < args.sigma <= 1 or not args.beta > 2 * args.sigma:
            raise UsageError("need sigma in (0, 1] and beta > 2 sigma")
        return mu2_weight(args.beta, args.sigma, args.p, w)
    return PowerWeight()


def cmd_apsweep(args) -> tuple[dict, list[list]]:
    from .apweights import ap_sweep, canonical_family
    from .prange import prop_mu1_range, prop_mu2_range

    if not args.p > 1:
        raise UsageError("--p must exceed 1")
    mu = _ap_weight(args)
    lo, hi = (float(v) for v in args.radii.split(":"))
    family = canonical_family(parse_range(args.centers), 2.0 ** np.arange(lo, hi + 1))
    rep = ap_sweep(mu, args.p, family, quad=args.order)
    out = rep.to_json()
    if args.weight == "mu1":
        out["interval"] = prop_mu1_range(args.alpha, args.theta).to_json()
    elif args.weight == "mu2":
        out["interval"] = prop_mu2_range(args.beta, args.sigma).to_json()
    return out, rep.csv_rows()


def cmd_kernel_check(args) -> tuple[dict, list[list]]:
    from .kernels import compare_kernels

    rows = compare_kernels(args.pairs, args.radius, args.N, args.seed)
    max_err = max(r.abs_error for r in rows)
    out = {"truncation_degree": args.N, "pairs": args.pairs, "radius": args.radius,
           "max_abs_error": max_err, "tolerance": args.tol,
           "table": [{"z": list(r.z), "zeta": list(r.zeta), "series_value": r.series_value,
                      "closed_value": r.closed_value, "abs_error": r.abs_error}
                     for r in rows]}
    csv_rows = [["z1_re", "z1_im", "z2_re", "z2_im", "zeta1_re", "zeta1_im", "zeta2_re",
                 "zeta2_im", "series_re", "series_im", "closed_re", "closed_im", "abs_error"]]
    for r in rows:
        csv_rows.append([r.z[0].real, r.z[0].imag, r.z[1].real, r.z[1].imag,
                         r.zeta[0].real, r.zeta[0].imag, r.zeta[1].real, r.zeta[1].imag,
                         r.series_value.real, r.series_value.imag,
                         r.closed_value.real, r.closed_value.imag, r.abs_error])
    if not max_err < args.tol:
        raise ContractViolation(f"series/closed-form error {max_err:.3e}", out)
    return out, csv_rows


_DISK_FUNCTIONS: dict[str, tuple[Callable, Callable]] = {
    "poly": (lambda z: z ** 3 - 2 * z + 1, lambda z: z ** 3 - 2 * z + 1),
    "conj": (np.conj, lambda z: np.zeros_like(z)),
    "abs2": (lambda z: np.abs(z) ** 2 + 0j, lambda z: np.full_like(z, 0.5)),
}


def cmd_project(args) -> dict:
    from .projector import SampledFunction, project_disk
    from .quadrature import disk_rule

    f, expected = _DISK_FUNCTIONS[args.function]
    pts = np.array(parse_point(args.points))
    if np.any(np.abs(pts) >= 1):
        raise UsageError("projection points must lie in the unit disk")
    Bf = project_disk(SampledFunction(f, args.function), disk_rule(args.radial, args.angular),
                      kernel=args.kernel)
    vals = Bf(pts)
    exp = expected(pts)
    residual = float(np.max(np.abs(vals - exp)))
    out = {"function": args.function, "points": pts, "values": vals, "expected": exp,
           "residual": residual, "tolerance": args.tol,
           "quadrature": {"radial": args.radial, "angular": args.angular,
                          "kernel": args.kernel}}
    if not residual < args.tol:
        raise ContractViolation(f"projection residual {residual:.3e}", out)
    return out


def cmd_bell_check(args) -> dict:
    from .projector import bell_transform_residuals, g_monomials
    from .quadrature import bidisk_rule

    mons = g_monomials(args.degree)
    res = bell_transform_residuals([h for _, h in mons], quad=bidisk_rule(args.radial,
                                                                          args.angular))
    table = [{"h": name, "residual": r.residual} for (name, _), r in zip(mons, res)]
    worst = max(r.residual for r in res)
    out = {"degree": args.degree, "max_residual": worst, "tolerance": args.tol,
           "quadrature": {"radial": args.radial, "angular": args.angular},
           "points": res[0].points, "table": table}
    if not worst < args.tol:
        raise ContractViolation(f"transformation-law residual {worst:.3e}", out)
    return out


def cmd_pnorm_probe(args) -> dict:
    from .projector import pnorm_probe, weighted_norm_ratio

    if not args.p > 1:
        raise UsageError("--p must exceed 1")
    if args.mode == "contraction":
        rep = weighted_norm_ratio(args.p)
        out = rep.to_json()
        worst = max(rep.ratios.values())
        out["max_ratio"] = worst
        out["tolerance"] = args.tol
        if args.p == 2.0 and not worst <= 1.0 + args.tol:
            raise ContractViolation(f"L2 ratio {worst:.6f} exceeds 1", out)
        return out
    eps = tuple(float(e) for e in args.eps.split(","))
    return pnorm_probe(args.p, parse_complex(args.w0), eps).to_json()


def cmd_friedrichs(args) -> dict:
    from .friedrichs import friedrichs_nu
    from .kernels import SymmetricBergmanElement
    from .quadrature import bidisk_rule

    coeffs = parse_coefficients(args.coeff)
    f = SymmetricBergmanElement(coeffs)
    res = friedrichs_nu(f, bidisk_rule(args.radial, args.angular))
    out = {"input_coefficients": f.to_json(), **res.to_json(),
           "quadrature": {"radial": args.radial, "angular": args.angular}}
    if not res.rank_one_pass:
        raise ContractViolation("Friedrichs value is not conj(a_10)", out)
    return out


def cmd_membership(args) -> dict:
    from . import domains

    pt = parse_point(args.point)
    tol = args.closure_tol
    d = args.domain
    if d == "symdisk":
        inside = domains.in_symmetrized_polydisk(pt)
        closure = domains.in_symmetrized_polydisk_closure(pt, tol)
        extra = {"roots": domains.symmetrized_roots(pt).roots}
    elif d == "polydisk":
        inside = domains.in_polydisk(pt)
        closure = bool(np.all(np.abs(pt) <= 1 + tol))
        extra = {}
    elif d == "disk" or d == "halfplane":
        if len(pt) != 1:
            raise UsageError(f"{d} takes a single coordinate")
        if d == "disk":
            inside, closure = domains.in_unit_disk(pt[0]), abs(pt[0]) <= 1 + tol
        else:
            inside, closure = domains.in_upper_halfplane(pt[0]), pt[0].imag >= -tol
        extra = {}
    else:
        if len(pt) != 2:
            raise UsageError("hartogs takes two coordinates")
        inside = domains.in_hartogs_triangle(pt[0], pt[1], args.gamma)
        closure = domains.in_hartogs_triangle_closure(pt[0], pt[1], args.gamma, tol)
        extra = {"gamma": args.gamma}
    return {"domain": d, "point": pt, "in_domain": bool(inside), "in_closure": bool(closure),
            "closure_tol": tol, **extra}


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", "-o", default="-", help="output path, '-' for stdout")

    parser = _Parser(prog="bergman-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("prange", parents=[common], help="L^p interval of a covering map")
    p.add_argument("--map", choices=("sym", "hartogs"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_prange)

    p = sub.add_parser("apsweep", parents=[common], help="N_D over a disk family")
    p.add_argument("--weight", choices=("mu1", "mu2", "const"), default="mu1")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--beta", type=float, default=3.0)
    p.add_argument("--sigma", type=float, default=0.5)
    p.add_argument("--w", default="0.25", help="weight centre")
    p.add_argument("--centers", default="-5:5:0.5")
    p.add_argument("--radii", default="-10:3", help="base-2 exponents lo:hi")
    p.add_argument("--order", type=int, default=32)
    p.set_defaults(func=cmd_apsweep)

    p = sub.add_parser("kernel-check", parents=[common], help="series vs closed-form B_nu")
    p.add_argument("--pairs", type=int, default=1000)
    p.add_argument("--radius", type=float, default=0.5)
    p.add_argument("--N", type=int, default=60)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_kernel_check)

    p = sub.add_parser("project", parents=[common], help="disk projection of a test function")
    p.add_argument("--function", choices=sorted(_DISK_FUNCTIONS), default="poly")
    p.add_argument("--points", default="0.3,-0.2+0.1i,0.5+0.2i,-0.6i")
    p.add_argument("--radial", type=int, default=64)
    p.add_argument("--angular", type=int, default=128)
    p.add_argument("--kernel", choices=("truncated", "closed"), default="truncated")
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("bell-check", parents=[common], help="transformation law on G")
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--radial", type=int, default=24)
    p.add_argument("--angular", type=int, default=48)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_bell_check)

    p = sub.add_parser("pnorm-probe", parents=[common], help="weighted L^p ratio probes")
    p.add_argument("--mode", choices=("probe", "contraction"), default="probe")
    p.add_argument("--p", type=float, default=2.2)
    p.add_argument("--w0", default="0")
    p.add_argument("--eps", default="0.1,0.05,0.025")
    p.add_argument("--tol", type=float, default=1e-3)
    p.set_defaults(func=cmd_pnorm_probe)

    p = sub.add_parser("friedrichs", parents=[common], help="Friedrichs operator on G")
    p.add_argument("--coeff", required=True, help='e.g. "(1,0):1,(2,1):0.5-1i"')
    p.add_argument("--radial", type=int, default=20)
    p.add_argument("--angular", type=int, default=40)
    p.set_defaults(func=cmd_friedrichs)

    p = sub.add_parser("membership", parents=[common], help="domain membership")
    p.add_argument("--domain", choices=("symdisk", "polydisk", "disk", "halfplane", "hartogs"),
                   required=True)
    p.add_argument("--point", required=True, help='comma-separated, e.g. "2i,1"')
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--closure-tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_membership)
    return parser


TABULAR = {"apsweep", "kernel-check"}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    params = {k: v for k, v in vars(args).items() if k not in ("func", "output", "format")}
    if args.format == "csv" and args.command not in TABULAR:
        parser.error(f"--format csv is only available for {', '.join(sorted(TABULAR))}")
    np.random.seed(args.seed)
    t0 = time.perf_counter()
    status, rows = EXIT_OK, None
    try:
        result = args.func(args)
        if isinstance(result, tuple):
            result, rows = result
    except UsageError as exc:
        parser.error(str(exc))
    except ContractViolation as exc:
        status, result = EXIT_CONTRACT, dict(exc.result or {}, error=str(exc))
    except (ArithmeticError, FloatingPointError) as exc:
        status, result = EXIT_CONTRACT, {"error": f"{type(exc).__name__}: {exc}"}
    elapsed = time.perf_counter() - t0
    if args.format == "csv" and rows is not None:
        text = dumps_csv(rows)
    else:
        doc = {"schema": SCHEMA, "command": args.command, "version": __version__,
               "params": params, "status": "ok" if status == EXIT_OK else "contract_violation",
               "result": result, "wall_clock_seconds": elapsed}
        text = dumps_json(doc)
    write_atomic(args.output, text)
    if status != EXIT_OK:
        sys.stderr.write(f"bergman-lab: {result.get('error', 'contract violation')}\n")
    return status


def main(argv: list[str] | None = None) -> None:
    raise SystemExit(run(argv))


if __name__ == "__main__":
    main()
