"""Command-line interface.

Subcommands cover the limiting pressure, stationary-point classification,
phase-diagram grids, the coexistence line, critical-exponent fits, exact
finite-size tables, the Monte Carlo sampler and a self-test.  Output is
CSV or JSON with 15 significant digits; errors are single-line JSON on
stderr.  Exit codes: 0 success, 2 usage error, 3 domain/numeric error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

import numpy as np

from . import criticality, finite_system, mcmc, phase_boundary, variational
from .errors import DimerlabError
from .special_functions import (H_C, J_C, M_C, XI_C, g, g_derivatives,
                                g_inverse, pressure_md)

__all__ = ["main"]

ENV_PREFIX = "DIMERLAB_"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # noqa: A003
        raise UsageError(message)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "%.15g" % value
    return str(value)


def _json_ready(value):
    if isinstance(value, float):
        if math.isnan(value):
            return None
        return float("%.15g" % value)
    if isinstance(value, dict):
        return {k: _json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_ready(v) for v in value]
    return value


def _parse_grid(spec: str) -> np.ndarray:
    """Parse 'min:max:steps' (linear) or 'gmin:gmax:steps' (geometric)."""
    geometric = spec.startswith("g")
    body = spec[1:] if geometric else spec
    parts = body.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid spec must be min:max:steps, got {spec!r}")
    try:
        lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"bad grid spec {spec!r}: {exc}") from exc
    if steps < 1:
        raise UsageError(f"grid needs at least 1 step, got {steps}")
    if steps == 1:
        return np.array([lo])
    if geometric:
        if lo <= 0.0 or hi <= 0.0:
            raise UsageError("geometric grids need positive endpoints")
        return np.geomspace(lo, hi, steps)
    return np.linspace(lo, hi, steps)


def _parse_int_list(spec: str) -> list[int]:
    try:
        return [int(tok) for tok in spec.split(",") if tok.strip()]
    except ValueError as exc:
        raise UsageError(f"bad integer list {spec!r}") from exc


def _emit(rows: list[dict], columns: list[str], fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps([_json_ready(r) for r in rows], indent=2))
        out.write("\n")
        return
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in columns])


# ---------------------------------------------------------------------------
# subcommand implementations, each returning (rows, columns)

def _cmd_pressure(args) -> tuple[list[dict], list[str]]:
    row: dict = {"h": args.h, "j": args.j, "n": args.n}
    if args.j is None:
        row.update(pressure=pressure_md(args.h), m_star=g(args.h),
                   on_wall=False)
    else:
        gm = variational.global_maximizer(args.h, args.j)
        row.update(pressure=gm.pressure, on_wall=gm.on_wall,
                   m_star=gm.m_star,
                   m_low=None if gm.m_pair is None else gm.m_pair[0],
                   m_high=None if gm.m_pair is None else gm.m_pair[1])
    if args.n is not None:
        res = finite_system.imitative_partition(args.n, args.h,
                                                args.j or 0.0)
        row.update(finite_pressure=res.log_partition_per_site,
                   finite_density=res.monomer_density)
    cols = ["h", "j", "n", "pressure", "m_star", "m_low", "m_high",
            "on_wall", "finite_pressure", "finite_density"]
    return [row], cols


def _cmd_classify(args) -> tuple[list[dict], list[str]]:
    rep = variational.classify(args.h, args.j)
    row = {"h": args.h, "j": args.j, "region": rep.region,
           "phi1": rep.phi[0] if rep.phi else None,
           "phi2": rep.phi[1] if rep.phi else None,
           "psi1": rep.psi[0] if rep.psi else None,
           "psi2": rep.psi[1] if rep.psi else None}
    for i, pt in enumerate(rep.points):
        row[f"m{i + 1}"] = pt.m
        row[f"kind{i + 1}"] = pt.kind
    cols = ["h", "j", "region", "m1", "kind1", "m2", "kind2", "m3", "kind3",
            "phi1", "phi2", "psi1", "psi2"]
    return [row], cols


def _cmd_phase_diagram(args) -> tuple[list[dict], list[str]]:
    rows = []
    for j in _parse_grid(args.j_grid):
        for h in _parse_grid(args.h_grid):
            gm = variational.global_maximizer(float(h), float(j))
            rep = variational.classify(float(h), float(j))
            rows.append({"h": float(h), "j": float(j), "region": rep.region,
                         "pressure": gm.pressure, "on_wall": gm.on_wall,
                         "m_star": gm.m_star})
    return rows, ["h", "j", "region", "pressure", "m_star", "on_wall"]


def _cmd_wall(args) -> tuple[list[dict], list[str]]:
    rows = []
    for j in _parse_grid(args.j_grid):
        w = phase_boundary.wall(float(j))
        rows.append({"J": w.j, "gamma": w.gamma,
                     "gamma_prime": w.gamma_prime, "m1": w.m1, "m2": w.m2,
                     "jump": w.jump, "delta_residual": w.delta_residual,
                     "degenerate_strip": w.degenerate_strip})
    return rows, ["J", "gamma", "gamma_prime", "m1", "m2", "jump",
                  "delta_residual", "degenerate_strip"]


def _cmd_critical(args) -> tuple[list[dict], list[str]]:
    if args.curve == "slope":
        if args.alpha is None:
            raise UsageError("--alpha is required for slope curves")
        curve = criticality.slope_curve(args.alpha)
    elif args.curve == "tangent":
        curve = criticality.tangent_curve()
    else:
        curve = criticality.flat_j_curve()
    distances = criticality.default_distances(args.k_max, args.start)
    fit = criticality.exponent_fit(curve, distances, branch=args.branch)
    row = {"curve": args.curve, "alpha": args.alpha, "branch": args.branch,
           "exponent": fit.exponent, "amplitude": fit.amplitude,
           "r_squared": fit.r_squared, "n_dropped": fit.n_dropped}
    return [row], ["curve", "alpha", "branch", "exponent", "amplitude",
                   "r_squared", "n_dropped"]


def _cmd_finite_size(args) -> tuple[list[dict], list[str]]:
    rows = [vars(r) for r in
            finite_system.finite_density_scan(_parse_int_list(args.n_list),
                                              args.h, args.j)]
    return rows, ["n", "log_partition_per_site", "monomer_density",
                  "pressure_error", "density_error"]


def _cmd_mcmc(args) -> tuple[list[dict], list[str]]:
    cfg = mcmc.ChainConfig(args.n, args.h, args.j, args.proposals,
                           args.burn_in, seed=args.seed, thin=args.thin,
                           start=args.start)
    est = mcmc.run_chain(cfg)
    row = est.to_json_dict()
    return [row], list(row.keys())


def _cmd_selftest(args) -> tuple[list[dict], list[str]]:
    checks = []

    def record(name: str, ok: bool, detail: str = "") -> None:
        checks.append({"check": name, "ok": bool(ok), "detail": detail})

    record("g-roundtrip", abs(g_inverse(g(0.7)) - 0.7) < 1e-12)
    record("critical-density", abs(g(XI_C) - M_C) < 1e-14)
    record("derivative-identity",
           abs(g_derivatives(0.0)[0]
               - (g(1e-6) - g(-1e-6)) / 2e-6) < 1e-6)
    z1 = finite_system.complete_graph_partition(40, 0.3).log_value
    z2 = finite_system.hermite_partition(40, 0.3).log_value
    z3 = finite_system.hl_complete_graph_partition(40, 0.3).log_value
    record("finite-triple-agreement",
           abs(z1 - z2) < 1e-10 and abs(z1 - z3) < 1e-10)
    gm = variational.global_maximizer(0.0, 1.0)
    record("consistency-fixed-point",
           abs(g((2 * gm.m_star - 1) * 1.0) - gm.m_star) < 1e-12)
    w = phase_boundary.wall(2.0)
    record("wall-residual", abs(w.delta_residual) < 1e-9)
    record("wall-slope-identity",
           abs(w.gamma_prime - (1 - w.m1 - w.m2)) < 1e-14)
    record("critical-constants",
           abs(J_C - 1.4571067811865475) < 1e-12
           and abs(H_C + 0.3441132032297989) < 1e-12)
    return checks, ["check", "ok", "detail"]


# ---------------------------------------------------------------------------

def _build_parser() -> _Parser:
    parser = _Parser(prog="dimerlab",
                     description="Monomer-dimer model with attraction: "
                                 "exact pressures, phase diagram, critical "
                                 "behaviour and Monte Carlo.")
    parser.add_argument("--format", choices=["csv", "json"], default=None)
    parser.add_argument("--output", default=None, metavar="PATH")
    parser.add_argument("--config", default=None, metavar="PATH")
    parser.add_argument("--threads", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pressure", help="limiting (and exact finite-n) "
                                        "pressure at a point")
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--j", type=float, default=None)
    p.add_argument("--n", type=int, default=None)
    p.set_defaults(func=_cmd_pressure)

    p = sub.add_parser("classify", help="stationary-point structure")
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--j", type=float, required=True)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("phase-diagram", help="classification over a grid")
    p.add_argument("--h-grid", required=True, metavar="MIN:MAX:STEPS")
    p.add_argument("--j-grid", required=True, metavar="MIN:MAX:STEPS")
    p.set_defaults(func=_cmd_phase_diagram)

    p = sub.add_parser("wall", help="coexistence line gamma(J)")
    p.add_argument("--j-grid", required=True,
                   metavar="MIN:MAX:STEPS|gMIN:MAX:STEPS")
    p.set_defaults(func=_cmd_wall)

    p = sub.add_parser("critical", help="critical-exponent log-log fit")
    p.add_argument("--curve", choices=["tangent", "slope", "flat-j"],
                   required=True)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--branch", default="auto",
                   choices=["auto", "lower", "upper"])
    p.add_argument("--k-max", type=int, default=12)
    p.add_argument("--start", type=float, default=1e-2)
    p.set_defaults(func=_cmd_critical)

    p = sub.add_parser("finite-size", help="exact finite-n table")
    p.add_argument("--n-list", required=True, metavar="N1,N2,...")
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--j", type=float, required=True)
    p.set_defaults(func=_cmd_finite_size)

    p = sub.add_parser("mcmc", help="Metropolis sampling of the density")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--j", type=float, required=True)
    p.add_argument("--proposals", type=int, default=1_000_000)
    p.add_argument("--burn-in", type=int, default=10_000)
    p.add_argument("--thin", type=int, default=1)
    p.add_argument("--seed", dest="mcmc_seed", type=int, default=None)
    p.add_argument("--start", choices=["monomers", "dimers"],
                   default="monomers")
    p.set_defaults(func=_cmd_mcmc)

    p = sub.add_parser("selftest", help="run built-in consistency checks")
    p.set_defaults(func=_cmd_selftest)
    return parser


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError as exc:
        raise UsageError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"bad config file {path}: {exc}") from exc


def _resolve_settings(args) -> None:
    """Apply flag > environment > config precedence to global options."""
    config_path = args.config or os.environ.get(ENV_PREFIX + "CONFIG")
    config = _load_config(config_path)
    for name, cast, default in (("format", str, "csv"),
                                ("output", str, None),
                                ("threads", int, 1),
                                ("seed", int, 0)):
        if getattr(args, name, None) is None:
            env = os.environ.get(ENV_PREFIX + name.upper())
            if env is not None:
                try:
                    setattr(args, name, cast(env))
                except ValueError as exc:
                    raise UsageError(
                        f"bad {ENV_PREFIX}{name.upper()}={env!r}") from exc
            elif name in config:
                setattr(args, name, cast(config[name]))
            else:
                setattr(args, name, default)
    if args.format not in ("csv", "json"):
        raise UsageError(f"unknown format {args.format!r}")
    if getattr(args, "mcmc_seed", None) is not None:
        args.seed = args.mcmc_seed


def _fail(exc: Exception, code: int) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    print(json.dumps(payload), file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        _resolve_settings(args)
        rows, columns = args.func(args)
    except UsageError as exc:
        return _fail(exc, 2)
    except DimerlabError as exc:
        return _fail(exc, 3)
    buf = io.StringIO()
    _emit(rows, columns, args.format, buf)
    text = buf.getvalue()
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.command == "selftest" and not all(r["ok"] for r in rows):
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
