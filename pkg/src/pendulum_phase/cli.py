"""Command-line interface: ``pendulum-phase <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 domain error (parameters outside the
region where the request makes sense, including "no cycle here"),
3 numerical failure, 4 verification failure.

Tolerance flags fall back to ``PENDULUM_REL_TOL``, ``PENDULUM_ABS_TOL``,
``PENDULUM_EVENT_TOL`` and ``PENDULUM_WORKERS``; explicit flags win.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from typing import Optional, Sequence

from . import checks
from .connection import critical_beta
from .cycle import find_limit_cycle
from .errors import Degenerate, DomainError, NoCycle, NumericalError, PendulumError
from .integrate import IntegrationControls
from .model import ModelParams, PhaseState, equilibria, main_interval
from .output import portrait_rows, portrait_svg, to_csv, to_json
from .sweep import SweepRow, critical_curve, hysteresis_scan, phase_portrait, velocity_curve

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_NUMERIC, EXIT_VERIFY = 0, 1, 2, 3, 4

UNITS = ("Units: phi in radians; beta (drive) and gamma (damping) are dimensionless; "
         "time is in units of the inverse small-oscillation frequency.")

DEFAULTS = {"rel_tol": 1e-10, "abs_tol": 1e-12, "event_tol": 1e-10, "bisect_tol": 1e-6}

SWEEP_COLUMNS = ("gamma", "beta", "beta0", "mean_velocity", "cycle_found", "status",
                 "bracket_width", "evaluations", "error")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------- parsing helpers

def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` (stop included within half a step), ``a,b,c`` or ``x``."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"grid {text!r} must be start:stop:step")
        start, stop, step = map(float, parts)
        if not step > 0 or stop < start:
            raise UsageError(f"grid {text!r} needs step > 0 and stop >= start")
        count = int(math.floor((stop - start) / step + 0.5))
        return [round(start + i * step, 12) for i in range(count + 1)]
    values = [float(v) for v in text.split(",") if v.strip()]
    if not values:
        raise UsageError("grid is empty")
    return values


def parse_index_range(text: str) -> tuple[int, int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return int(lo), int(hi)
    n = int(text)
    return n, n


def _env_float(name: str, fallback: float) -> float:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return fallback
    try:
        return float(raw)
    except ValueError as exc:
        raise UsageError(f"{name}={raw!r} is not a number") from exc


def _controls(args) -> IntegrationControls:
    rel = args.rel_tol if args.rel_tol is not None else _env_float("PENDULUM_REL_TOL",
                                                                   DEFAULTS["rel_tol"])
    abs_ = args.abs_tol if args.abs_tol is not None else _env_float("PENDULUM_ABS_TOL",
                                                                    DEFAULTS["abs_tol"])
    ev = args.event_tol if args.event_tol is not None else _env_float("PENDULUM_EVENT_TOL",
                                                                      DEFAULTS["event_tol"])
    for name, value in (("rel-tol", rel), ("abs-tol", abs_), ("event-tol", ev)):
        if not value > 0:
            raise UsageError(f"--{name} must be positive")
    return IntegrationControls(rel_tol=rel, abs_tol=abs_, event_tol=ev)


def _workers(args) -> int:
    if getattr(args, "workers", None) is not None:
        workers = args.workers
    else:
        workers = int(_env_float("PENDULUM_WORKERS", 1))
    if workers < 1:
        raise UsageError("--workers must be >= 1")
    return workers


def _tolerances(controls: IntegrationControls, **extra) -> dict:
    return {"rel_tol": controls.rel_tol, "abs_tol": controls.abs_tol,
            "event_tol": controls.event_tol, **extra}


def _emit(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _tabular(args, command: str, rows: list[dict], columns, params: dict,
             tolerances: dict) -> None:
    if args.format == "json":
        _emit(to_json(command, params, tolerances, rows=rows), args.out)
    elif args.format == "csv":
        _emit(to_csv(rows, columns), args.out)
    else:
        raise UsageError(f"format {args.format!r} not available for {command}")


# ---------------------------------------------------------------- subcommands

def cmd_equilibria(args) -> int:
    params = ModelParams(args.beta, args.gamma)
    lo, hi = parse_index_range(args.n)
    rows = []
    for fp in equilibria(params, (lo, hi)):
        lam1, lam2 = fp.slopes if fp.slopes else (None, None)
        rows.append({"index": fp.index, "phi": fp.phi, "kind": fp.kind.value,
                     "lambda1": lam1, "lambda2": lam2, "discriminant": fp.discriminant})
    _tabular(args, "equilibria", rows,
             ("index", "phi", "kind", "lambda1", "lambda2", "discriminant"),
             {"beta": args.beta, "gamma": args.gamma, "n": [lo, hi]}, {})
    return EXIT_OK


def _bisect_tol(args) -> float:
    tol = args.tol if args.tol is not None else DEFAULTS["bisect_tol"]
    if not tol > 0:
        raise UsageError("--tol must be positive")
    return tol


def cmd_critical(args) -> int:
    controls = _controls(args)
    tol = _bisect_tol(args)
    res = critical_beta(args.gamma, tol, controls)
    row = {"gamma": res.gamma, "beta0": res.beta0, "bracket_width": res.bracket_width,
           "evaluations": res.evaluations, "plateau": res.plateau}
    _tabular(args, "critical", [row], tuple(row), {"gamma": args.gamma},
             _tolerances(controls, bisect_tol=tol))
    return EXIT_OK


def cmd_cycle(args) -> int:
    controls = _controls(args)
    tol = _bisect_tol(args)
    params = ModelParams(args.beta, args.gamma)
    orbit = find_limit_cycle(params, args.cycle_tol, controls, beta_tol=tol)
    summary = {
        "beta": params.beta, "gamma": params.gamma, "section": orbit.section,
        "z_start": orbit.z_start, "period_T": orbit.period_T,
        "mean_velocity": orbit.mean_velocity, "phase_integral": orbit.phase_integral,
        "phase_integral_target": 2 * math.pi * params.beta / params.gamma,
        "contraction": orbit.contraction,
        "expected_contraction": orbit.expected_contraction,
        "log_contraction": orbit.log_contraction,
        "expected_log_contraction": -params.gamma * orbit.period_T,
    }
    tolerances = _tolerances(controls, bisect_tol=tol, cycle_tol=args.cycle_tol)
    if args.format == "json":
        payload = dict(summary, phi=orbit.phi, samples=orbit.samples)
        _emit(to_json("cycle", {"beta": params.beta, "gamma": params.gamma}, tolerances,
                      orbit=payload), args.out)
    elif args.format == "csv":
        _emit(to_csv([summary], tuple(summary)), args.out)
    else:
        raise UsageError(f"format {args.format!r} not available for cycle")
    return EXIT_OK


def cmd_sweep(args) -> int:
    controls = _controls(args)
    tol = _bisect_tol(args)
    workers = _workers(args)
    if args.kind == "critical":
        grid = parse_grid(args.gamma)
        if any(g <= 0 for g in grid):
            raise DomainError("critical sweep needs gamma > 0 on the whole grid")
        rows = critical_curve(grid, tol, controls, workers)
        params = {"gamma": grid}
    else:
        gammas = parse_grid(args.gamma)
        if len(gammas) != 1:
            raise UsageError("velocity sweep takes a single --gamma value")
        gamma = gammas[0]
        if not gamma > 0:
            raise DomainError("velocity sweep needs gamma > 0")
        if args.beta is None:
            raise UsageError("velocity sweep needs --beta GRID")
        grid = parse_grid(args.beta)
        if args.hysteresis:
            rows = hysteresis_scan(gamma, grid, args.hysteresis)
        else:
            rows = velocity_curve(gamma, grid, tol, controls, workers)
        params = {"gamma": gamma, "beta": grid}
    _tabular(args, f"sweep-{args.kind}", [r.as_dict() for r in rows], SWEEP_COLUMNS,
             params, _tolerances(controls, bisect_tol=tol))
    return EXIT_OK


def _default_seeds(params: ModelParams) -> list[PhaseState]:
    lo, hi = main_interval(params)
    zmax = (params.beta + 1) / params.gamma if params.gamma > 0 else 2.5
    seeds = [PhaseState(lo, z) for z in (0.25 * zmax, 0.5 * zmax, 0.75 * zmax, zmax)]
    seeds += [PhaseState(hi, -z) for z in (0.25 * zmax, 0.5 * zmax, zmax)]
    seeds.append(PhaseState(0.5 * (lo + hi), 0.3 * zmax))
    if params.beta == 0 and params.gamma == 0:
        # a point on the conservative separatrix z = sqrt(2 (1 + cos phi))
        seeds.append(PhaseState(0.0, 2.0))
    return seeds


def cmd_portrait(args) -> int:
    controls = _controls(args)
    params = ModelParams(args.beta, args.gamma)
    overlays = {o.strip() for o in args.overlay.split(",") if o.strip()}
    unknown = overlays - {"g", "equilibria", "shot"}
    if unknown:
        raise UsageError(f"unknown overlays: {', '.join(sorted(unknown))}")
    if args.seeds:
        seeds = []
        for pair in args.seeds.split(";"):
            phi, z = (float(v) for v in pair.split(","))
            seeds.append(PhaseState(phi, z))
    else:
        seeds = _default_seeds(params)
    portrait = phase_portrait(params, seeds, controls, span=args.span,
                              with_shot="shot" in overlays)
    fmt = args.format
    if fmt == "svg":
        _emit(portrait_svg(portrait, overlays), args.out)
    elif fmt in ("csv", "json"):
        rows = portrait_rows(portrait, overlays)
        _tabular(args, "portrait", rows, ("curve", "kind", "phi", "z"),
                 {"beta": params.beta, "gamma": params.gamma,
                  "overlays": sorted(overlays)}, _tolerances(controls))
    return EXIT_OK


def cmd_verify(args) -> int:
    controls = _controls(args)
    only = [n.strip() for n in args.only.split(",")] if args.only else None
    try:
        results = checks.run_checks(controls, only)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from exc
    for res in results:
        print(f"{'PASS' if res.passed else 'FAIL'} {res.name}: {res.detail}")
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"{len(failed)} check(s) failed: {', '.join(failed)}")
        return EXIT_VERIFY
    print(f"all {len(results)} checks passed")
    return EXIT_OK


# ---------------------------------------------------------------- wiring

def _add_common(p: argparse.ArgumentParser, formats=("csv", "json"), default="csv"):
    p.add_argument("--rel-tol", type=float, default=None,
                   help="relative integration tolerance (default 1e-10, env PENDULUM_REL_TOL)")
    p.add_argument("--abs-tol", type=float, default=None,
                   help="absolute integration tolerance (default 1e-12, env PENDULUM_ABS_TOL)")
    p.add_argument("--event-tol", type=float, default=None,
                   help="event localization tolerance (default 1e-10, env PENDULUM_EVENT_TOL)")
    p.add_argument("--format", choices=formats, default=default)
    p.add_argument("--out", default=None, help="output file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pendulum-phase", description=__doc__.splitlines()[0],
                     epilog=UNITS)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("equilibria", help="list equilibria on the phi-axis", epilog=UNITS)
    p.add_argument("--beta", type=float, required=True, help="drive (dimensionless, >= 0)")
    p.add_argument("--gamma", type=float, required=True, help="damping (dimensionless, >= 0)")
    p.add_argument("--n", default="0..1",
                   help="index range LO..HI of phi_n (default 0..1, one turn of the cylinder)")
    _add_common(p)
    p.set_defaults(func=cmd_equilibria)

    p = sub.add_parser("critical", help="critical drive beta0(gamma)", epilog=UNITS)
    p.add_argument("--gamma", type=float, required=True, help="damping (dimensionless, > 0)")
    p.add_argument("--tol", type=float, default=None, help="bisection tolerance on beta")
    _add_common(p)
    p.set_defaults(func=cmd_critical)

    p = sub.add_parser("cycle", help="rotational limit cycle report", epilog=UNITS)
    p.add_argument("--beta", type=float, required=True, help="drive (dimensionless, >= 0)")
    p.add_argument("--gamma", type=float, required=True, help="damping (dimensionless, > 0)")
    p.add_argument("--tol", type=float, default=None,
                   help="bisection tolerance for the critical-drive gate")
    p.add_argument("--cycle-tol", type=float, default=1e-9,
                   help="fixed-point tolerance on the section height z")
    _add_common(p, default="json")
    p.set_defaults(func=cmd_cycle)

    p = sub.add_parser("sweep", help="grid sweeps written as tables", epilog=UNITS)
    p.add_argument("kind", choices=("critical", "velocity"))
    p.add_argument("--gamma", required=True, help="damping grid start:stop:step or list")
    p.add_argument("--beta", default=None, help="drive grid (velocity sweep)")
    p.add_argument("--tol", type=float, default=None, help="bisection tolerance on beta")
    p.add_argument("--workers", type=int, default=None,
                   help="worker processes (env PENDULUM_WORKERS, default 1)")
    p.add_argument("--hysteresis", choices=("up", "down"), default=None,
                   help="exploratory adiabatic scan instead of cycle search")
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("portrait", help="phase portrait in the main interval", epilog=UNITS)
    p.add_argument("--beta", type=float, required=True, help="drive (dimensionless, >= 0)")
    p.add_argument("--gamma", type=float, required=True, help="damping (dimensionless, >= 0)")
    p.add_argument("--overlay", default="g,equilibria,shot",
                   help="comma list from g, equilibria, shot")
    p.add_argument("--seeds", default=None, help="seed points 'phi,z;phi,z;...' (radians)")
    p.add_argument("--span", type=float, default=60.0, help="max time per seed")
    _add_common(p, formats=("svg", "csv", "json"), default="svg")
    p.set_defaults(func=cmd_portrait)

    p = sub.add_parser("verify", help="run the invariant battery", epilog=UNITS)
    p.add_argument("--only", default=None,
                   help=f"comma list of checks: {', '.join(checks.CHECKS)}")
    p.add_argument("--rel-tol", type=float, default=None)
    p.add_argument("--abs-tol", type=float, default=None)
    p.add_argument("--event-tol", type=float, default=None)
    p.set_defaults(func=cmd_verify)
    return parser


_VALUE_FLAGS = {"--n", "--beta", "--gamma", "--seeds"}


def _glue_values(argv: Sequence[str]) -> list[str]:
    # values like "-1..1" would otherwise be read as options
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(_glue_values(argv))
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        if isinstance(exc, DomainError):
            print(f"domain error: {exc}", file=sys.stderr)
            return EXIT_DOMAIN
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NoCycle, Degenerate) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (NumericalError, PendulumError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
