"""Command-line interface: ground-state, evolve, s-family, transform, verify.

Exit codes: 0 ok, 1 check failure, 2 usage or configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import functionals as F
from .evolution import Termination, evolve
from .ground_state import ConvergenceError, ShootingError, gradient_flow, scaled_profile, shoot
from .io import ConfigError, SnapshotFormatError, parse_config, read_snapshot, write_snapshot
from .model import CartesianGrid, NonFiniteFieldError, ParameterError, make_params
from .transforms import (ResolutionError, SFamilyParams, SupportError, inverse_pseudo_conformal,
                         phase, pseudo_conformal, s_family, scale)
from .verify import SCOPE_NOTE, SUITES, SuiteConfig, gaussian, run_suite

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _g17(x):
    return float(f"{x:.17g}")


def _dump_json(obj, target):
    text = json.dumps(obj, indent=2, default=_jsonable)
    if target in (None, "-"):
        print(text)
    else:
        Path(target).write_text(text + "\n")


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, Termination):
        return x.value
    raise TypeError(f"not JSON serializable: {type(x).__name__}")


def _grid_spec(text: str, N: int) -> CartesianGrid:
    try:
        m, l_ = text.split(",")
        return CartesianGrid(N, float(l_), int(m))
    except ValueError as exc:
        raise UsageError(f"--grid expects M,L (e.g. 1024,20): {exc}") from None


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_ground_state(args) -> int:
    params = make_params(args.N, args.b, allow_b_zero=args.classic)
    if args.method == "shoot":
        gs = shoot(params, tol=args.tol)
    else:
        gs = gradient_flow(params, CartesianGrid(args.N, args.L, args.M), tol=args.tol)
    _dump_json({k: _g17(v) if isinstance(v, float) else v for k, v in gs.summary().items()}, args.json)
    if args.csv:
        r = gs.radial.nodes
        np.savetxt(args.csv, np.column_stack([r, gs.profile]), delimiter=",", header="r,psi",
                   comments="", fmt="%.17g")
    return EXIT_OK


def _initial_field(cfg):
    ic, grid, params = cfg.initial_condition, cfg.grid, cfg.params
    if ic.kind == "ground_state":
        return scaled_profile(shoot(params), grid, ic.lambda0, ic.gamma0)
    if ic.kind == "s_family":
        return s_family(SFamilyParams(ic.T, ic.lambda0, ic.gamma0), shoot(params), 0.0, grid)
    if ic.kind == "gaussian":
        return gaussian(grid, ic.width, ic.amplitude)
    u, b = read_snapshot(ic.path)
    if u.grid.shape != grid.shape or abs(u.grid.L - grid.L) > 0:
        raise ConfigError(f"initial_condition.path: snapshot grid (M={u.grid.M}, L={u.grid.L:g}) "
                          f"does not match config grid (M={grid.M}, L={grid.L:g})")
    if abs(b - params.b) > 0:
        raise ConfigError(f"initial_condition.path: snapshot has b = {b:g}, config has b = {params.b:g}")
    return u


def cmd_evolve(args) -> int:
    path = Path(args.config)
    text = sys.stdin.read() if args.config == "-" else path.read_text()
    cfg = parse_config(text, base_dir=None if args.config == "-" else path.parent)
    print(cfg.to_json(), file=sys.stderr if args.quiet else sys.stdout)
    u0 = _initial_field(cfg)
    tr = evolve(u0, cfg.evolution, cfg.params)
    if cfg.outputs.diagnostics:
        tr.diagnostics.to_csv(cfg.outputs.diagnostics)
    if cfg.outputs.snapshot_prefix:
        for snap in tr.snapshots:
            write_snapshot(f"{cfg.outputs.snapshot_prefix}_t{snap.t:.6f}.bin", snap, cfg.params.b)
    summary = {"termination": tr.termination.value, "t_final": _g17(tr.final.t), "steps": tr.steps,
               "snapshots": len(tr.snapshots)}
    print(json.dumps(summary), file=sys.stderr if args.quiet else sys.stdout)
    return EXIT_NUMERIC if tr.termination == Termination.NUMERICAL_FAILURE else EXIT_OK


def cmd_s_family(args) -> int:
    params = make_params(args.N, args.b)
    grid = _grid_spec(args.grid, args.N)
    u = s_family(SFamilyParams(args.T, args.lambda0, args.gamma0), shoot(params), args.t, grid)
    write_snapshot(args.output, u, params.b)
    return EXIT_OK


def cmd_transform(args) -> int:
    u, b = read_snapshot(args.input)
    if args.op == "scale":
        out = scale(u, args.lambda0)
    elif args.op == "phase":
        out = phase(u, args.gamma0)
    elif args.op == "pseudo-conformal":
        out = pseudo_conformal(u, u.t if args.s is None else args.s, args.T)
    else:
        out = inverse_pseudo_conformal(u, args.T)
    write_snapshot(args.output, out, b)
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = SuiteConfig(N=args.N, b=args.b, M=args.M, L=args.L, seed=args.seed)
    print(f"# {SCOPE_NOTE}", file=sys.stderr)
    reports = run_suite(args.suite, cfg, progress=lambda r: print(r.line(), file=sys.stderr, flush=True))
    if args.json:
        _dump_json([r.to_dict() for r in reports], args.json)
    failed = [r for r in reports if not r.passed]
    print(f"{len(reports) - len(failed)}/{len(reports)} checks passed", file=sys.stderr)
    return EXIT_CHECK if failed else EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="inls", description="Critical-mass blow-up experiments for the inhomogeneous NLS.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def dims(p):
        p.add_argument("--N", type=int, default=1, help="space dimension (default 1)")
        p.add_argument("--b", type=float, default=0.5, help="inhomogeneity exponent, 0 < b < min(2, N)")

    p = sub.add_parser("ground-state", help="compute ψ and print its invariants as JSON")
    dims(p)
    p.add_argument("--method", choices=("shoot", "flow"), default="shoot")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--M", type=int, default=1024, help="grid points per axis for --method flow")
    p.add_argument("--L", type=float, default=20.0, help="box half-width for --method flow")
    p.add_argument("--classic", action="store_true", help="admit b = 0 (classic-limit oracle)")
    p.add_argument("--json", default="-", help="JSON output path ('-' for stdout)")
    p.add_argument("--csv", help="write the radial profile r,psi to this CSV file")
    p.set_defaults(func=cmd_ground_state)

    p = sub.add_parser("evolve", help="run a JSON-configured evolution")
    p.add_argument("config", help="JSON config file ('-' for stdin)")
    p.add_argument("--quiet", action="store_true", help="send the config echo and summary to stderr")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("s-family", help="write S_{T,λ₀,γ₀}(t) as a binary snapshot")
    dims(p)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--lambda0", type=float, default=1.0)
    p.add_argument("--gamma0", type=float, default=0.0)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--grid", default="1024,20", help="M,L")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_s_family)

    p = sub.add_parser("transform", help="apply a symmetry to a snapshot")
    p.add_argument("op", choices=("scale", "phase", "pseudo-conformal", "inverse-pseudo-conformal"))
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--lambda0", type=float, default=1.0)
    p.add_argument("--gamma0", type=float, default=0.0)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--s", type=float, default=None, help="internal time (default: snapshot time)")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("verify", help="run a check suite")
    p.add_argument("--suite", choices=SUITES, default="default")
    p.add_argument("--json", help="write the CheckReport array to this path ('-' for stdout)")
    dims(p)
    p.add_argument("--M", type=int, default=1024)
    p.add_argument("--L", type=float, default=20.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        if getattr(args, "tol", "absent") is None:
            args.tol = 1e-14 if args.method == "shoot" else 1e-10
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, ParameterError, SnapshotFormatError, FileNotFoundError) as exc:
        print(f"inls: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NonFiniteFieldError, ConvergenceError, ShootingError, FloatingPointError) as exc:
        print(f"inls: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (SupportError, ResolutionError) as exc:
        print(f"inls: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"inls: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
