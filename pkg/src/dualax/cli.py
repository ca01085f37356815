"""
Summary:
Command-line surface:
  PYTHONPATH=src python -m dualax lax --state s.json --kappa 1
  PYTHONPATH=src python -m dualax map --state s.json
  PYTHONPATH=src python -m dualax flow --state s.json --index 2 --t 1 --steps 10
  PYTHONPATH=src python -m dualax spectrum --state s.json
  PYTHONPATH=src python -m dualax verify --n 2,3 --samples 20 --seed 7
Output goes to stdout or, atomically, to --output. Exit codes: 0 success,
1 verification failure, 2 input/config error, 3 numerical degeneracy.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

import coloredlogs

from dualax import config
from dualax.config import Config
from dualax.duality import dual_actions, map_state
from dualax.dynamics import FlowSpec, sample_trajectory
from dualax.errors import CollidingEigenvalues, ConfigError, DualaxError
from dualax.jsonutil import dumps, duality_to_dict, emit, frame_to_csv, load_state, matrix_to_dict
from dualax.linalg import eigh_desc
from dualax.models import Coupling, Family, HamiltonianId, RSState, State, SutherlandState, own_family, own_lax
from dualax.verify import run_all

logger = logging.getLogger("dualax")

DIRECTIONS = {"s1-to-s2": SutherlandState.MODEL, "s2-to-s1": RSState.MODEL}
LOG_FORMAT = "%(asctime)s %(name)s %(levelname)s %(message)s"


def setup_logging(verbose: bool) -> None:
    coloredlogs.install(level=logging.DEBUG if verbose else logging.WARNING, fmt=LOG_FORMAT, stream=sys.stderr)


def _csv_list(text: str, kind: type) -> list:
    try:
        return [kind(x) for x in text.split(",") if x.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list, got {text!r}") from e


def _read_state(args: argparse.Namespace) -> tuple[State, Coupling]:
    """Load --state (or stdin for '-'); the --kappa flag wins over the file's kappa."""
    try:
        text = sys.stdin.read() if args.state == "-" else Path(args.state).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read state file {args.state!r}: {e.strerror or e}") from e
    state, file_kappa = load_state(text)
    kappa = args.kappa if args.kappa is not None else file_kappa
    if kappa is None:
        raise ConfigError("kappa is required: pass --kappa or put \"kappa\" in the state file")
    return state, Coupling(kappa, state.n)


def cmd_lax(args: argparse.Namespace) -> int:
    state, c = _read_state(args)
    lax = own_lax(state, c)
    doc = {
        "model": state.MODEL,
        "n": state.n,
        "kappa": c.kappa,
        "lax": matrix_to_dict(lax),
        "eigenvalues": eigh_desc(lax).values.tolist(),
    }
    emit(dumps(doc), args.output)
    return 0


def cmd_map(args: argparse.Namespace) -> int:
    state, c = _read_state(args)
    if args.direction is not None and DIRECTIONS[args.direction] != state.MODEL:
        raise ConfigError(f"--direction {args.direction} needs a {DIRECTIONS[args.direction]} state, got {state.MODEL}")
    result = map_state(state, c)
    emit(dumps(duality_to_dict(result, c.kappa)), args.output)
    return 0


def cmd_flow(args: argparse.Namespace) -> int:
    state, c = _read_state(args)
    family = own_family(state) if args.family is None else Family(args.family)
    spec = FlowSpec(HamiltonianId(family, args.index), args.t, args.steps)
    traj = sample_trajectory(state, c, spec, jobs=args.jobs)
    if traj.skipped:
        times = ", ".join(f"{t:.17g}" for t in traj.skipped)
        raise CollidingEigenvalues(f"spectrum collided at sample time(s) t = {times}")
    frame = traj.to_frame()
    if args.format == "json":
        text = dumps(frame.to_dict(orient="records"))
    else:
        text = frame_to_csv(frame)
    emit(text, args.output)
    return 0


def cmd_spectrum(args: argparse.Namespace) -> int:
    state, c = _read_state(args)
    doc = {
        "model": state.MODEL,
        "n": state.n,
        "kappa": c.kappa,
        "eigenvalues": eigh_desc(own_lax(state, c)).values.tolist(),
        "actions": dual_actions(state, c).tolist(),
    }
    emit(dumps(doc), args.output)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    report = run_all(
        n_list=args.n,
        kappa_list=args.kappa,
        samples=args.samples,
        seed=args.seed,
        tolerances=config.active(),
        jobs=args.jobs,
        progress=args.progress,
    )
    emit(dumps(report.to_dict()), args.output)
    if not report.passed:
        failed = [row.name for row in report.checks if not row.passed]
        logger.warning("[verify] failed checks: %s", ", ".join(failed))
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", type=Path, default=None, help="Write to this file (atomically) instead of stdout.")
    common.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE", help="Tolerance override (repeatable).")
    common.add_argument("-v", "--verbose", action="store_true", help="Increase logging level to debug.")

    with_state = argparse.ArgumentParser(add_help=False)
    with_state.add_argument("--state", required=True, help="State JSON file ('-' for stdin).")
    with_state.add_argument("--kappa", type=float, default=None, help="Coupling constant (overrides the file).")

    parser = argparse.ArgumentParser(
        prog="dualax",
        description="Action-angle duality between the hyperbolic Sutherland and rational Ruijsenaars models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lax", parents=[common, with_state], help="Lax matrix of a state and its spectrum.")
    p.set_defaults(func=cmd_lax)

    p = sub.add_parser("map", parents=[common, with_state], help="Apply the duality map to a state.")
    p.add_argument("--direction", choices=sorted(DIRECTIONS), default=None,
                   help="Defaults to the direction implied by the state's model.")
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("flow", parents=[common, with_state], help="Sample an exact Hamiltonian flow.")
    p.add_argument("--family", choices=[f.value for f in Family], default=None,
                   help="Hamiltonian family (defaults to the state's own family).")
    p.add_argument("--index", type=int, required=True, help="j for H_j, k for Hhat_k.")
    p.add_argument("--t", type=float, required=True, help="Flow time.")
    p.add_argument("--steps", type=int, default=1, help="Number of sampling intervals.")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--jobs", type=int, default=1, help="Worker threads for the samples.")
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("spectrum", parents=[common, with_state], help="Action variables of a state.")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("verify", parents=[common], help="Run the numerical verification suite.")
    p.add_argument("--n", type=lambda s: _csv_list(s, int), default=list(Config.VERIFY_N), help="Comma-separated n values.")
    p.add_argument("--kappa", type=lambda s: _csv_list(s, float), default=list(Config.VERIFY_KAPPA),
                   help="Comma-separated coupling values.")
    p.add_argument("--samples", type=int, default=Config.VERIFY_SAMPLES)
    p.add_argument("--seed", type=int, default=Config.VERIFY_SEED)
    p.add_argument("--jobs", type=int, default=Config.VERIFY_JOBS, help="Worker threads (default: up to 8 cores).")
    p.add_argument("--progress", action="store_true", help="Show a progress bar on stderr.")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)
    try:
        config.set_active(config.load_tolerances(config.parse_overrides(args.tol)))
        if getattr(args, "jobs", 1) < 1:
            raise ConfigError(f"--jobs must be >= 1, got {args.jobs}")
        logger.info("[%s] start", args.command)
        code = args.func(args)
        logger.info("[%s] done exit=%d", args.command, code)
        return code
    except DualaxError as e:
        logger.error("[error] %s: %s", type(e).__name__, e)
        return e.exit_code
