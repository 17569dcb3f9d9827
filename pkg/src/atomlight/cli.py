"""Command line entry point: ``atomlight run`` and ``atomlight check``."""

import argparse
import subprocess
import sys
from dataclasses import replace
from pathlib import Path

from .config import ScenarioConfig, load_config
from .errors import AtomLightError
from .scenarios import SCENARIOS, SeriesSet, run_scenario, write_series
from .scheduler import run


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="atomlight",
        description="Covariance-matrix simulation of segmented atom-light interfaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate a configuration or a preset scenario")
    p_run.add_argument("--config", type=Path, help="scenario INI file (defaults if omitted)")
    p_run.add_argument("--scenario", choices=SCENARIOS, help="preset study to run")
    p_run.add_argument("--output", type=Path, help="CSV output path (default: config run.output or stdout)")
    p_run.add_argument("--tau", type=float, help="time step in units of t0 (overrides auto selection)")
    p_run.add_argument("--steps", type=int, help="number of time steps")
    p_run.add_argument("--workers", type=int, default=1, help="parallel processes for presets")

    p_check = sub.add_parser("check", help="run the acceptance suite")
    p_check.add_argument("--tests", type=Path, help="path to test_acceptance.py")
    return parser


def _cmd_run(args):
    config = load_config(args.config) if args.config else ScenarioConfig()
    if args.tau is not None:
        config = replace(config, tau_t0=args.tau)
    if args.steps is not None:
        config = replace(config, total_steps=args.steps)
    if args.scenario:
        series = run_scenario(args.scenario, config, workers=args.workers)
    else:
        traj = run(config)
        series = SeriesSet("run", {traj.label: traj})
    output = args.output or config.output
    if output is None:
        output = "/dev/stdout"
    write_series(series, output)
    return 0


def _find_acceptance(explicit):
    if explicit is not None:
        return explicit
    here = Path(__file__).resolve()
    for parent in here.parents:
        candidate = parent / "tests" / "test_acceptance.py"
        if candidate.exists():
            return candidate
    return None


def _cmd_check(args):
    path = _find_acceptance(args.tests)
    if path is None:
        print("atomlight: tests/test_acceptance.py not found; pass --tests", file=sys.stderr)
        return 2
    # a fresh interpreter keeps the suite isolated from this process
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-s", "-p", "no:cacheprovider", str(path)])
    return proc.returncode


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_check(args)
    except (AtomLightError, OSError) as exc:
        print(f"atomlight: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
