"""Command-line front end: ``ghostsim {sweep,threshold,scenario,verify}``.

Exit codes: 0 success, 2 configuration error, 3 numerical-check failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .config import load_config
from .exceptions import ConfigurationError, GhostSimError
from .sweep import evaluate_geometry, evaluate_scenario, records_to_json, report_threshold, run_sweep, write_results
from .verify import verify

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CHECK = 3


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    return obj


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    if cfg.sweep is None:
        raise ConfigurationError("config has no [sweep] section", field="sweep")
    output = Path(args.output) if args.output else cfg.sweep.output
    if output is None:
        raise ConfigurationError("no output path: set sweep.output or pass --output", field="sweep.output")
    records, summary = run_sweep(cfg, workers=args.workers)
    written = write_results(records, summary, output, cfg.sweep.format)
    summary = dict(summary, outputs=[str(p) for p in written])
    print(json.dumps(_jsonable(summary), indent=2))
    return EXIT_OK


def _cmd_threshold(args) -> int:
    cfg = load_config(args.config)
    if cfg.geometry is None:
        raise ConfigurationError("threshold needs a [geometry] section", field="geometry")
    report = report_threshold(cfg.geometry, cfg.ctx)
    print(json.dumps(_jsonable(report), indent=2))
    return EXIT_OK


def _cmd_scenario(args) -> int:
    cfg = load_config(args.config)
    if cfg.scenario is not None:
        record = evaluate_scenario(cfg.scenario, cfg.ctx, reference=cfg.reference, mass=cfg.scenario_mass)
    elif cfg.geometry is not None:
        record = evaluate_geometry(cfg.geometry, cfg.ctx)
    else:
        raise ConfigurationError("config needs a [scenario] or [geometry] section")
    payload = json.loads(records_to_json([record]))
    print(json.dumps(payload["records"][0], indent=2))
    return EXIT_OK


def _cmd_verify(args) -> int:
    report = verify(fock_n=args.fock_N, tol=args.tol, adjoint_sign=-1.0 if args.flip_adjoint_sign else 1.0)
    print(report.text())
    return EXIT_OK if report.passed else EXIT_CHECK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ghostsim",
        description="Scalar-mode entanglement of superposed charges and open-loop tomography.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run a one-axis parameter sweep and write CSV/JSON")
    p.add_argument("config")
    p.add_argument("--output", help="override sweep.output")
    p.add_argument("--workers", type=int, default=None, help="worker threads (default: GHOSTSIM_THREADS or CPU count)")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("threshold", help="report the charge beyond which the superposition decoheres")
    p.add_argument("config")
    p.set_defaults(func=_cmd_threshold)

    p = sub.add_parser("scenario", help="evaluate one configuration and print its record")
    p.add_argument("config")
    p.set_defaults(func=_cmd_scenario)

    p = sub.add_parser("verify", help="run the Fock-space oracle checks")
    p.add_argument("--fock-N", dest="fock_N", type=int, default=64)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--flip-adjoint-sign", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GhostSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
