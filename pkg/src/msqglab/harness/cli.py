"""Command line entry point: ``msqglab run|validate|scenarios``."""
from __future__ import annotations

import argparse
import sys

from ..errors import ConfigError
from .config import SCENARIOS, validate_config

EXIT_OK, EXIT_CONFIG, EXIT_ABORT, EXIT_IO = 0, 1, 2, 3


def _load(path: str):
    with open(path) as fh:
        return validate_config(fh.read())


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="msqglab", description="mSQG pseudo-vortex and blob laboratory")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run the scenario described by a config file")
    run.add_argument("config")
    run.add_argument("--output-dir", help="override output_dir from the config")
    run.add_argument("--seed", type=int, help="override the config seed")
    run.add_argument("--threads", type=int, help="threads for the velocity summation")
    val = sub.add_parser("validate", help="check a config file and print the resolved settings")
    val.add_argument("config")
    sub.add_parser("scenarios", help="list the built-in scenarios")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "scenarios":
        for name, desc in SCENARIOS.items():
            print(f"{name:24s} {desc}")
        return EXIT_OK

    try:
        cfg = _load(args.config)
    except ConfigError as exc:
        for e in exc.errors:
            print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read {args.config}: {exc}", file=sys.stderr)
        return EXIT_IO
    for w in cfg.warnings:
        print(f"warning: {w}", file=sys.stderr)

    if args.command == "validate":
        from .config import config_to_yaml

        sys.stdout.write(config_to_yaml(cfg))
        return EXIT_OK

    if args.seed is not None:
        if args.seed < 0:
            print("config error: seed: must be >= 0", file=sys.stderr)
            return EXIT_CONFIG
        cfg.seed = args.seed
    if args.threads is not None:
        import numba

        if not 1 <= args.threads <= numba.config.NUMBA_NUM_THREADS:
            print(f"config error: --threads must lie in [1, {numba.config.NUMBA_NUM_THREADS}]",
                  file=sys.stderr)
            return EXIT_CONFIG
        numba.set_num_threads(args.threads)

    from .scenarios import run_scenario

    try:
        report = run_scenario(cfg, args.output_dir)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    out = args.output_dir or cfg.output_dir
    print(f"{report.scenario}: {report.status} in {report.wall_clock_s:.1f} s, {report.steps} steps")
    for c in report.checks:
        print(f"  [{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.value:.6g} (bound {c.bound:.6g})")
    if report.abort_reason:
        print(f"  reason: {report.abort_reason}")
    print(f"  report: {out}/report.json")
    return EXIT_OK if report.status == "completed" else EXIT_ABORT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
