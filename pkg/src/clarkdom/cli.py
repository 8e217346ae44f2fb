"""Command line entry point: ``clarkdom run|list-scenarios|describe``."""

from __future__ import annotations

import argparse
import inspect
import sys

from .errors import ConfigError
from .experiments import CHECKS, bundled_scenarios, load_config, run, write_reports


def _cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        cfg.seed = args.seed
    fmt = args.format or cfg.output_format
    out = args.out or cfg.output_path
    result = run(cfg, jobs=args.jobs)
    paths = write_reports(result, out, fmt)
    failed = result.failed
    print(f"{cfg.scenario}: {len(result.rows)} rows, {len(failed)} failed -> {', '.join(map(str, paths))}")
    for r in failed:
        print(f"  FAIL {r.check} [{r.params}] residual={r.residual:.3e} tol={r.tolerance:.1e}")
    return result.exit_status


def _cmd_list(args) -> int:
    for name, desc in bundled_scenarios().items():
        print(f"{name:24s} {desc}")
    return 0


def _cmd_describe(args) -> int:
    func = CHECKS.get(args.check)
    if func is None:
        print(f"unknown check {args.check!r}; known: {', '.join(CHECKS)}", file=sys.stderr)
        return 2
    print(f"{args.check}: {inspect.getdoc(func)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="clarkdom", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario file (or bundled scenario name)")
    p.add_argument("config")
    p.add_argument("--out", default=None, help="report directory")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("list-scenarios", help="list bundled scenarios")
    p.set_defaults(func=_cmd_list)

    p = sub.add_parser("describe", help="describe a check")
    p.add_argument("check")
    p.set_defaults(func=_cmd_describe)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
