"""Command-line entry point.

    bathforge run <config.json>        execute a scenario sweep
    bathforge reproduce <figure-id>    run a bundled figure preset
    bathforge validate <config.json>   schema-check a config

Exit codes: 0 success, 2 schema error, 3 numeric failure on some grid
points (run continues), 4 figure acceptance failure.  The environment
variable BATHFORGE_WORKERS caps the sweep worker count.
"""
from __future__ import annotations

import argparse
import sys

from .scenarios import FIGURE_IDS, SchemaError, load_config, reproduce_figure, run


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="bathforge",
                                     description="bath-as-resource scenario runner")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a scenario config")
    p_run.add_argument("config", help="path to a JSON scenario config")

    p_rep = sub.add_parser("reproduce", help="run a bundled figure preset")
    p_rep.add_argument("figure", choices=list(FIGURE_IDS))
    p_rep.add_argument("--output-dir", default="bathforge_out")
    p_rep.add_argument("--plot", action="store_true")

    p_val = sub.add_parser("validate", help="schema-check a scenario config")
    p_val.add_argument("config", help="path to a JSON scenario config")

    args = parser.parse_args(argv)

    if args.command == "validate":
        try:
            cfg = load_config(args.config)
        except SchemaError as exc:
            print(f"invalid: {exc}", file=sys.stderr)
            return 2
        print(f"valid: scenario '{cfg.scenario}', sweep over "
              f"'{cfg.sweep.name}' ({cfg.sweep.points} points)")
        return 0

    if args.command == "run":
        try:
            cfg = load_config(args.config)
        except SchemaError as exc:
            print(f"schema error: {exc}", file=sys.stderr)
            return 2
        result = run(cfg)
        n_err = len(result.manifest["errors"])
        print(f"wrote {result.manifest_path}"
              + (f" ({n_err} grid points failed)" if n_err else ""))
        return result.exit_code

    if args.command == "reproduce":
        try:
            result = reproduce_figure(args.figure, args.output_dir, plot=args.plot)
        except SchemaError as exc:
            print(f"schema error: {exc}", file=sys.stderr)
            return 2
        for check in result.manifest["checks"]:
            status = "PASS" if check["passed"] else "FAIL"
            print(f"[{status}] {check['name']}: {check['detail']}")
        print(f"wrote {result.manifest_path}")
        return result.exit_code

    return 2


if __name__ == "__main__":
    sys.exit(main())
