"""Command-line front end.

    simulate run <config-or-canonical-id> [--out DIR] [--format csv|json]
                 [--n-max N] [--seedless-deterministic]
    simulate list
    simulate validate <config>

Exit codes: 0 success, 2 validation failure, 3 convergence/step-size
failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import load_config_file, validate_config
from .errors import BracketError, ConfigError, ConvergenceError, StepSizeError
from .scenarios import CANONICAL, canonical_config, list_scenarios, run_scenario

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_CONVERGENCE = 3
EXIT_IO = 4


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="simulate",
        description="Spectra and dynamics of weakly coupled cavity arrays "
                    "with ultrastrongly coupled qubits.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a canonical scenario or config file")
    run.add_argument("target", help="canonical id (see 'simulate list') or "
                                    "path to a JSON config")
    run.add_argument("--out", default=".", metavar="DIR",
                     help="output directory (default: current directory)")
    run.add_argument("--format", choices=("csv", "json"), default=None,
                     help="override the configured output format")
    run.add_argument("--n-max", type=int, default=None, metavar="N",
                     help="override the per-mode photon truncation")
    run.add_argument("--seedless-deterministic", action="store_true",
                     help="assert the run uses no randomness; recorded in "
                          "metadata (all computations here are deterministic)")

    sub.add_parser("list", help="list canonical scenarios")

    val = sub.add_parser("validate", help="validate a config file")
    val.add_argument("config", help="path to a JSON config")
    return parser


def _print_issues(err: ConfigError):
    print("configuration invalid:", file=sys.stderr)
    for path, msg in err.issues:
        loc = path if path else "<root>"
        print(f"  {loc}: {msg}", file=sys.stderr)


def _load_target(target: str):
    if target in CANONICAL:
        return canonical_config(target)
    return validate_config(load_config_file(target))


def cmd_run(args) -> int:
    try:
        cfg = _load_target(args.target)
        if args.format:
            cfg.output["format"] = args.format
        run = run_scenario(cfg, n_max_override=args.n_max,
                           deterministic_flag=args.seedless_deterministic)
        data_path, meta_path = run.write(args.out)
    except ConfigError as err:
        _print_issues(err)
        return EXIT_VALIDATION
    except BracketError as err:
        print(f"gap-search bracket error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    except ConvergenceError as err:
        print(f"convergence failure: {err}", file=sys.stderr)
        print("hint: raise system.n_max or relax the drift tolerance",
              file=sys.stderr)
        return EXIT_CONVERGENCE
    except StepSizeError as err:
        print(f"integrator step failure: {err}", file=sys.stderr)
        print("hint: halve time.dt and rerun", file=sys.stderr)
        return EXIT_CONVERGENCE
    except OSError as err:
        print(f"I/O failure: {err}", file=sys.stderr)
        return EXIT_IO
    print(data_path)
    print(meta_path)
    return EXIT_OK


def cmd_list(_args) -> int:
    for sid, desc in list_scenarios():
        print(f"{sid:7s} {desc}")
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        cfg = validate_config(load_config_file(args.config))
    except ConfigError as err:
        _print_issues(err)
        return EXIT_VALIDATION
    print(json.dumps(cfg.resolved_dict(), indent=1, sort_keys=True))
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {"run": cmd_run, "list": cmd_list, "validate": cmd_validate}
    return handler[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
