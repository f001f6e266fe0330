"""Command-line entry point.

    ntype-eit run CONFIG.json
    ntype-eit run --preset fig3 [--output DIR/STEM] [--plot]
    ntype-eit verify [all | NAME]
    ntype-eit list-presets

Exit codes: 0 success, 1 usage or config error, 2 numerical failure,
3 verification failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

from ntype_eit import __version__, acceptance
from ntype_eit.bloch import DegenerateSteadyStateError
from ntype_eit.scenarios import (
    PRESET_DESCRIPTIONS,
    PRESETS,
    ConfigError,
    NumericalFailure,
    load_config,
    resolve_config,
    run_scenario,
)

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_VERIFY = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ntype-eit", description="Detuned EIT in an N-type four-level atom.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log solver warnings")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run a scenario from a JSON config or a preset")
    run.add_argument("config", nargs="?", help="scenario JSON (a previous run's sidecar also works)")
    run.add_argument("--preset", choices=sorted(PRESETS), help="start from a compiled-in preset")
    run.add_argument("-o", "--output", help="output path stem (overrides the config)")
    run.add_argument("--plot", action="store_true", help="also write a PNG and a re-plot script")

    verify = sub.add_parser("verify", help="run acceptance checks")
    names = sorted([*acceptance.CHECKS, *acceptance.ALIASES])
    verify.add_argument("name", nargs="?", default="all", help=f"'all' or one of: {', '.join(names)}")

    sub.add_parser("list-presets", help="list compiled-in scenario presets")
    return parser


def _cmd_run(args) -> int:
    if args.config is None and args.preset is None:
        print("ntype-eit run: give a config file or --preset", file=sys.stderr)
        return EXIT_USAGE
    raw = load_config(args.config) if args.config else {}
    if args.preset:
        raw = {**raw, "preset": args.preset}
    if args.output:
        raw["output"] = args.output
    if args.plot:
        raw["emit_plot"] = True
    cfg = resolve_config(raw)
    meta = run_scenario(cfg)
    stem = cfg.output
    for entry in meta["series"]:
        wins = ", ".join(f"{w['location']:.4g}" for w in entry["windows"]) or "none"
        print(f"{entry['csv']}: windows at {wins}")
    if "fit" in meta:
        fit = meta["fit"]
        print(f"fit: slope {fit['slope']:.6g}, R^2 {fit['r_squared']:.5f}")
    if "collapse" in meta:
        print(f"collapse: ratio {meta['collapse']['ratio']:.4g}")
    if "comparison" in meta:
        for key, value in meta["comparison"].items():
            print(f"{key}: {value:.4g}")
    print(f"metadata: {stem}.json")
    return EXIT_OK


def _cmd_verify(args) -> int:
    try:
        results = acceptance.run_checks(args.name)
    except KeyError:
        known = ", ".join(sorted([*acceptance.CHECKS, *acceptance.ALIASES]))
        print(f"ntype-eit verify: unknown check {args.name!r}; choose 'all' or one of: {known}", file=sys.stderr)
        return EXIT_USAGE
    for r in results:
        print(acceptance.format_result(r))
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} passed")
    return EXIT_VERIFY if failed else EXIT_OK


def _cmd_list(_args) -> int:
    for name in PRESETS:
        print(f"{name:<12} {PRESET_DESCRIPTIONS[name]}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.verbose else logging.ERROR, format="%(levelname)s: %(message)s")
    handler = {"run": _cmd_run, "verify": _cmd_verify, "list-presets": _cmd_list}[args.command]
    try:
        return handler(args)
    except (ConfigError, OSError) as exc:
        print(f"ntype-eit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalFailure, DegenerateSteadyStateError, ArithmeticError) as exc:
        print(f"ntype-eit: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
