"""Command line front end.

Subcommands pick the task family; the config file carries the details:

* ``estimate``  runs estimate_T / estimate_tau configs,
* ``verify``    runs verify_theorem / verify_smoothing / verify_chain,
* ``witness``   runs verify_witness (the certificate chain),
* ``oracle``    runs the brute-force oracle,
* ``params``    prints the admissible (m, k) for given n and p.

Every run writes a JSON report plus a CSV trial summary and prints the
report to stdout in the format chosen by ``--format``.  Exit codes:
0 pass, 1 verified violation, 2 usage or config error, 3 capacity
refused.  The ``ENFLOTYPE_BACKEND`` and ``ENFLOTYPE_THREADS``
environment variables select the kernel backend and thread cap.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .errors import CapacityError, InvalidInputError, UsageError
from . import harness

_SUBCOMMAND_TASKS = {
    "estimate": ("estimate_T", "estimate_tau"),
    "verify": ("verify_theorem", "verify_smoothing", "verify_chain"),
    "witness": ("verify_witness",),
    "oracle": ("oracle",),
}

EXIT_PASS = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_CAPACITY = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="enflotype",
        description="Estimate and verify Rademacher and scaled torus type constants.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, tasks in _SUBCOMMAND_TASKS.items():
        cmd = sub.add_parser(name, help=f"run a config with task in {{{', '.join(tasks)}}}")
        cmd.add_argument("--config", required=True, help="TOML config file")
        cmd.add_argument("--seed", type=int, default=None, help="override the config seed")
        cmd.add_argument("--out", default=None, help="override the report output path")
        cmd.add_argument("--format", choices=("json", "csv"), default="json",
                         help="stdout format (files are always written in both)")
        cmd.add_argument("--cap", type=int, default=None,
                         help="override the exhaustive evaluation cap")
    params = sub.add_parser("params", help="print the admissible torus side and window")
    params.add_argument("--n", type=int, required=True, help="torus dimension")
    params.add_argument("--p", type=float, required=True, help="type exponent in [1, 2]")
    params.add_argument("--format", choices=("json", "csv"), default="json")
    return parser


def _run_params(args) -> int:
    m, k = harness.select_parameters(args.n, args.p)
    if args.format == "csv":
        sys.stdout.write("n,p,m,k\n")
        sys.stdout.write(f"{args.n},{args.p},{m},{k}\n")
    else:
        sys.stdout.write(json.dumps({"n": args.n, "p": args.p, "m": m, "k": k}, indent=2) + "\n")
    return EXIT_PASS


def _run_config(args) -> int:
    cfg = harness.load_config(args.config)
    allowed = _SUBCOMMAND_TASKS[args.command]
    if cfg.task not in allowed:
        raise UsageError(
            f"task {cfg.task!r} does not belong to subcommand {args.command!r} "
            f"(expected one of: {', '.join(allowed)})"
        )
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["out"] = args.out
    if args.cap is not None:
        if args.cap < 1:
            raise UsageError(f"--cap must be a positive integer, got {args.cap}")
        overrides["cap"] = args.cap
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
    report = harness.execute(cfg)
    json_path, csv_path = harness.write_report(report, cfg.out)
    if args.format == "csv":
        sys.stdout.write(harness.report_to_csv(report))
    else:
        sys.stdout.write(harness.report_to_json(report))
    sys.stderr.write(
        f"verdict={report.verdict} min_margin={report.min_margin} "
        f"report={json_path} summary={csv_path}\n"
    )
    return EXIT_PASS if report.verdict == "pass" else EXIT_VIOLATION


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "params":
            return _run_params(args)
        return _run_config(args)
    except (UsageError, InvalidInputError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except CapacityError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CAPACITY


if __name__ == "__main__":
    sys.exit(main())
