"""Command line entry point: ``thetalab run``."""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import replace

from .config import SUITES, RunConfig, config_to_dict, load_config, validate
from .errors import ConfigInvalid
from .suites import Context, run_checks, sample_rows

CSV_HEADER = (["kind"] + [f"z{i}{p}" for i in (1, 2, 3) for p in ("re", "im")] + ["residual"]
              + [f"c{i}{p}" for i in range(1, 7) for p in ("re", "im")] + [f"s{i}" for i in range(1, 5)])

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _u64(text):
    try:
        v = int(text, 10)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _positive(text):
    try:
        v = int(text, 10)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigInvalid(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="thetalab", description="Run the verification suites.")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run suites and write a JSON report")
    run.add_argument("--config", help="JSON config file")
    run.add_argument("--suite", action="append", choices=SUITES + ("all",),
                     help="suite to run (repeatable); default from config or all")
    run.add_argument("--out", help="report path (default: stdout)")
    run.add_argument("--samples-out", help="CSV of canonical-suite samples")
    run.add_argument("--seed", type=_u64)
    run.add_argument("--samples", type=_positive, help="number of random surface samples")
    return parser


def resolve_config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    kw = {}
    if args.suite:
        kw["suites"] = tuple(args.suite)
    if args.seed is not None:
        kw["seed"] = args.seed
    if args.samples is not None:
        kw["samples"] = args.samples
    cfg = validate(replace(cfg, **kw))
    if args.samples_out and "canonical" not in cfg.expanded_suites():
        raise ConfigInvalid("--samples-out needs the canonical suite")
    return cfg


def thread_count() -> int:
    raw = os.environ.get("VERIFIER_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigInvalid(f"VERIFIER_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigInvalid(f"VERIFIER_THREADS must be a positive integer, got {raw!r}")
    return n


def build_report(cfg: RunConfig, results) -> dict:
    counts = {s: sum(r.status == s for r in results) for s in ("pass", "fail", "finding")}
    return {
        "config": config_to_dict(cfg),
        "suites": list(cfg.expanded_suites()),
        "results": [r.to_dict() for r in results],
        "summary": counts,
        "exit_code": EXIT_FAIL if counts["fail"] else EXIT_PASS,
    }


def write_samples(path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for row in rows:
            w.writerow([row[0]] + ["%.17g" % float(v) for v in row[1:]])


def run(cfg: RunConfig, threads: int = 1):
    ctx = Context(cfg)
    results = run_checks(ctx, cfg.expanded_suites(), threads)
    return build_report(cfg, results), sample_rows(ctx)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = resolve_config(args)
        threads = thread_count()
    except ConfigInvalid as exc:
        print(f"thetalab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    report, rows = run(cfg, threads)
    text = json.dumps(report, indent=2, allow_nan=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.samples_out:
        write_samples(args.samples_out, rows)
    for r in report["results"]:
        print(f"{r['status']:8s} {r['suite']}/{r['check']}  max_error={r['max_error']:.3e}", file=sys.stderr)
    return report["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
