"""Command-line entry point: ``uwbsnn run | list-strategies | validate-dataset``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections import Counter

from . import __version__
from .config import Config, load_config
from .dataset import Schema, load_dataset
from .errors import UwbSnnError
from .pipeline import format_table, run_all

log = logging.getLogger("uwbsnn")


def _cmd_run(args) -> int:
    cfg = load_config(args.config) if args.config else Config()
    manifest = run_all(
        cfg,
        strategies=args.strategy,
        seeds=args.seed,
        synthetic=args.synthetic,
        out_dir=args.out,
        predictions=args.predictions,
        dump_liquid=args.dump_liquid,
        log=log.info,
    )
    print(format_table(manifest["results"], manifest["strategies"]), end="")
    print(f"total {manifest['_timings']['total_s']:.1f} s; artifacts in {args.out}")
    return 0


def _cmd_list(args) -> int:
    print(format_table(), end="")
    return 0


def _cmd_validate(args) -> int:
    schema = Schema()
    if args.config:
        schema = load_config(args.config).dataset.schema
    samples = load_dataset(args.paths, schema)
    labels = Counter(s.label for s in samples)
    report = {
        "records": len(samples),
        "los": labels.get(0, 0),
        "nlos": labels.get(1, 0),
        "cir_length": len(samples[0].cir) if samples else 0,
        "fp_idx_range": [min(s.fp_idx for s in samples), max(s.fp_idx for s in samples)] if samples else None,
    }
    print(json.dumps(report, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uwbsnn", description="Spiking LOS/NLOS classification runs")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--list-strategies", action="store_true", help="print the strategy matrix and exit")
    parser.add_argument("-v", "--verbose", action="store_true", help="log per-seed progress")
    sub = parser.add_subparsers(dest="command")

    run = sub.add_parser("run", help="train and evaluate strategies")
    run.add_argument("--config", help="JSON config file (defaults apply when omitted)")
    run.add_argument("--strategy", type=int, action="append", metavar="K", help="strategy id 1-10; repeatable")
    run.add_argument("--seed", type=int, action="append", metavar="S", help="run seed; repeatable")
    run.add_argument("--synthetic", action="store_true", help="use the built-in synthetic dataset")
    run.add_argument("--out", default="results", help="output directory (default: results)")
    run.add_argument("--predictions", action="store_true", help="also write predictions.csv")
    run.add_argument("--dump-liquid", action="store_true", help="add liquid weight statistics to the manifest")
    run.set_defaults(func=_cmd_run)

    ls = sub.add_parser("list-strategies", help="print the strategy matrix")
    ls.set_defaults(func=_cmd_list)

    val = sub.add_parser("validate-dataset", help="parse CSV files and summarize them")
    val.add_argument("paths", nargs="+")
    val.add_argument("--config", help="take the column schema from this config")
    val.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)
    if args.list_strategies:
        return _cmd_list(args)
    if args.command is None:
        parser.print_help(sys.stderr)
        return 2
    try:
        return args.func(args)
    except UwbSnnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
