"""Command line entry point.

Subcommands map onto pipeline stages:

    glembed graphlets --config run.cfg   GDV + graphlet adjacency dumps
    glembed represent --config run.cfg   representation matrices as TSV
    glembed embed     --config run.cfg   factorized embedding spaces
    glembed evaluate  --config run.cfg   homophily / separability / auroc / modules
    glembed sweep     --config run.cfg   synthetic homophily-vs-F1 sweep
    glembed all       --config run.cfg   everything the config's tasks enable

Progress and warnings go to stderr; all machine-readable output goes to
files under the output directory.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .config import ConfigError, validate_config
from .pipeline import run_pipeline

_STAGE_SETS = {
    "graphlets": ("census",),
    "represent": ("represent",),
    "embed": ("embed",),
    "evaluate": ("embed", "evaluate"),
    "sweep": ("sweep",),
    "all": ("represent", "embed", "evaluate", "sweep"),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="glembed",
        description="Graphlet-based network representations, embeddings, and evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _STAGE_SETS:
        p = sub.add_parser(name, help=f"run the {name} stage(s)")
        p.add_argument("--config", required=True, help="path to the run config file")
        p.add_argument("--output", default=None, help="override the output directory")
        p.add_argument(
            "--jobs", type=int, default=1, help="parallel (network x representation) jobs"
        )
        p.add_argument(
            "--resume",
            action="store_true",
            help="skip pairs already completed under the same config hash",
        )
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = validate_config(args.config)
    except ConfigError as exc:
        for err in exc.errors:
            print(f"config error: {err}", file=sys.stderr)
        return 2
    if args.output:
        cfg = replace(cfg, output=args.output)

    stages = _STAGE_SETS[args.command]
    if args.command == "sweep" and "sweep" not in cfg.tasks:
        # explicit invocation runs the sweep even when tasks leave it out
        cfg = replace(cfg, tasks=cfg.tasks + ("sweep",))
    report = run_pipeline(cfg, stages=stages, resume=args.resume, jobs=args.jobs)
    failed = report.failed
    if failed:
        print(f"{len(failed)} pair(s) failed", file=sys.stderr)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
