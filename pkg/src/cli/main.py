import argparse
import logging
import sys
from typing import List, Optional

from ..errors import ConfigError, MalformedCsvError, MetaError
from ..models import AdapterKind, ProjectionMode, UpdateTarget
from .commands import (
    DEFAULT_CONFIG, apply_overrides, cmd_ablation, cmd_baselines, cmd_report, cmd_run, cmd_train_sources,
    load_run_config, parse_seed_range, sweep_seeds,
)
from .logging_setup import configure_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RUNTIME = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="meta", description="Multi-source test-time adaptation simulator")
    subparsers = parser.add_subparsers(dest="command", required=True)

    def add_run_options(sub):
        sub.add_argument("--config", default=DEFAULT_CONFIG, help="RunConfig JSON file")
        sub.add_argument("--seed", type=int, help="Override the run seed")
        sub.add_argument("--seeds", help="Seed sweep A..B; outputs go to OUT/seed_<n>/")
        sub.add_argument("--workers", type=int, default=1, help="Processes for a seed sweep")
        sub.add_argument("--out", help="Override the output directory")
        sub.add_argument("--adapter", choices=[kind.value for kind in AdapterKind])
        sub.add_argument("--iters", type=int, help="Weight-solver iterations")
        sub.add_argument("--projection", choices=[mode.value for mode in ProjectionMode])

    add_run_options(subparsers.add_parser("train-sources", help="Train one source model per scenario domain"))
    add_run_options(subparsers.add_parser("run", help="Run MeTA over the scenario stream"))
    add_run_options(subparsers.add_parser("baselines", help="Single-source and uniform-ensemble baselines"))
    ablation = subparsers.add_parser("ablation", help="Adapt the most, least or all weighted sources")
    add_run_options(ablation)
    ablation.add_argument("--mode", required=True, choices=[mode.value for mode in UpdateTarget])

    report = subparsers.add_parser("report", help="SVG charts and summary.xlsx from CSV outputs")
    report.add_argument("csv", nargs="+", help="batches/ablation CSVs and forgetting CSVs")
    report.add_argument("--out", default="out/report", help="Directory for the charts")
    return parser


def dispatch(args: argparse.Namespace):
    if args.command == "report":
        return cmd_report(args.csv, args.out)

    cfg = apply_overrides(
        load_run_config(args.config),
        seed=args.seed, out=args.out, adapter=args.adapter, iters=args.iters, projection=args.projection,
    )
    seeds = parse_seed_range(args.seeds) if args.seeds else [cfg.seed]
    commands = {"train-sources": cmd_train_sources, "run": cmd_run, "baselines": cmd_baselines}
    if args.command == "ablation":
        return sweep_seeds(cmd_ablation, cfg, seeds, args.workers, extra=(UpdateTarget(args.mode),))
    return sweep_seeds(commands[args.command], cfg, seeds, args.workers)


def main(argv: Optional[List[str]] = None) -> int:
    configure_logging()
    args = build_parser().parse_args(argv)
    try:
        dispatch(args)
    except (ConfigError, MalformedCsvError) as e:
        logger.error("%s", e)
        return EXIT_USAGE
    except MetaError as e:
        logger.error("%s", e)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
