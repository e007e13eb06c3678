from .commands import (
    apply_overrides, cmd_ablation, cmd_baselines, cmd_report, cmd_run, cmd_train_sources, load_run_config,
    parse_seed_range, sweep_seeds,
)
from .main import build_parser, main
