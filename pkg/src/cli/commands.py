import json
import logging
from multiprocessing import Pool
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Union

from pydantic import ValidationError

from ..engine import (
    own_domain_sets, run_meta, run_single_source_baseline, run_uniform_ensemble, run_update_ablation,
)
from ..errors import ConfigError
from ..models import RunConfig, TrainingSummaryRow, UpdateTarget
from ..nn import MlpModel, check_compatible, load_model, save_model
from ..scenario import train_source
from .csv_export import (
    BATCH_KIND, batch_frame, forgetting_frame, read_report_csv, single_source_frame, training_frame,
    uniform_frame, write_csv,
)
from .excel_report import write_summary_workbook
from .report import plot_error_over_time, plot_forgetting

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = "data/run.default.json"


def load_run_config(path: Union[str, Path, None] = None) -> RunConfig:
    path = Path(path or DEFAULT_CONFIG)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            return RunConfig.model_validate(json.load(f))
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path} is not valid JSON: {e}")
    except ValidationError as e:
        raise ConfigError(f"invalid config {path}: {e}")


def source_path(models_dir: Union[str, Path], index: int) -> Path:
    return Path(models_dir) / f"source_{index}.json"


def load_sources(cfg: RunConfig) -> List[MlpModel]:
    n_sources = len(cfg.scenario.domains)
    paths = [source_path(cfg.models_dir, j) for j in range(n_sources)]
    missing = [str(p) for p in paths if not p.is_file()]
    if missing:
        raise ConfigError(f"trained models not found: {', '.join(missing)} (run train-sources first)")
    models = [load_model(p) for p in paths]
    check_compatible(models)
    return models


def cmd_train_sources(cfg: RunConfig) -> Path:
    """Train one source per scenario domain; writes the models and training_summary.csv."""
    rows = []
    for j, domain in enumerate(cfg.scenario.domains):
        print(f"Training source {j + 1}/{len(cfg.scenario.domains)} on domain {domain.domain_id}")
        train_cfg = cfg.train.model_copy(update={"seed": cfg.seed, "permute_labels": j in cfg.corrupted_sources})
        model = train_source(domain, train_cfg)
        path = source_path(cfg.models_dir, j)
        save_model(model, path)
        rows.append(TrainingSummaryRow(
            source_id=j,
            domain_id=domain.domain_id,
            seed=cfg.seed,
            permute_labels=train_cfg.permute_labels,
            own_domain_error=model.meta.train_err,
            path=str(path),
        ))
        print(f"Source {j} own-domain error: {model.meta.train_err:.4f}")
    return write_csv(training_frame(rows), Path(cfg.output_dir) / "training_summary.csv")


def cmd_run(cfg: RunConfig) -> Path:
    """MeTA over the scenario stream; batches.csv, forgetting.csv and the adapted models."""
    models = load_sources(cfg)
    held_out = own_domain_sets(models, cfg.scenario.domains, cfg.seed)
    run = run_meta(
        models, cfg.scenario, cfg.adapter, cfg.solver, cfg.seed,
        debug_snapshots=cfg.debug.snapshots, held_out_sets=held_out,
    )
    out = Path(cfg.output_dir)
    for j, model in enumerate(run.models):
        save_model(model, source_path(out / "adapted", j))
    write_csv(forgetting_frame(run.forgetting), out / "forgetting.csv")
    return write_csv(batch_frame(run.records), out / "batches.csv")


def cmd_baselines(cfg: RunConfig) -> Path:
    models = load_sources(cfg)
    out = Path(cfg.output_dir)
    print("Running single-source baseline")
    write_csv(single_source_frame(run_single_source_baseline(models, cfg.scenario, cfg.adapter)), out / "single_source.csv")
    print("Running uniform ensemble baseline")
    return write_csv(uniform_frame(run_uniform_ensemble(models, cfg.scenario)), out / "uniform.csv")


def cmd_ablation(cfg: RunConfig, mode: UpdateTarget) -> Path:
    models = load_sources(cfg)
    held_out = own_domain_sets(models, cfg.scenario.domains, cfg.seed)
    run = run_update_ablation(
        models, cfg.scenario, mode, cfg.adapter, cfg.solver, cfg.seed,
        debug_snapshots=cfg.debug.snapshots, held_out_sets=held_out,
    )
    out = Path(cfg.output_dir)
    write_csv(forgetting_frame(run.forgetting), out / f"ablation_{mode.value}_forgetting.csv")
    return write_csv(batch_frame(run.records), out / f"ablation_{mode.value}.csv")


def cmd_report(csv_paths: Sequence[Union[str, Path]], out_dir: Union[str, Path]) -> List[Path]:
    """SVG charts and summary.xlsx from batch and forgetting CSVs."""
    out_dir = Path(out_dir)
    written = []
    batches, forgetting = None, None
    for csv_path in csv_paths:
        kind, frame = read_report_csv(csv_path)
        stem = Path(csv_path).stem
        if kind == BATCH_KIND:
            batches = frame
            written.append(plot_error_over_time(frame, out_dir / f"{stem}_error.svg"))
        else:
            forgetting = frame
            written.append(plot_forgetting(frame, out_dir / f"{stem}.svg"))
    if batches is not None:
        written.append(write_summary_workbook(batches, out_dir / "summary.xlsx", forgetting))
    for path in written:
        print(f"Report written to {path}")
    return written


def with_seed(cfg: RunConfig, seed: int, sweep: bool) -> RunConfig:
    """Per-seed copy of the config; a sweep nests models and outputs under seed_<n>/.

    In a sweep the seed also drives the test stream, so every seed sees its own
    batches; the domains stay those of the scenario file.
    """
    update = {"seed": seed}
    if sweep:
        update["models_dir"] = str(Path(cfg.models_dir) / f"seed_{seed}")
        update["output_dir"] = str(Path(cfg.output_dir) / f"seed_{seed}")
        update["scenario"] = cfg.scenario.model_copy(update={"seed": seed})
    return cfg.model_copy(update=update)


def _run_one(job):
    command, cfg, extra = job
    return command(cfg, *extra)


def sweep_seeds(
    command: Callable,
    cfg: RunConfig,
    seeds: Sequence[int],
    workers: int = 1,
    extra: tuple = (),
) -> list:
    jobs = [(command, with_seed(cfg, seed, len(seeds) > 1), extra) for seed in seeds]
    if workers > 1 and len(jobs) > 1:
        with Pool(processes=min(workers, len(jobs))) as pool:
            return pool.map(_run_one, jobs)
    return [_run_one(job) for job in jobs]


def parse_seed_range(text: str) -> List[int]:
    """'3' -> [3]; '0..4' -> [0, 1, 2, 3, 4]."""
    try:
        if ".." in text:
            first, last = (int(part) for part in text.split("..", 1))
        else:
            first = last = int(text)
    except ValueError:
        raise ConfigError(f"invalid seed range {text!r}; expected N or A..B")
    if last < first:
        raise ConfigError(f"invalid seed range {text!r}; end before start")
    return list(range(first, last + 1))


def apply_overrides(
    cfg: RunConfig,
    seed: Optional[int] = None,
    out: Optional[str] = None,
    adapter: Optional[str] = None,
    iters: Optional[int] = None,
    projection: Optional[str] = None,
) -> RunConfig:
    try:
        data = cfg.model_dump()
        if seed is not None:
            data["seed"] = seed
        if out is not None:
            data["output_dir"] = out
        if adapter is not None:
            data["adapter"]["kind"] = adapter
        if iters is not None:
            data["solver"]["iters"] = iters
        if projection is not None:
            data["solver"]["projection"] = projection
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"invalid command-line override: {e}")
