"""Drivers for the MeTA stream, its update-target ablation and the baselines."""
from typing import List, NamedTuple, Optional, Sequence

from ..models import (
    AdapterConfig, BatchRecord, ForgettingRecord, ScenarioFile, SolverConfig, SourceBaselineRecord, UniformRecord,
    UpdateTarget,
)
from ..nn import MlpModel, check_compatible
from ..scenario import LabeledBatch, iter_stream
from .baselines import IndependentSources, uniform_error
from .meta_model import MetaModel


class MetaRun(NamedTuple):
    records: List[BatchRecord]
    forgetting: List[ForgettingRecord]
    models: List[MlpModel]
    simulation: MetaModel


def run_update_ablation(
    models: Sequence[MlpModel],
    scenario: ScenarioFile,
    mode: UpdateTarget,
    adapter: Optional[AdapterConfig] = None,
    solver: Optional[SolverConfig] = None,
    seed: int = 0,
    debug_snapshots: bool = False,
    held_out_sets: Optional[Sequence[LabeledBatch]] = None,
) -> MetaRun:
    simulation = MetaModel(
        models, scenario, adapter=adapter, solver=solver, update_target=mode, seed=seed,
        debug_snapshots=debug_snapshots, held_out_sets=held_out_sets,
    )
    records = simulation.run_full_stream()
    return MetaRun(records, simulation.forgetting, simulation.source_models, simulation)


def run_meta(
    models: Sequence[MlpModel],
    scenario: ScenarioFile,
    adapter: Optional[AdapterConfig] = None,
    solver: Optional[SolverConfig] = None,
    seed: int = 0,
    debug_snapshots: bool = False,
    held_out_sets: Optional[Sequence[LabeledBatch]] = None,
) -> MetaRun:
    """Adapt only the most-weighted source on every batch."""
    return run_update_ablation(
        models, scenario, UpdateTarget.MOST, adapter, solver, seed, debug_snapshots, held_out_sets,
    )


def run_single_source_baseline(
    models: Sequence[MlpModel],
    scenario: ScenarioFile,
    adapter: Optional[AdapterConfig] = None,
) -> List[SourceBaselineRecord]:
    """Every source adapted independently on every batch; best/worst taken per batch."""
    sources = IndependentSources(models, adapter)
    records = []
    for item in iter_stream(scenario):
        errors = sources.score_then_adapt(item.batch.X, item.batch.y)
        records.append(SourceBaselineRecord(
            t=item.t,
            segment=item.segment,
            source_errors=errors,
            best_error=min(errors),
            worst_error=max(errors),
        ))
    return records


def run_uniform_ensemble(models: Sequence[MlpModel], scenario: ScenarioFile) -> List[UniformRecord]:
    """Equal-weight ensemble of the frozen sources."""
    check_compatible(models)
    return [
        UniformRecord(t=item.t, segment=item.segment, uniform_error=uniform_error(models, item.batch.X, item.batch.y))
        for item in iter_stream(scenario)
    ]
