import numpy as np
import pytest

from tests.helpers import SEEDS
from src.adapters import param_distance
from src.engine import (
    evaluate_forgetting, own_domain_sets, run_meta, run_single_source_baseline, run_uniform_ensemble,
    run_update_ablation,
)
from src.errors import DimensionError
from src.models import AdapterConfig, AdapterKind, DomainParams, ScenarioFile, ScenarioSegment, UpdateTarget
from src.nn import dumps
from src.scenario import build_scenario, one_hot

NO_ADAPTER = AdapterConfig(kind=AdapterKind.NONE)
# noisier, closer classes: sources err off their own domain
HARDER = {"noise_scale": 1.5, "mean_scale": 1.5}
STRONG_TENT = AdapterConfig(lr=1e-2, steps=3)


def three_segments(seed, batches=20, params=None):
    return build_scenario(
        seed,
        [(one_hot(4, 0), batches), ([0.0, 0.5, 0.5, 0.0], batches), (one_hot(4, 2), batches)],
        params=params,
    )


def total_drift(run):
    return sum(param_distance(a, p) for a, p in zip(run.models, run.simulation.pristine_models))


def mean_increase(run):
    return float(np.mean(run.forgetting[-1].deltas))


def test_most_mode_is_the_meta_run(trained_sources):
    _, models = trained_sources(0)
    scenario = three_segments(0, batches=3)
    ablation = run_update_ablation(models, scenario, UpdateTarget.MOST, seed=0)
    meta = run_meta(models, scenario, seed=0)
    assert ablation.records == meta.records


def test_updating_all_sources_drifts_at_least_as_far(trained_sources):
    _, models = trained_sources(0)
    scenario = three_segments(0, batches=4)
    every = run_update_ablation(models, scenario, UpdateTarget.ALL, seed=0)
    most = run_meta(models, scenario, seed=0)
    assert total_drift(every) >= total_drift(most)
    assert all(record.updated == [0, 1, 2, 3] for record in every.records)


def test_least_mode_leaves_the_selected_source_alone(trained_sources):
    _, models = trained_sources(0)
    run = run_update_ablation(models, build_scenario(0, [(one_hot(4, 1), 10)]), UpdateTarget.LEAST, seed=0)
    for record in run.records:
        assert record.updated == [int(np.argmin(record.w_star))]
        assert record.k not in record.updated


def test_forgetting_of_untouched_models_is_zero(trained_sources):
    domains, models = trained_sources(0)
    sets = own_domain_sets(models, domains, seed=0, n=500)
    record = evaluate_forgetting(models, [m.copy() for m in models], sets, "start")
    assert record.checkpoint == "start"
    assert record.deltas == [0.0] * 4
    assert record.param_drift == [0.0] * 4
    with pytest.raises(DimensionError):
        evaluate_forgetting(models, models[:3], sets)


def test_no_adapter_run_forgets_nothing(trained_sources):
    domains, models = trained_sources(0)
    sets = own_domain_sets(models, domains, seed=0, n=500)
    run = run_meta(models, three_segments(0, batches=3), adapter=NO_ADAPTER, seed=0, held_out_sets=sets)
    assert [record.checkpoint for record in run.forgetting] == ["segment_0", "segment_1", "segment_2"]
    for record in run.forgetting:
        assert record.deltas == [0.0] * 4
        assert record.pristine_errors == run.forgetting[0].pristine_errors


def test_single_source_baseline_bounds(trained_sources):
    _, models = trained_sources(0)
    records = run_single_source_baseline(models, three_segments(0, batches=3))
    assert len(records) == 9
    assert all(record.best_error <= record.worst_error for record in records)
    single = run_single_source_baseline(models[:1], build_scenario(0, [([1.0], 3)], n_domains=1))
    assert all(record.best_error == record.worst_error for record in single)


def test_frozen_own_source_is_the_best_single_source(trained_sources):
    _, models = trained_sources(0)
    for j in range(4):
        records = run_single_source_baseline(models, build_scenario(0, [(one_hot(4, j), 10)]), NO_ADAPTER)
        assert sum(int(np.argmin(r.source_errors)) == j for r in records) >= 9


def test_uniform_ensemble_degenerate_cases(trained_sources):
    _, models = trained_sources(0)
    scenario = build_scenario(0, [([1.0], 4)], n_domains=1)
    alone = run_uniform_ensemble(models[:1], scenario)
    frozen = run_single_source_baseline(models[:1], scenario, NO_ADAPTER)
    assert [r.uniform_error for r in alone] == [r.source_errors[0] for r in frozen]


def test_uniform_ensemble_of_identical_models_matches_one(trained_sources):
    _, models = trained_sources(0)
    scenario = build_scenario(0, [([0.5, 0.5], 4)], n_domains=2)
    pair = run_uniform_ensemble([models[0], models[0].copy()], scenario)
    meta = run_meta([models[0], models[0].copy()], scenario, adapter=NO_ADAPTER, seed=0)
    assert [r.uniform_error for r in pair] == [r.source_errors[0] for r in meta.records]


def test_reference_columns_match_the_baseline_runs(trained_sources):
    _, models = trained_sources(0)
    scenario = build_scenario(0, [([0.5, 0.5, 0.0, 0.0], 6)])
    meta = run_meta(models, scenario, seed=0)
    single = run_single_source_baseline(models, scenario)
    uniform = run_uniform_ensemble(models, scenario)
    assert [r.source_errors for r in meta.records] == [r.source_errors for r in single]
    assert [(r.best_error, r.worst_error) for r in meta.records] == [(r.best_error, r.worst_error) for r in single]
    assert [r.uniform_error for r in meta.records] == [r.uniform_error for r in uniform]


def test_reference_copies_adapt_even_when_the_ensemble_member_does_not(trained_sources):
    _, models = trained_sources(0)
    run = run_meta(models, build_scenario(0, [([0.5, 0.5, 0.0, 0.0], 6)]), seed=0)
    touched = {j for record in run.records for j in record.updated}
    untouched = [j for j in range(4) if j not in touched]
    assert untouched
    for j in untouched:
        assert dumps(run.models[j]) == dumps(models[j])
        assert dumps(run.simulation.independent.models[j]) != dumps(models[j])


@pytest.mark.slow
def test_meta_matches_the_best_adapted_source_on_a_stationary_mixture(trained_sources):
    meta_errors, best_errors = [], []
    for seed in SEEDS:
        _, models = trained_sources(seed, **HARDER)
        scenario = build_scenario(seed, [([0.5, 0.5, 0.0, 0.0], 40)], params=DomainParams(**HARDER))
        meta = run_meta(models, scenario, seed=seed)
        single = run_single_source_baseline(models, scenario)
        meta_errors.append(np.mean([r.meta_error for r in meta.records]))
        # best source over the whole stream
        best_errors.append(np.min(np.mean([r.source_errors for r in single], axis=0)))
    assert np.mean(best_errors) > 0
    assert np.mean(meta_errors) <= np.mean(best_errors) + 0.01


@pytest.mark.slow
def test_meta_forgets_less_than_updating_everything(trained_sources):
    meta_increase, all_increase = [], []
    for seed in SEEDS:
        domains, models = trained_sources(seed, **HARDER)
        sets = own_domain_sets(models, domains, seed)
        scenario = three_segments(seed, params=DomainParams(**HARDER))
        meta = run_meta(models, scenario, STRONG_TENT, seed=seed, held_out_sets=sets)
        every = run_update_ablation(models, scenario, UpdateTarget.ALL, STRONG_TENT, seed=seed, held_out_sets=sets)
        meta_increase.append(mean_increase(meta))
        all_increase.append(mean_increase(every))
    assert np.mean(all_increase) > 0
    assert np.mean(meta_increase) <= 0.02
    assert np.mean(meta_increase) < np.mean(all_increase)


@pytest.mark.slow
def test_meta_beats_the_uniform_ensemble_with_a_corrupted_source(trained_sources):
    meta_errors, uniform_errors = [], []
    for seed in SEEDS:
        domains, models = trained_sources(seed, corrupted=(1,))
        scenario = ScenarioFile(
            domains=domains[:2],
            segments=[ScenarioSegment(pi=[1.0, 0.0], batches=20)],
            seed=seed,
        )
        meta = run_meta(models[:2], scenario, seed=seed)
        uniform = run_uniform_ensemble(models[:2], scenario)
        meta_errors.append(np.mean([r.meta_error for r in meta.records]))
        uniform_errors.append(np.mean([r.uniform_error for r in uniform]))
    assert np.mean(meta_errors) < np.mean(uniform_errors)
