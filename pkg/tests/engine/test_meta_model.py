import inspect

import numpy as np
import pytest

from config import ALPHA_DEFAULT, ALPHA_MAX, ALPHA_MIN
from src.cli.csv_export import batch_frame
from src.engine import MetaModel, adaptation_targets, error_rate, run_meta, run_single_source_baseline
from src.errors import InvariantViolation, ModelMismatchError
from src.models import AdapterConfig, AdapterKind, SolverConfig, UpdateTarget
from src.nn import dumps
from src.scenario import build_scenario, iter_stream, load_scenario, one_hot

NO_ADAPTER = AdapterConfig(kind=AdapterKind.NONE)
LEARNED_COLUMNS = ["w_init", "w_star", "k", "alpha_best", "entropy_init", "entropy_final", "updated"]


def drifting(seed, batches=6, batch_size=128):
    return build_scenario(
        seed,
        [(one_hot(4, 0), batches), ([0.5, 0.5, 0.0, 0.0], batches), (one_hot(4, 2), batches)],
        batch_size=batch_size,
    )


def test_adaptation_targets():
    w = np.array([0.2, 0.4, 0.4, 0.0])
    assert adaptation_targets(w, UpdateTarget.MOST) == [1]
    assert adaptation_targets(w, UpdateTarget.LEAST) == [3]
    assert adaptation_targets(w, UpdateTarget.ALL) == [0, 1, 2, 3]
    assert adaptation_targets(np.full(3, 1 / 3), UpdateTarget.LEAST) == [0]


def test_error_rate():
    probs = np.array([[0.9, 0.1], [0.4, 0.6], [0.5, 0.5]])
    assert error_rate(probs, np.array([0, 0, 0])) == pytest.approx(1 / 3)


def test_single_source_is_a_degenerate_ensemble(trained_sources):
    domains, models = trained_sources(0)
    scenario = build_scenario(0, [([1.0], 8)], n_domains=1, batch_size=64)
    run = run_meta(models[:1], scenario, seed=0)
    baseline = run_single_source_baseline(models[:1], scenario)
    for record, single in zip(run.records, baseline):
        assert record.w_star == [1.0]
        assert record.k == 0
        assert record.meta_error == record.source_errors[0] == single.source_errors[0]


def test_frozen_sources_select_the_generating_domain(trained_sources):
    _, models = trained_sources(0)
    for j in range(4):
        scenario = build_scenario(0, [(one_hot(4, j), 20)], stream_seed=j)
        run = run_meta(models, scenario, adapter=NO_ADAPTER, seed=0)
        assert sum(record.k == j for record in run.records) >= 18
        assert all(record.updated == [] for record in run.records)
        assert [dumps(m) for m in run.models] == [dumps(m) for m in models]


def test_runs_are_deterministic(trained_sources):
    _, models = trained_sources(1)
    first = run_meta(models, drifting(1), seed=1)
    second = run_meta(models, drifting(1), seed=1)
    assert batch_frame(first.records).equals(batch_frame(second.records))
    assert [dumps(m) for m in first.models] == [dumps(m) for m in second.models]


def test_exactly_one_source_is_adapted_per_batch(trained_sources):
    _, models = trained_sources(0)
    simulation = MetaModel(models, drifting(0), debug_snapshots=True)
    simulation.run_full_stream()
    assert all(record.updated == [record.k] for record in simulation.records)
    assert sum(agent.adaptation_count for agent in simulation.source_agents) == len(simulation.records)
    # the inputs are copied, never adapted in place
    assert [dumps(m) for m in simulation.pristine_models] == [dumps(m) for m in models]


def test_audit_catches_a_stray_update(trained_sources):
    _, models = trained_sources(0)
    simulation = MetaModel(models, drifting(0, batches=1), debug_snapshots=True)
    before = simulation._serialize()
    simulation.source_models[3].bn[0].gamma[0] += 1e-9
    with pytest.raises(InvariantViolation):
        simulation._audit_snapshots(before, [0], 0)


def test_labels_only_reach_the_error_columns(trained_sources, monkeypatch):
    _, models = trained_sources(2)
    scenario = drifting(2, batches=4)
    honest = run_meta(models, scenario, seed=2)

    def zero_labels(s):
        for item in iter_stream(s):
            yield item._replace(batch=item.batch._replace(y=np.zeros_like(item.batch.y)))

    monkeypatch.setattr("src.engine.meta_model.iter_stream", zero_labels)
    blind = run_meta(models, scenario, seed=2)
    for a, b in zip(honest.records, blind.records):
        assert a.model_dump(include=set(LEARNED_COLUMNS)) == b.model_dump(include=set(LEARNED_COLUMNS))
    assert [dumps(m) for m in honest.models] == [dumps(m) for m in blind.models]
    assert [r.meta_error for r in honest.records] != [r.meta_error for r in blind.records]


def test_weight_solve_sees_features_only(trained_sources):
    _, models = trained_sources(0)
    scenario = drifting(0, batches=1)
    simulation = MetaModel(models, scenario, seed=0)
    assert list(inspect.signature(simulation.solve_batch).parameters) == ["t", "X"]
    item = next(iter_stream(scenario))
    first = simulation.solve_batch(item.t, item.batch.X)
    again = simulation.solve_batch(item.t, item.batch.X)
    assert np.array_equal(first.w_star, again.w_star)
    assert first.updated == [first.k] == [int(np.argmax(first.w_star))]
    assert first.cube.shape == (128, 4, 5)
    assert [dumps(m) for m in simulation.source_models] == [dumps(m) for m in models]


def test_step_sizes_stay_in_the_clamp(trained_sources):
    _, models = trained_sources(0)
    run = run_meta(models, drifting(0), seed=0)
    for record in run.records:
        assert np.isfinite(record.alpha_best)
        assert ALPHA_MIN <= record.alpha_best <= ALPHA_MAX or record.alpha_best == ALPHA_DEFAULT
        assert record.entropy_final <= record.entropy_init


def test_fixed_step_mode_uses_the_fixed_alpha(trained_sources):
    _, models = trained_sources(0)
    solver = SolverConfig(step_mode="fixed", alpha_fixed=0.25)
    run = run_meta(models, drifting(0, batches=2), solver=solver, seed=0)
    assert all(record.alpha_best == 0.25 for record in run.records)


def test_datacollector_tracks_every_batch(trained_sources):
    _, models = trained_sources(0)
    simulation = MetaModel(models, drifting(0, batches=2), adapter=NO_ADAPTER)
    records = simulation.run_full_stream()
    model_vars = simulation.datacollector.get_model_vars_dataframe()
    assert len(model_vars) == len(records) == 6
    assert model_vars["selected_source"].tolist() == [record.k for record in records]
    agent_vars = simulation.datacollector.get_agent_vars_dataframe()
    assert len(agent_vars) == 6 * 4
    assert not simulation.running


def test_stream_progress_goes_to_stdout(trained_sources, capsys):
    _, models = trained_sources(0)
    MetaModel(models, drifting(0, batches=1), adapter=NO_ADAPTER).run_full_stream()
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("Running batch 1/3 (segment 0) - MeTA error: ")


def test_incompatible_sources_are_rejected(trained_sources, random_model):
    _, models = trained_sources(0)
    with pytest.raises(ModelMismatchError):
        MetaModel([models[0], random_model(0, layer_dims=(16, 8, 5))], drifting(0))


@pytest.mark.slow
def test_full_default_run_keeps_alpha_in_the_clamp(trained_sources):
    _, models = trained_sources(0)
    run = run_meta(models, load_scenario("data/scenario.default.json"), seed=0)
    assert len(run.records) == 60
    assert all(ALPHA_MIN <= r.alpha_best <= ALPHA_MAX or r.alpha_best == ALPHA_DEFAULT for r in run.records)
