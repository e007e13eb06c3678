import json

import numpy as np
import pytest

from src.errors import ConfigError
from src.models import ScenarioFile, ScenarioPreset, ScenarioSegment
from src.scenario import build_scenario, iter_stream, load_scenario, one_hot, save_scenario


def small_scenario():
    return build_scenario(0, [(one_hot(3, 0), 2), ([0.5, 0.5, 0.0], 3)], n_domains=3, batch_size=16)


def test_stream_order_and_segments():
    items = list(iter_stream(small_scenario()))
    assert [item.t for item in items] == [0, 1, 2, 3, 4]
    assert [item.segment for item in items] == [0, 0, 1, 1, 1]
    assert all(item.batch.X.shape == (16, 16) for item in items)
    assert np.all(items[0].batch.provenance == 0)


def test_stream_is_reproducible_and_batches_differ():
    first = list(iter_stream(small_scenario()))
    second = list(iter_stream(small_scenario()))
    for a, b in zip(first, second):
        np.testing.assert_array_equal(a.batch.X, b.batch.X)
    assert not np.array_equal(first[0].batch.X, first[1].batch.X)


def test_scenario_round_trip(tmp_path):
    scenario = small_scenario()
    path = tmp_path / "scenario.json"
    save_scenario(scenario, path)
    assert load_scenario(path) == scenario


def test_preset_expands_to_default_domains(tmp_path):
    preset = ScenarioPreset(base_seed=0, n_domains=3, segments=[ScenarioSegment(pi=one_hot(3, 1), batches=2)])
    path = tmp_path / "preset.json"
    path.write_text(preset.model_dump_json(), encoding="utf-8")
    loaded = load_scenario(path)
    assert isinstance(loaded, ScenarioFile)
    assert loaded.domains == build_scenario(0, [(one_hot(3, 1), 2)], n_domains=3).domains


def test_stationary_flag():
    assert build_scenario(0, [(one_hot(2, 0), 4)], n_domains=2).script.stationary
    assert not small_scenario().script.stationary


def test_missing_and_invalid_scenarios(tmp_path):
    with pytest.raises(ConfigError, match="nowhere.json"):
        load_scenario(tmp_path / "nowhere.json")
    bad = tmp_path / "bad.json"
    document = json.loads(small_scenario().model_dump_json())
    document["segments"][0]["pi"] = [0.7, 0.7, 0.0]
    bad.write_text(json.dumps(document), encoding="utf-8")
    with pytest.raises(ConfigError):
        load_scenario(bad)


def test_segment_needs_a_batch():
    with pytest.raises(ValueError):
        ScenarioSegment(pi=[1.0], batches=0)
