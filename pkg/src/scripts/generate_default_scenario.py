#!/usr/bin/env python3
"""Write the default drifting scenario, compact and (with --expand) with explicit domains.

Run from the repository root: python -m src.scripts.generate_default_scenario [--expand]
"""
import json
import sys

from config import BATCH_SIZE, N_SOURCES
from src.models import ScenarioPreset, ScenarioSegment
from src.scenario import one_hot, save_scenario

SEGMENT_BATCHES = 15

compact_file = "./data/scenario.default.json"
expanded_file = "./data/scenario.default.expanded.json"

preset = ScenarioPreset(
    base_seed=0,
    n_domains=N_SOURCES,
    batch_size=BATCH_SIZE,
    seed=0,
    segments=[
        ScenarioSegment(pi=one_hot(N_SOURCES, 0), batches=SEGMENT_BATCHES),
        ScenarioSegment(pi=[0.5, 0.5, 0.0, 0.0], batches=SEGMENT_BATCHES),
        ScenarioSegment(pi=one_hot(N_SOURCES, 2), batches=SEGMENT_BATCHES),
        ScenarioSegment(pi=[0.0, 0.3, 0.3, 0.4], batches=SEGMENT_BATCHES),
    ],
)

try:
    with open(compact_file, "w", encoding="utf-8", newline="\n") as f:
        json.dump(preset.model_dump(exclude={"params"}), f, indent=2)
        f.write("\n")
    print(f"Written to {compact_file}")

    if "--expand" in sys.argv[1:]:
        scenario = preset.expand()
        save_scenario(scenario, expanded_file)
        print(f"Written to {expanded_file} ({len(scenario.domains)} domains, {scenario.total_batches} batches)")

except OSError as e:
    print(f"Error: {e}")
    sys.exit(1)
