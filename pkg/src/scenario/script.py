import json
from pathlib import Path
from typing import Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import ValidationError

from config import BATCH_SIZE, N_SOURCES
from ..errors import ConfigError
from ..models import DomainParams, MixtureSpec, ScenarioFile, ScenarioSegment, scenario_from_dict
from .domains import make_default_domains
from .sampling import LabeledBatch, sample_batch

STREAM_BATCH_TAG = 9


class StreamBatch(NamedTuple):
    t: int
    segment: int
    pi: List[float]
    batch: LabeledBatch


def load_scenario(path: Union[str, Path]) -> ScenarioFile:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"scenario file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            return scenario_from_dict(json.load(f))
    except (json.JSONDecodeError, ValidationError) as e:
        raise ConfigError(f"invalid scenario file {path}: {e}")


def save_scenario(scenario: ScenarioFile, path: Union[str, Path]):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(scenario.model_dump_json(indent=2))


def build_scenario(
    base_seed: int,
    segments: Sequence[Tuple[Sequence[float], int]],
    n_domains: int = N_SOURCES,
    batch_size: int = BATCH_SIZE,
    stream_seed: Optional[int] = None,
    params: Optional[DomainParams] = None,
) -> ScenarioFile:
    """Default domains of `base_seed` plus a (pi, batches) schedule."""
    return ScenarioFile(
        domains=make_default_domains(base_seed, n_domains, params),
        segments=[ScenarioSegment(pi=list(pi), batches=batches) for pi, batches in segments],
        batch_size=batch_size,
        seed=base_seed if stream_seed is None else stream_seed,
    )


def one_hot(n: int, index: int) -> List[float]:
    pi = [0.0] * n
    pi[index] = 1.0
    return pi


def batch_seed(stream_seed: int, t: int) -> int:
    return int(np.random.SeedSequence([stream_seed, STREAM_BATCH_TAG, t]).generate_state(1)[0])


def iter_stream(scenario: ScenarioFile) -> Iterator[StreamBatch]:
    """Test batches in schedule order; batch t is drawn from the seed derived from (scenario.seed, t)."""
    t = 0
    for segment_index, segment in enumerate(scenario.segments):
        mixture = MixtureSpec(pi=segment.pi)
        for _ in range(segment.batches):
            batch = sample_batch(mixture, scenario.batch_size, seed=batch_seed(scenario.seed, t), domains=scenario.domains)
            yield StreamBatch(t, segment_index, list(segment.pi), batch)
            t += 1
