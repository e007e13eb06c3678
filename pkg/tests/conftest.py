from functools import lru_cache
from typing import List, Tuple

import hypothesis
import numpy as np
import pytest

from src.models import DomainParams, DomainSpec, TrainConfig
from src.nn import MlpModel
from src.scenario import make_default_domains, train_source

np.seterr(all="warn")

hypothesis.settings.register_profile("fast", max_examples=5)
hypothesis.settings.register_profile("debugger", report_multiple_bugs=False)


@lru_cache(maxsize=None)
def default_sources(
    seed: int,
    corrupted: Tuple[int, ...] = (),
    geometry: Tuple[Tuple[str, float], ...] = (),
) -> Tuple[List[DomainSpec], List[MlpModel]]:
    """Default domains of `seed` and one trained source per domain, trained once per session.

    `geometry` holds DomainParams overrides as sorted (name, value) pairs.
    """
    domains = make_default_domains(seed, params=DomainParams(**dict(geometry)))
    models = [
        train_source(domain, TrainConfig(seed=seed, permute_labels=j in corrupted))
        for j, domain in enumerate(domains)
    ]
    return domains, models


@pytest.fixture
def trained_sources():
    """Fresh copies of the cached sources, so a test may adapt them freely."""

    def load(seed: int = 0, corrupted: Tuple[int, ...] = (), **geometry: float):
        domains, models = default_sources(seed, tuple(corrupted), tuple(sorted(geometry.items())))
        return domains, [model.copy() for model in models]

    return load


@pytest.fixture
def random_model():
    def build(seed: int = 0, layer_dims=(16, 32, 32, 5)) -> MlpModel:
        return MlpModel.initialize(list(layer_dims), seed=seed, domain_id=0)

    return build
