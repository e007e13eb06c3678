from typing import List, Optional, Sequence

from config import HELD_OUT_SIZE
from ..adapters import param_distance
from ..errors import DimensionError
from ..models import DomainSpec, ForgettingRecord
from ..nn import MlpModel
from ..scenario import LabeledBatch, evaluate_error, held_out_test_set


def own_domain_sets(
    models: Sequence[MlpModel],
    domains: Sequence[DomainSpec],
    seed: int,
    n: int = HELD_OUT_SIZE,
) -> List[LabeledBatch]:
    """One fixed held-out set per source, drawn from the domain the source was trained on."""
    by_id = {domain.domain_id: domain for domain in domains}
    sets = []
    for index, model in enumerate(models):
        domain_id = model.meta.domain_id
        if domain_id in by_id:
            domain = by_id[domain_id]
        elif index < len(domains):
            domain = domains[index]
        else:
            raise DimensionError(f"no domain found for source {index}")
        sets.append(held_out_test_set(domain, n, seed))
    return sets


def evaluate_forgetting(
    adapted_models: Sequence[MlpModel],
    pristine_models: Sequence[MlpModel],
    held_out_sets: Sequence[LabeledBatch],
    checkpoint: Optional[str] = None,
) -> ForgettingRecord:
    """Own-domain error of every source in its adapted and pristine state, plus parameter drift."""
    if not len(adapted_models) == len(pristine_models) == len(held_out_sets):
        raise DimensionError(
            f"{len(adapted_models)} adapted models, {len(pristine_models)} pristine models "
            f"and {len(held_out_sets)} held-out sets"
        )
    return ForgettingRecord(
        checkpoint=checkpoint or "final",
        adapted_errors=[evaluate_error(m, s.X, s.y) for m, s in zip(adapted_models, held_out_sets)],
        pristine_errors=[evaluate_error(m, s.X, s.y) for m, s in zip(pristine_models, held_out_sets)],
        param_drift=[param_distance(a, p) for a, p in zip(adapted_models, pristine_models)],
    )
