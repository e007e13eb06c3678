from typing import Optional

import numpy as np

from ..models import AdapterConfig, AdapterKind
from ..nn import AdamState, MlpModel
from .bn_stats import bn_stats_adapt
from .snapshot import param_distance, snapshot
from .tent import tent_adapt


def adapt(
    model: MlpModel,
    X: np.ndarray,
    cfg: AdapterConfig,
    state: Optional[AdamState] = None,
) -> Optional[AdamState]:
    """Apply the configured single-source adapter to one model; returns the optimizer state to keep."""
    if cfg.kind == AdapterKind.TENT:
        return tent_adapt(model, X, cfg, state)
    if cfg.kind == AdapterKind.BN_STATS:
        bn_stats_adapt(model, X, cfg)
    return state
