import numpy as np

from ..errors import DimensionError
from ..models import AdapterConfig, AdapterKind
from ..nn import MlpModel, NormMode, as_matrix, forward, update_running_stats


def bn_stats_adapt(model: MlpModel, X: np.ndarray, cfg: AdapterConfig) -> MlpModel:
    """Blend the batch's BN statistics into the running stats with momentum cfg.bn_momentum."""
    if cfg.kind != AdapterKind.BN_STATS:
        raise ValueError(f"bn_stats_adapt called with adapter kind {cfg.kind}")
    X = as_matrix(X)
    if X.shape[0] < 2:
        raise DimensionError("test-time adaptation needs a batch of at least 2 samples")
    update_running_stats(model, forward(model, X, NormMode.BATCH_STATS), momentum=cfg.bn_momentum)
    return model
