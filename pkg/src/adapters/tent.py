import logging
from typing import Optional

import numpy as np

from ..errors import DimensionError
from ..models import AdapterConfig, AdapterKind, OptimizerKind
from ..nn import AdamState, MlpModel, adam_step, as_matrix, grad_bn_affine, sgd_step

logger = logging.getLogger(__name__)


def tent_adapt(
    model: MlpModel,
    X: np.ndarray,
    cfg: AdapterConfig,
    state: Optional[AdamState] = None,
) -> Optional[AdamState]:
    """Entropy minimization over the BN affine parameters, in place.

    Runs cfg.steps optimizer steps on the mean prediction entropy of X under
    batch-statistics normalization. Dense weights, biases and running stats
    are left alone. With Adam the returned state must be passed back on the
    next call for the same model; with SGD the return value is None.
    """
    if cfg.kind != AdapterKind.TENT:
        raise ValueError(f"tent_adapt called with adapter kind {cfg.kind}")
    X = as_matrix(X)
    if X.shape[0] < 2:
        raise DimensionError("test-time adaptation needs a batch of at least 2 samples")

    for _ in range(cfg.steps):
        params = model.bn_affine()
        grads = grad_bn_affine(model, X)
        if cfg.optimizer == OptimizerKind.ADAM:
            params, state = adam_step(state, params, grads, cfg.lr, cfg.beta1, cfg.beta2, cfg.adam_eps)
        else:
            params = sgd_step(params, grads, cfg.lr)
        model.assign(params)
    return state if cfg.optimizer == OptimizerKind.ADAM else None
