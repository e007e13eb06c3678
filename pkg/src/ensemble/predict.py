from typing import List, Sequence, Tuple

import numpy as np

from ..errors import DimensionError
from ..nn import ForwardTrace, MlpModel, NormMode, check_compatible, forward, softmax_rows

SIMPLEX_TOLERANCE = 1e-9


def check_weights(w: np.ndarray, n_models: int) -> np.ndarray:
    """Combination weights must be non-negative, sum to one and have one entry per model."""
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (n_models,):
        raise DimensionError(f"expected {n_models} weights, got shape {w.shape}")
    if np.any(w < 0) or abs(float(np.sum(w)) - 1.0) > SIMPLEX_TOLERANCE:
        raise DimensionError(f"weights {w.tolist()} are not on the probability simplex")
    return w


def build_cube(models: Sequence[MlpModel], X: np.ndarray) -> Tuple[np.ndarray, List[ForwardTrace]]:
    """Stack every model's batch-statistics softmax into a B x N x K cube."""
    check_compatible(models)
    traces = [forward(model, X, NormMode.BATCH_STATS) for model in models]
    cube = np.stack([softmax_rows(trace.logits) for trace in traces], axis=1)
    return cube, traces


def ensemble_predict(models: Sequence[MlpModel], w: np.ndarray, X: np.ndarray) -> np.ndarray:
    w = check_weights(w, len(models))
    cube, _ = build_cube(models, X)
    return np.einsum("ijk,j->ik", cube, w)
