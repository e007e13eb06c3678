from enum import Enum
from typing import Dict

import numpy as np

from config import EPS_LOG
from ..errors import DimensionError
from .functional import as_matrix, clamped_log, shannon_entropy_rows, softmax_rows
from .mlp import ForwardTrace, MlpModel, NormMode, forward

Gradients = Dict[str, np.ndarray]


class Loss(str, Enum):
    MEAN_ENTROPY = "mean_entropy"


def mean_entropy(model: MlpModel, X: np.ndarray, eps_log: float = EPS_LOG) -> float:
    """Mean per-sample prediction entropy under batch-statistics normalization."""
    probs = softmax_rows(forward(model, X, NormMode.BATCH_STATS).logits)
    return float(np.mean(shannon_entropy_rows(probs, eps_log)))


def cross_entropy(model: MlpModel, X: np.ndarray, labels: np.ndarray, eps_log: float = EPS_LOG) -> float:
    labels = _check_labels(labels, model.n_classes, len(X))
    probs = softmax_rows(forward(model, X, NormMode.BATCH_STATS).logits)
    picked = probs[np.arange(len(labels)), labels]
    return float(-np.mean(np.log(np.maximum(picked, eps_log))))


def grad_bn_affine(
    model: MlpModel,
    X: np.ndarray,
    loss: Loss = Loss.MEAN_ENTROPY,
    eps_log: float = EPS_LOG,
) -> Gradients:
    """Gradients of the mean prediction entropy with respect to every gamma and beta."""
    if loss != Loss.MEAN_ENTROPY:
        raise ValueError(f"unsupported loss {loss}")
    trace = _batch_trace(model, X)
    probs = softmax_rows(trace.logits)
    log_p = clamped_log(probs, eps_log)
    entropy = -np.sum(probs * log_p, axis=1, keepdims=True)
    # dH/dz_k = -p_k (log p_k + H)
    dlogits = -probs * (log_p + entropy) / probs.shape[0]
    grads = _backward(model, trace, dlogits)
    return {name: grad for name, grad in grads.items() if name.startswith("bn.")}


def grad_full(model: MlpModel, X: np.ndarray, labels: np.ndarray) -> Gradients:
    """Gradients of the mean cross-entropy with respect to all parameters."""
    trace = _batch_trace(model, X)
    labels = _check_labels(labels, model.n_classes, trace.logits.shape[0])
    probs = softmax_rows(trace.logits)
    dlogits = probs.copy()
    dlogits[np.arange(len(labels)), labels] -= 1.0
    dlogits /= len(labels)
    return _backward(model, trace, dlogits)


def _batch_trace(model: MlpModel, X: np.ndarray) -> ForwardTrace:
    X = as_matrix(X)
    if X.shape[0] < 2:
        raise DimensionError("gradients use batch statistics and need at least 2 rows")
    return forward(model, X, NormMode.BATCH_STATS)


def _check_labels(labels, n_classes: int, n_rows: int) -> np.ndarray:
    labels = np.asarray(labels)
    if labels.shape != (n_rows,):
        raise DimensionError(f"expected {n_rows} labels, got shape {labels.shape}")
    if not np.issubdtype(labels.dtype, np.integer):
        raise DimensionError("labels must be integer class indices")
    if np.any(labels < 0) or np.any(labels >= n_classes):
        raise DimensionError(f"labels must lie in [0, {n_classes})")
    return labels


def _backward(model: MlpModel, trace: ForwardTrace, dlogits: np.ndarray) -> Gradients:
    grads: Gradients = {}
    last = len(model.dense) - 1
    grads[f"dense.{last}.w"] = trace.hidden.T @ dlogits
    grads[f"dense.{last}.b"] = dlogits.sum(axis=0)
    dh = dlogits @ model.dense[last].w.T

    for index in reversed(range(len(model.bn))):
        cache = trace.layers[index]
        bn = model.bn[index]
        dy = dh * (cache.pre_activation > 0)
        grads[f"bn.{index}.gamma"] = np.sum(dy * cache.x_hat, axis=0)
        grads[f"bn.{index}.beta"] = dy.sum(axis=0)

        dx_hat = dy * bn.gamma
        n = dx_hat.shape[0]
        dz = (cache.inv_std / n) * (
            n * dx_hat
            - dx_hat.sum(axis=0)
            - cache.x_hat * np.sum(dx_hat * cache.x_hat, axis=0)
        )
        grads[f"dense.{index}.w"] = cache.inputs.T @ dz
        grads[f"dense.{index}.b"] = dz.sum(axis=0)
        dh = dz @ model.dense[index].w.T
    return grads
