import numpy as np

from ..nn import MlpModel, check_compatible


def snapshot(model: MlpModel) -> np.ndarray:
    """Flat copy of every adaptable quantity: gamma, beta, running mean and running variance."""
    parts = []
    for layer in model.bn:
        parts.extend((layer.gamma, layer.beta, layer.running_mean, layer.running_var))
    return np.concatenate(parts).astype(np.float64, copy=True)


def param_distance(a: MlpModel, b: MlpModel) -> float:
    check_compatible([a, b])
    return float(np.linalg.norm(snapshot(a) - snapshot(b)))
