from typing import Dict, Optional, Tuple

import numpy as np

from config import ADAM_BETA1, ADAM_BETA2, ADAM_EPS
from ..errors import DimensionError

Params = Dict[str, np.ndarray]


class AdamState:
    """First/second moment estimates and the step counter, keyed like the parameters."""

    def __init__(self, m: Params, v: Params, step: int = 0):
        self.m = m
        self.v = v
        self.step = step

    @classmethod
    def zeros_like(cls, params: Params) -> "AdamState":
        return cls(
            {name: np.zeros_like(value, dtype=np.float64) for name, value in params.items()},
            {name: np.zeros_like(value, dtype=np.float64) for name, value in params.items()},
        )


def _check_shapes(params: Params, grads: Params):
    if set(params) != set(grads):
        raise DimensionError(f"parameter names {sorted(params)} do not match gradient names {sorted(grads)}")
    for name, value in params.items():
        if np.shape(value) != np.shape(grads[name]):
            raise DimensionError(f"{name}: parameter shape {np.shape(value)} != gradient shape {np.shape(grads[name])}")


def sgd_step(params: Params, grads: Params, lr: float) -> Params:
    _check_shapes(params, grads)
    return {name: np.asarray(value, dtype=np.float64) - lr * np.asarray(grads[name]) for name, value in params.items()}


def adam_step(
    state: Optional[AdamState],
    params: Params,
    grads: Params,
    lr: float,
    beta1: float = ADAM_BETA1,
    beta2: float = ADAM_BETA2,
    eps: float = ADAM_EPS,
) -> Tuple[Params, AdamState]:
    """One bias-corrected Adam update; returns new parameters and a new state."""
    _check_shapes(params, grads)
    if state is None:
        state = AdamState.zeros_like(params)
    elif set(state.m) != set(params):
        raise DimensionError("Adam state was built for a different parameter set")

    step = state.step + 1
    new_m, new_v, new_params = {}, {}, {}
    for name, value in params.items():
        g = np.asarray(grads[name], dtype=np.float64)
        m = beta1 * state.m[name] + (1.0 - beta1) * g
        v = beta2 * state.v[name] + (1.0 - beta2) * g * g
        m_hat = m / (1.0 - beta1 ** step)
        v_hat = v / (1.0 - beta2 ** step)
        new_params[name] = np.asarray(value, dtype=np.float64) - lr * m_hat / (np.sqrt(v_hat) + eps)
        new_m[name] = m
        new_v[name] = v
    return new_params, AdamState(new_m, new_v, step)
