from enum import Enum
from typing import List, NamedTuple, Optional, Sequence
import copy

import numpy as np
from pydantic import BaseModel, Field

from config import BN_EPS, BN_MOMENTUM
from ..errors import DimensionError, ModelMismatchError
from .functional import as_matrix


class NormMode(str, Enum):
    RUNNING_STATS = "running_stats"
    BATCH_STATS = "batch_stats"


class ModelMeta(BaseModel):
    domain_id: Optional[int] = Field(None, description="Domain the model was trained on")
    seed: int = Field(0, description="Training seed")
    train_err: Optional[float] = Field(None, description="Own-domain error on a fresh test set")


class DenseLayer:
    """Affine map h @ w + b with w stored as (fan_in, fan_out)."""

    def __init__(self, w: np.ndarray, b: np.ndarray):
        self.w = np.asarray(w, dtype=np.float64)
        self.b = np.asarray(b, dtype=np.float64)
        if self.w.ndim != 2 or self.b.shape != (self.w.shape[1],):
            raise DimensionError(f"dense layer shapes w={self.w.shape} b={self.b.shape} do not match")


class BnLayer:
    """Batch-norm layer; running_mean/running_var are the source signature of the model."""

    def __init__(
        self,
        width: int,
        eps: float = BN_EPS,
        momentum: float = BN_MOMENTUM,
    ):
        self.gamma = np.ones(width)
        self.beta = np.zeros(width)
        self.running_mean = np.zeros(width)
        self.running_var = np.ones(width)
        self.eps = eps
        self.momentum = momentum

    @property
    def width(self) -> int:
        return self.gamma.shape[0]

    @property
    def running_std(self) -> np.ndarray:
        return np.sqrt(np.maximum(self.running_var, self.eps))

    def check(self):
        arrays = (self.gamma, self.beta, self.running_mean, self.running_var)
        if any(a.shape != (self.width,) for a in arrays):
            raise DimensionError("gamma, beta and running stats must share the layer width")
        if np.any(self.running_var <= 0):
            raise DimensionError("running_var entries must be strictly positive")


class MlpModel:
    """Dense -> BN -> ReLU blocks followed by a dense output layer of width K.

    Attributes:
        layer_dims: [d_in, h_1, ..., h_L, K]
        dense: L + 1 dense layers
        bn: one BnLayer per hidden layer, applied before the activation
        meta: domain id, seed and training error
    """

    def __init__(
        self,
        layer_dims: Sequence[int],
        dense: List[DenseLayer],
        bn: List[BnLayer],
        meta: Optional[ModelMeta] = None,
    ):
        self.layer_dims = [int(d) for d in layer_dims]
        self.dense = dense
        self.bn = bn
        self.meta = meta or ModelMeta()
        self._check()

    @classmethod
    def initialize(
        cls,
        layer_dims: Sequence[int],
        seed: int,
        domain_id: Optional[int] = None,
        eps: float = BN_EPS,
        momentum: float = BN_MOMENTUM,
    ) -> "MlpModel":
        """He-normal weights, zero biases, identity batch norm."""
        if len(layer_dims) < 3:
            raise DimensionError("an MLP needs at least one hidden layer")
        rng = np.random.default_rng(seed)
        dense = []
        for fan_in, fan_out in zip(layer_dims[:-1], layer_dims[1:]):
            w = rng.standard_normal((fan_in, fan_out)) * np.sqrt(2.0 / fan_in)
            dense.append(DenseLayer(w, np.zeros(fan_out)))
        bn = [BnLayer(width, eps=eps, momentum=momentum) for width in layer_dims[1:-1]]
        return cls(layer_dims, dense, bn, ModelMeta(domain_id=domain_id, seed=seed))

    def _check(self):
        if len(self.dense) != len(self.layer_dims) - 1:
            raise DimensionError("one dense layer is needed per consecutive pair of layer_dims")
        if len(self.bn) != len(self.layer_dims) - 2:
            raise DimensionError("one batch-norm layer is needed per hidden layer")
        for index, layer in enumerate(self.dense):
            expected = (self.layer_dims[index], self.layer_dims[index + 1])
            if layer.w.shape != expected:
                raise DimensionError(f"dense.{index} has shape {layer.w.shape}, expected {expected}")
        for index, layer in enumerate(self.bn):
            layer.check()
            if layer.width != self.layer_dims[index + 1]:
                raise DimensionError(f"bn.{index} width {layer.width} != {self.layer_dims[index + 1]}")

    @property
    def input_dim(self) -> int:
        return self.layer_dims[0]

    @property
    def n_classes(self) -> int:
        return self.layer_dims[-1]

    def copy(self) -> "MlpModel":
        return copy.deepcopy(self)

    # Parameter access by name, shared by backprop, optimizers and adapters.

    def parameters(self) -> dict:
        params = {}
        for index, layer in enumerate(self.dense):
            params[f"dense.{index}.w"] = layer.w
            params[f"dense.{index}.b"] = layer.b
        params.update(self.bn_affine())
        return params

    def bn_affine(self) -> dict:
        params = {}
        for index, layer in enumerate(self.bn):
            params[f"bn.{index}.gamma"] = layer.gamma
            params[f"bn.{index}.beta"] = layer.beta
        return params

    def assign(self, params: dict):
        """Write named parameters back into the model (copies the arrays)."""
        current = self.parameters()
        for name, value in params.items():
            if name not in current:
                raise DimensionError(f"unknown parameter {name}")
            value = np.array(value, dtype=np.float64)
            if value.shape != current[name].shape:
                raise DimensionError(f"{name} has shape {value.shape}, expected {current[name].shape}")
            kind, index, field = name.split(".")
            layer = self.dense[int(index)] if kind == "dense" else self.bn[int(index)]
            setattr(layer, field, value)


def check_compatible(models: Sequence[MlpModel]):
    """All models must share d_in and K, and architectures must agree layer by layer."""
    if not models:
        raise ModelMismatchError("at least one model is required")
    reference = models[0].layer_dims
    for index, model in enumerate(models[1:], start=1):
        if model.layer_dims != reference:
            raise ModelMismatchError(
                f"model {index} has layer_dims {model.layer_dims}, model 0 has {reference}"
            )


class LayerCache(NamedTuple):
    inputs: np.ndarray
    pre_bn: np.ndarray
    batch_mean: np.ndarray
    batch_var: np.ndarray
    x_hat: np.ndarray
    inv_std: np.ndarray
    pre_activation: np.ndarray
    eps: float


class ForwardTrace(NamedTuple):
    logits: np.ndarray
    layers: List[LayerCache]
    hidden: np.ndarray
    mode: NormMode

    @property
    def observed_means(self) -> List[np.ndarray]:
        return [layer.batch_mean for layer in self.layers]

    @property
    def observed_stds(self) -> List[np.ndarray]:
        # variance floored by eps before sqrt
        return [np.sqrt(np.maximum(layer.batch_var, layer.eps)) for layer in self.layers]


def forward(model: MlpModel, X: np.ndarray, mode: NormMode = NormMode.BATCH_STATS) -> ForwardTrace:
    """Pure forward pass; the trace always carries the observed batch statistics."""
    X = as_matrix(X)
    if X.shape[1] != model.input_dim:
        raise DimensionError(f"X has {X.shape[1]} columns, model expects {model.input_dim}")
    if mode == NormMode.BATCH_STATS and X.shape[0] < 2:
        raise DimensionError("batch-statistics normalization needs at least 2 rows")

    h = X
    layers = []
    for dense, bn in zip(model.dense[:-1], model.bn):
        z = h @ dense.w + dense.b
        batch_mean = z.mean(axis=0)
        batch_var = z.var(axis=0)
        if mode == NormMode.BATCH_STATS:
            mean, var = batch_mean, batch_var
        else:
            mean, var = bn.running_mean, bn.running_var
        inv_std = 1.0 / np.sqrt(var + bn.eps)
        x_hat = (z - mean) * inv_std
        y = bn.gamma * x_hat + bn.beta
        layers.append(LayerCache(h, z, batch_mean, batch_var, x_hat, inv_std, y, bn.eps))
        h = np.maximum(y, 0.0)

    last = model.dense[-1]
    logits = h @ last.w + last.b
    return ForwardTrace(logits, layers, h, mode)


def update_running_stats(model: MlpModel, trace: ForwardTrace, momentum: Optional[float] = None):
    """EMA of the observed batch statistics into every BN layer (in place)."""
    for bn, layer in zip(model.bn, trace.layers):
        m = bn.momentum if momentum is None else momentum
        bn.running_mean = (1.0 - m) * bn.running_mean + m * layer.batch_mean
        running_var = (1.0 - m) * bn.running_var + m * layer.batch_var
        bn.running_var = np.maximum(running_var, bn.eps)
