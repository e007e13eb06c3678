from pathlib import Path
from typing import List, Union

import numpy as np
from pydantic import BaseModel, Field

from ..errors import ConfigError, DimensionError
from .mlp import BnLayer, DenseLayer, MlpModel, ModelMeta


class DenseDocument(BaseModel):
    w: List[List[float]] = Field(..., description="Row-major (fan_in, fan_out)")
    b: List[float]


class BnDocument(BaseModel):
    gamma: List[float]
    beta: List[float]
    running_mean: List[float]
    running_var: List[float]
    eps: float = Field(..., gt=0)
    momentum: float = Field(..., ge=0, le=1)


class MlpDocument(BaseModel):
    """On-disk form of one model."""
    layer_dims: List[int]
    layers: List[DenseDocument]
    bn: List[BnDocument]
    meta: ModelMeta


def to_document(model: MlpModel) -> MlpDocument:
    return MlpDocument(
        layer_dims=model.layer_dims,
        layers=[DenseDocument(w=layer.w.tolist(), b=layer.b.tolist()) for layer in model.dense],
        bn=[
            BnDocument(
                gamma=layer.gamma.tolist(),
                beta=layer.beta.tolist(),
                running_mean=layer.running_mean.tolist(),
                running_var=layer.running_var.tolist(),
                eps=layer.eps,
                momentum=layer.momentum,
            )
            for layer in model.bn
        ],
        meta=model.meta.model_copy(),
    )


def from_document(document: MlpDocument) -> MlpModel:
    dense = [DenseLayer(np.array(layer.w, dtype=np.float64), np.array(layer.b, dtype=np.float64)) for layer in document.layers]
    bn = []
    for layer in document.bn:
        bn_layer = BnLayer(len(layer.gamma), eps=layer.eps, momentum=layer.momentum)
        bn_layer.gamma = np.array(layer.gamma, dtype=np.float64)
        bn_layer.beta = np.array(layer.beta, dtype=np.float64)
        bn_layer.running_mean = np.array(layer.running_mean, dtype=np.float64)
        bn_layer.running_var = np.array(layer.running_var, dtype=np.float64)
        bn.append(bn_layer)
    return MlpModel(document.layer_dims, dense, bn, document.meta.model_copy())


def dumps(model: MlpModel) -> str:
    """Floats are written in shortest round-trip form."""
    return to_document(model).model_dump_json()


def loads(text: str) -> MlpModel:
    return from_document(MlpDocument.model_validate_json(text))


def save_model(model: MlpModel, path: Union[str, Path]):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(dumps(model))


def load_model(path: Union[str, Path]) -> MlpModel:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"model file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    try:
        return loads(text)
    except DimensionError:
        raise
    except ValueError as e:
        raise DimensionError(f"invalid model file {path}: {e}")
