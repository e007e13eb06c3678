"""Reference predictors scored next to MeTA on the same test batches."""
from typing import List, Optional, Sequence

import numpy as np

from ..adapters import adapt
from ..ensemble import build_cube, ensemble_predict
from ..models import AdapterConfig
from ..nn import AdamState, MlpModel, check_compatible


def error_rate(probs: np.ndarray, labels: np.ndarray) -> float:
    return float(np.mean(np.argmax(probs, axis=1) != labels))


def uniform_error(frozen_models: Sequence[MlpModel], X: np.ndarray, y: np.ndarray) -> float:
    """Error of the equal-weight ensemble of models that are never adapted."""
    w = np.full(len(frozen_models), 1.0 / len(frozen_models))
    return error_rate(ensemble_predict(frozen_models, w, X), y)


class IndependentSources:
    """Private copies of the sources, each adapted on every batch by the single-source adapter.

    The copies never see each other or the ensemble weights, so source j here
    is what X-adapting source j alone would give.
    """

    def __init__(self, models: Sequence[MlpModel], adapter: Optional[AdapterConfig] = None):
        check_compatible(models)
        self.models = [model.copy() for model in models]
        self.adapter = adapter or AdapterConfig()
        self.states: List[Optional[AdamState]] = [None] * len(self.models)

    def predict(self, X: np.ndarray) -> np.ndarray:
        cube, _ = build_cube(self.models, X)
        return cube

    def adapt(self, X: np.ndarray):
        for j, model in enumerate(self.models):
            self.states[j] = adapt(model, X, self.adapter, self.states[j])

    def score_then_adapt(self, X: np.ndarray, y: np.ndarray) -> List[float]:
        """Per-source error on the batch, then one adaptation of every copy on its features."""
        cube = self.predict(X)
        errors = [error_rate(cube[:, j, :], y) for j in range(len(self.models))]
        self.adapt(X)
        return errors
