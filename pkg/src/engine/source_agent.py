from typing import Optional

from mesa import Agent

from ..adapters import adapt, param_distance
from ..models import AdapterConfig
from ..nn import AdamState, MlpModel


class SourceAgent(Agent):
    """One source model living in the stream.

    Attributes:
        source_index: position j of the model in the ensemble
        source_model: the model in its current (possibly adapted) state
        pristine: frozen copy of the model as loaded, used for drift
        optimizer_state: Adam moments carried across the batches this model is adapted on
        marked: set by the model before step() when this source is an adaptation target
        weight: w_star[j] on the latest batch
        batch_error: error of this source alone on the latest batch
        param_drift: distance of the adaptable parameters from the pristine copy
        adapted: whether the latest step adapted this source
    """

    def __init__(self, model, source_index: int, source_model: MlpModel, adapter: AdapterConfig):
        super().__init__(model)
        self.source_index = source_index
        self.source_model = source_model
        self.pristine = source_model.copy()
        self.adapter = adapter
        self.optimizer_state: Optional[AdamState] = None
        self.marked = False
        self.weight = 0.0
        self.batch_error = 0.0
        self.param_drift = 0.0
        self.adapted = False
        self.adaptation_count = 0

    def step(self):
        # only the unlabeled features of the current batch are visible here
        self.adapted = self.marked
        if self.marked:
            self.optimizer_state = adapt(self.source_model, self.model.current_features, self.adapter, self.optimizer_state)
            self.adaptation_count += 1
            self.param_drift = param_distance(self.source_model, self.pristine)
        self.marked = False
