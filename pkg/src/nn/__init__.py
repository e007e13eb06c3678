from .functional import as_matrix, shannon_entropy_rows, softmax_rows
from .mlp import (
    BnLayer, DenseLayer, ForwardTrace, MlpModel, ModelMeta, NormMode,
    check_compatible, forward, update_running_stats,
)
from .backprop import Loss, cross_entropy, grad_bn_affine, grad_full, mean_entropy
from .optim import AdamState, adam_step, sgd_step
from .serialize import dumps, load_model, loads, save_model
