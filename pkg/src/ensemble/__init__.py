from .init import (
    BnObservation, bn_stat_distance, bn_stat_distances, gaussian_kl, init_weights, initial_weights, observe_bn,
)
from .objective import weight_entropy_grad, weight_entropy_hessian, weight_entropy_loss, weighted_pseudo_labels
from .predict import build_cube, check_weights, ensemble_predict
from .solver import best_step_size, euclidean_simplex_projection, optimize_weights, project_simplex
