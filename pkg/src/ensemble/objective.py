"""Entropy of weighted pseudo-labels and its derivatives in the combination weights.

The cube holds probs[i, j, :] = softmax of model j on sample i. For weights w
the weighted pseudo-label is q_i = sum_j w_j probs[i, j] and the objective is
the batch mean of H(q_i). The objective is concave in w.
"""
from typing import Tuple

import numpy as np

from config import EPS_LOG
from ..errors import DimensionError
from ..nn.functional import clamped_log


def check_cube(cube: np.ndarray, w: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    cube = np.asarray(cube, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if cube.ndim != 3:
        raise DimensionError(f"pseudo-label cube must be B x N x K, got shape {cube.shape}")
    if w.ndim != 1 or w.shape[0] != cube.shape[1]:
        raise DimensionError(f"weights of length {w.shape} do not match {cube.shape[1]} sources")
    return cube, w


def weighted_pseudo_labels(cube: np.ndarray, w: np.ndarray) -> np.ndarray:
    cube, w = check_cube(cube, w)
    return np.einsum("ijk,j->ik", cube, w)


def weight_entropy_loss(cube: np.ndarray, w: np.ndarray, eps_log: float = EPS_LOG) -> float:
    q = weighted_pseudo_labels(cube, w)
    return float(np.mean(-np.sum(q * clamped_log(q, eps_log), axis=1)))


def weight_entropy_grad(cube: np.ndarray, w: np.ndarray, eps_log: float = EPS_LOG) -> np.ndarray:
    """g_j = -(1/B) sum_i sum_c probs[i,j,c] (1 + log q_ic)."""
    cube, w = check_cube(cube, w)
    q = np.einsum("ijk,j->ik", cube, w)
    return -np.einsum("ijk,ik->j", cube, 1.0 + clamped_log(q, eps_log)) / cube.shape[0]


def weight_entropy_hessian(cube: np.ndarray, w: np.ndarray, eps_log: float = EPS_LOG) -> np.ndarray:
    """H_jk = -(1/B) sum_i sum_c probs[i,j,c] probs[i,k,c] / max(q_ic, eps_log)."""
    cube, w = check_cube(cube, w)
    q = np.einsum("ijk,j->ik", cube, w)
    scaled = cube / np.maximum(q, eps_log)[:, None, :]
    hessian = -np.einsum("ijc,ikc->jk", scaled, cube) / cube.shape[0]
    return 0.5 * (hessian + hessian.T)
