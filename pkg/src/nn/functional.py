import numpy as np
from scipy.special import softmax

from config import EPS_LOG
from ..errors import DimensionError


def as_matrix(X, name: str = "X") -> np.ndarray:
    """Return X as a 2-D float64 array, rejecting ragged, empty or non-finite input."""
    matrix = np.asarray(X, dtype=np.float64)
    if matrix.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise DimensionError(f"{name} contains NaN or Inf")
    return matrix


def softmax_rows(Z: np.ndarray) -> np.ndarray:
    """Row-wise softmax with max subtraction."""
    return softmax(as_matrix(Z, "Z"), axis=1)


def clamped_log(P: np.ndarray, eps_log: float = EPS_LOG) -> np.ndarray:
    return np.log(np.maximum(P, eps_log))


def shannon_entropy_rows(P: np.ndarray, eps_log: float = EPS_LOG) -> np.ndarray:
    """Natural-log entropy of every row: H_i = -sum_c p_ic log(max(p_ic, eps_log))."""
    P = as_matrix(P, "P")
    return -np.sum(P * clamped_log(P, eps_log), axis=1)
