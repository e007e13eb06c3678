import logging

import numpy as np
from scipy.special import softmax

from config import (
    ALPHA_DEFAULT, ALPHA_MAX, ALPHA_MIN, CURVATURE_TOLERANCE, EPS_LOG, GRADIENT_TOLERANCE, SAFEGUARD_RETRIES,
)
from ..errors import DimensionError
from ..models import ProjectionMode, WeightSolveReport
from .objective import check_cube, weight_entropy_grad, weight_entropy_loss

logger = logging.getLogger(__name__)

# a candidate must lower the loss by more than this (relative) to count as a descent step
ACCEPT_TOLERANCE = 1e-12


def best_step_size(
    g: np.ndarray,
    H: np.ndarray,
    alpha_min: float = ALPHA_MIN,
    alpha_max: float = ALPHA_MAX,
    alpha_default: float = ALPHA_DEFAULT,
) -> float:
    """Newton step length g'g / g'Hg along -g.

    The entropy objective is concave, so g'Hg is usually non-positive; then the
    magnitude of the ratio is used as a curvature-scaled trust radius. Always
    returns a positive finite value inside [alpha_min, alpha_max], or
    alpha_default when the gradient vanishes or the ratio is not finite.
    """
    g = np.asarray(g, dtype=np.float64)
    H = np.asarray(H, dtype=np.float64)
    if g.ndim != 1 or H.shape != (g.shape[0], g.shape[0]):
        raise DimensionError(f"gradient {g.shape} and Hessian {H.shape} are inconsistent")
    if np.linalg.norm(g) < GRADIENT_TOLERANCE:
        return alpha_default

    gg = float(g @ g)
    gHg = float(g @ H @ g)
    with np.errstate(divide="ignore", invalid="ignore"):
        raw = gg / gHg if gHg != 0.0 else np.inf
    if gHg <= CURVATURE_TOLERANCE * gg:
        if not np.isfinite(raw):
            return alpha_default
        return float(np.clip(abs(raw), alpha_min, alpha_max))
    return float(np.clip(raw, alpha_min, alpha_max))


def euclidean_simplex_projection(v: np.ndarray) -> np.ndarray:
    """argmin_x ||x - v|| over the probability simplex (sort-based)."""
    n = v.shape[0]
    u = np.sort(v)[::-1]
    cumulative = np.cumsum(u) - 1.0
    candidates = u - cumulative / np.arange(1, n + 1)
    rho = np.nonzero(candidates > 0)[0][-1]
    threshold = cumulative[rho] / (rho + 1.0)
    return np.maximum(v - threshold, 0.0)


def project_simplex(v: np.ndarray, mode: ProjectionMode = ProjectionMode.SOFTMAX) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.shape[0] == 0 or not np.all(np.isfinite(v)):
        raise DimensionError("projection needs a finite non-empty vector")
    if mode == ProjectionMode.SOFTMAX:
        return softmax(v)
    if mode == ProjectionMode.EUCLIDEAN:
        return euclidean_simplex_projection(v)
    raise ValueError(f"unknown projection mode {mode}")


def optimize_weights(
    cube: np.ndarray,
    w_init: np.ndarray,
    alpha: float,
    iters: int,
    mode: ProjectionMode = ProjectionMode.SOFTMAX,
    retries: int = SAFEGUARD_RETRIES,
    eps_log: float = EPS_LOG,
) -> WeightSolveReport:
    """Projected gradient descent on the weight entropy with a descent safeguard.

    Each iteration proposes project(w - alpha * g). The proposal is kept only
    if it lowers the loss; otherwise alpha is halved up to `retries` times and,
    if no proposal is accepted, w stays where it is for that iteration.
    """
    if iters < 0:
        raise ValueError("iters must be non-negative")
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    cube, w = check_cube(cube, w_init)
    loss = weight_entropy_loss(cube, w, eps_log)
    losses = [loss]
    accepted = 0
    for iteration in range(iters):
        g = weight_entropy_grad(cube, w, eps_log)
        step = alpha
        for _ in range(retries + 1):
            candidate = project_simplex(w - step * g, mode)
            candidate_loss = weight_entropy_loss(cube, candidate, eps_log)
            if candidate_loss < loss - ACCEPT_TOLERANCE * max(1.0, abs(loss)):
                w, loss = candidate, candidate_loss
                accepted += 1
                break
            step *= 0.5
        else:
            logger.debug("iteration %d: no descent step found, weights unchanged", iteration)
        losses.append(loss)

    return WeightSolveReport(
        w_init=np.asarray(w_init, dtype=np.float64).tolist(),
        alpha_best=alpha,
        losses=losses,
        w_final=w.tolist(),
        iterations_accepted=accepted,
    )
