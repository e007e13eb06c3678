"""Initial combination weights from batch-norm statistics.

Each source model carries the running mean/std of every BN node, which is a
Gaussian signature of the domain it was trained on. A test batch passed
through the same model yields observed statistics at the same nodes; the KL
divergence between the two signatures (test batch first) scores how far the
batch is from that source.
"""
import logging
from typing import List, NamedTuple, Optional, Sequence

import numpy as np
from scipy.special import softmax

from ..errors import DimensionError
from ..models import InitMode
from ..nn import ForwardTrace, MlpModel

logger = logging.getLogger(__name__)


class BnObservation(NamedTuple):
    """Per model j and BN layer l: stored running stats and the observed batch stats."""
    stored_means: List[List[np.ndarray]]
    stored_stds: List[List[np.ndarray]]
    observed_means: List[List[np.ndarray]]
    observed_stds: List[List[np.ndarray]]

    @property
    def n_models(self) -> int:
        return len(self.stored_means)


def observe_bn(models: Sequence[MlpModel], traces: Sequence[ForwardTrace]) -> BnObservation:
    if len(models) != len(traces):
        raise DimensionError(f"{len(models)} models but {len(traces)} forward traces")
    return BnObservation(
        stored_means=[[bn.running_mean.copy() for bn in model.bn] for model in models],
        stored_stds=[[bn.running_std for bn in model.bn] for model in models],
        observed_means=[trace.observed_means for trace in traces],
        observed_stds=[trace.observed_stds for trace in traces],
    )


def gaussian_kl(mu1, sigma1, mu2, sigma2):
    """KL( N(mu1, sigma1^2) || N(mu2, sigma2^2) ), elementwise over arrays."""
    mu1, sigma1, mu2, sigma2 = (np.asarray(a, dtype=np.float64) for a in (mu1, sigma1, mu2, sigma2))
    if np.any(sigma1 <= 0) or np.any(sigma2 <= 0):
        raise ValueError("standard deviations must be strictly positive")
    kl = np.log(sigma2 / sigma1) + (sigma1 ** 2 + (mu1 - mu2) ** 2) / (2.0 * sigma2 ** 2) - 0.5
    return float(kl) if kl.ndim == 0 else kl


def bn_stat_distance(obs: BnObservation, j: int) -> float:
    """theta_j: KL from the observed batch stats to model j's stored stats, summed over all BN nodes."""
    stored_m, stored_s = obs.stored_means[j], obs.stored_stds[j]
    observed_m, observed_s = obs.observed_means[j], obs.observed_stds[j]
    if len(stored_m) != len(observed_m):
        raise DimensionError(f"model {j}: {len(stored_m)} stored BN layers vs {len(observed_m)} observed")
    theta = 0.0
    for layer, (mu_s, sd_s, mu_o, sd_o) in enumerate(zip(stored_m, stored_s, observed_m, observed_s)):
        if np.shape(mu_s) != np.shape(mu_o) or np.shape(sd_s) != np.shape(sd_o) or np.shape(mu_s) != np.shape(sd_s):
            raise DimensionError(f"model {j} layer {layer}: stored and observed node counts differ")
        theta += float(np.sum(gaussian_kl(mu_o, sd_o, mu_s, sd_s)))
    return theta


def bn_stat_distances(obs: BnObservation) -> np.ndarray:
    return np.array([bn_stat_distance(obs, j) for j in range(obs.n_models)])


def init_weights(theta: np.ndarray) -> np.ndarray:
    """softmax(-theta): the closest source gets the largest weight."""
    theta = np.asarray(theta, dtype=np.float64)
    if theta.ndim != 1 or not np.all(np.isfinite(theta)):
        raise DimensionError("theta must be a finite vector")
    return softmax(-theta)


def initial_weights(
    theta: np.ndarray,
    mode: InitMode = InitMode.KL,
    rng: Optional[np.random.Generator] = None,
) -> np.ndarray:
    n = len(theta)
    if mode == InitMode.KL:
        return init_weights(theta)
    if mode == InitMode.UNIFORM:
        return np.full(n, 1.0 / n)
    if mode == InitMode.RANDOM:
        if rng is None:
            raise ValueError("random initialization needs a generator")
        return rng.dirichlet(np.ones(n))
    raise ValueError(f"unknown init mode {mode}")
