from typing import List, Optional

import numpy as np

from config import DEGREE, N_SOURCES, ROTATION_DEGREES, ROTATION_STEP_DEGREES
from ..errors import ConfigError
from ..models import DomainParams, DomainSpec

# Stream tags keep the seed sequences of independent draws apart.
CLASS_MEANS_STREAM = 1
DOMAIN_STREAM = 2
SAMPLE_STREAM = 3
TRAIN_STREAM = 4
EVAL_STREAM = 5
HELD_OUT_STREAM = 6
INIT_STREAM = 7
WEIGHT_INIT_STREAM = 8


def stream_rng(*keys: int) -> np.random.Generator:
    """Generator for a (seed, tag, ...) key; keys must be non-negative."""
    if any(key < 0 for key in keys):
        raise ConfigError(f"seed keys must be non-negative, got {keys}")
    return np.random.default_rng(np.random.SeedSequence(list(keys)))


def default_rotation(domain_id: int) -> float:
    if domain_id < len(ROTATION_DEGREES):
        return ROTATION_DEGREES[domain_id] * DEGREE
    return domain_id * ROTATION_STEP_DEGREES * DEGREE


def make_domain(base_seed: int, domain_id: int, params: Optional[DomainParams] = None) -> DomainSpec:
    """Build domain `domain_id` deterministically from (base_seed, domain_id).

    Class means are shared by every domain of a base seed, then perturbed by
    `mean_jitter` per domain; the shift is drawn per domain unless given.
    """
    params = params or DomainParams()
    shared = stream_rng(base_seed, CLASS_MEANS_STREAM)
    base_means = params.mean_scale * shared.standard_normal((params.n_classes, params.input_dim))

    own = stream_rng(base_seed, DOMAIN_STREAM, domain_id)
    jitter = own.standard_normal((params.n_classes, params.input_dim))
    drawn_shift = own.standard_normal(params.input_dim)

    shift = np.asarray(params.shift, dtype=np.float64) if params.shift is not None else params.shift_scale * drawn_shift
    angle = params.rotation_angle if params.rotation_angle is not None else default_rotation(domain_id)
    planes = params.rotation_planes if params.rotation_planes is not None else params.input_dim // 2

    try:
        return DomainSpec(
            domain_id=domain_id,
            class_means=(base_means + params.mean_jitter * jitter).tolist(),
            rotation_angle=angle,
            rotation_planes=planes,
            shift=shift.tolist(),
            noise_scale=params.noise_scale,
            seed=base_seed,
        )
    except ValueError as e:
        raise ConfigError(f"invalid domain {domain_id}: {e}")


def make_default_domains(base_seed: int, n_domains: int = N_SOURCES, params: Optional[DomainParams] = None) -> List[DomainSpec]:
    return [make_domain(base_seed, domain_id, params) for domain_id in range(n_domains)]


def rotate(spec: DomainSpec, points: np.ndarray) -> np.ndarray:
    """Rotate coordinate pairs (0,1), (2,3), ... of every row by the domain angle."""
    rotated = np.array(points, dtype=np.float64, copy=True)
    c, s = np.cos(spec.rotation_angle), np.sin(spec.rotation_angle)
    for plane in range(spec.rotation_planes):
        x = points[:, 2 * plane]
        y = points[:, 2 * plane + 1]
        rotated[:, 2 * plane] = c * x - s * y
        rotated[:, 2 * plane + 1] = s * x + c * y
    return rotated


def transformed_means(spec: DomainSpec) -> np.ndarray:
    return rotate(spec, np.asarray(spec.class_means, dtype=np.float64)) + np.asarray(spec.shift)
