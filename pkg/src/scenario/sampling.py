from typing import List, NamedTuple, Optional, Sequence, Union

import numpy as np

from ..errors import DimensionError, ModelMismatchError
from ..models import DomainSpec, MixtureSpec
from .domains import HELD_OUT_STREAM, SAMPLE_STREAM, stream_rng, transformed_means


class LabeledBatch(NamedTuple):
    """Features plus labels; labels are read only by error computations."""
    X: np.ndarray
    y: np.ndarray
    provenance: np.ndarray


def draw(
    domains: Sequence[DomainSpec],
    pi: Sequence[float],
    n: int,
    rng: np.random.Generator,
) -> LabeledBatch:
    """Domain ~ categorical(pi), label ~ uniform(K), point = rotate(mean) + shift + noise."""
    n_classes = domains[0].n_classes
    input_dim = domains[0].input_dim
    if any(d.n_classes != n_classes or d.input_dim != input_dim for d in domains):
        raise ModelMismatchError("all domains of a mixture must share K and d_in")

    provenance = rng.choice(len(domains), size=n, p=np.asarray(pi, dtype=np.float64))
    labels = rng.integers(0, n_classes, size=n)
    noise = rng.standard_normal((n, input_dim))

    X = np.empty((n, input_dim))
    for index, domain in enumerate(domains):
        rows = provenance == index
        if not np.any(rows):
            continue
        means = transformed_means(domain)
        X[rows] = means[labels[rows]] + domain.noise_scale * noise[rows]
    return LabeledBatch(X, labels, provenance)


def sample_batch(
    spec: Union[DomainSpec, MixtureSpec],
    batch_size: int,
    seed: int,
    domains: Optional[List[DomainSpec]] = None,
) -> LabeledBatch:
    """Labeled batch from one domain or from a mixture over `domains`.

    For a DomainSpec the provenance column holds its domain_id; for a mixture
    it holds the index into `domains`.
    """
    if batch_size < 2:
        raise DimensionError("a batch needs at least 2 samples")
    rng = stream_rng(seed, SAMPLE_STREAM)
    if isinstance(spec, DomainSpec):
        batch = draw([spec], [1.0], batch_size, rng)
        return batch._replace(provenance=np.full(batch_size, spec.domain_id))
    if domains is None or len(domains) != len(spec.pi):
        raise DimensionError("a mixture needs one DomainSpec per proportion")
    return draw(domains, spec.pi, batch_size, rng)


def held_out_test_set(domain: DomainSpec, n: int, seed: int) -> LabeledBatch:
    """Fixed labeled set of one domain, on a seed stream disjoint from training and streaming."""
    if not isinstance(domain, DomainSpec):
        raise TypeError("held-out sets are built from a single DomainSpec")
    if n < domain.n_classes:
        raise DimensionError(f"held-out set needs at least K={domain.n_classes} samples")
    rng = stream_rng(seed, HELD_OUT_STREAM, domain.domain_id)
    batch = draw([domain], [1.0], n, rng)
    return batch._replace(provenance=np.full(n, domain.domain_id))
