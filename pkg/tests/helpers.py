import numpy as np

SEEDS = (0, 1, 2, 3, 4)


def random_cube(rng: np.random.Generator, batch: int, n_sources: int, n_classes: int, scale: float = 2.0) -> np.ndarray:
    """B x N x K cube of softmax rows from Gaussian logits."""
    logits = scale * rng.standard_normal((batch, n_sources, n_classes))
    logits -= logits.max(axis=2, keepdims=True)
    probs = np.exp(logits)
    return probs / probs.sum(axis=2, keepdims=True)


def random_simplex(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.dirichlet(np.ones(n))


def central_difference(f, x: np.ndarray, h: float) -> np.ndarray:
    grad = np.zeros_like(x)
    for i in range(x.shape[0]):
        step = np.zeros_like(x)
        step[i] = h
        grad[i] = (f(x + step) - f(x - step)) / (2 * h)
    return grad
