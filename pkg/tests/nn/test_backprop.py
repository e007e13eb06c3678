import numpy as np
import pytest

from src.errors import DimensionError
from src.nn import cross_entropy, forward, grad_bn_affine, grad_full, mean_entropy

H = 1e-5


def finite_difference(model, name, index, loss):
    params = model.parameters()
    original = params[name].copy()
    values = []
    for sign in (1.0, -1.0):
        shifted = original.copy()
        shifted[index] += sign * H
        model.assign({name: shifted})
        values.append(loss())
    model.assign({name: original})
    return (values[0] - values[1]) / (2 * H)


def sampled_coordinates(model, names, rng, count):
    params = model.parameters()
    coords = []
    for _ in range(count):
        name = names[rng.integers(len(names))]
        index = tuple(rng.integers(dim) for dim in params[name].shape)
        coords.append((name, index))
    return coords


def test_grad_bn_affine_matches_finite_differences(random_model):
    model = random_model(seed=11, layer_dims=(6, 8, 8, 4))
    rng = np.random.default_rng(0)
    X = rng.standard_normal((8, 6))
    grads = grad_bn_affine(model, X)
    assert set(grads) == set(model.bn_affine())
    for name, index in sampled_coordinates(model, sorted(grads), rng, 24):
        numeric = finite_difference(model, name, index, lambda: mean_entropy(model, X))
        assert grads[name][index] == pytest.approx(numeric, rel=1e-4, abs=1e-8)


def test_grad_full_matches_finite_differences(random_model):
    model = random_model(seed=12, layer_dims=(6, 8, 8, 4))
    rng = np.random.default_rng(1)
    X = rng.standard_normal((8, 6))
    labels = rng.integers(0, 4, size=8)
    grads = grad_full(model, X, labels)
    assert set(grads) == set(model.parameters())
    for name, index in sampled_coordinates(model, sorted(grads), rng, 30):
        numeric = finite_difference(model, name, index, lambda: cross_entropy(model, X, labels))
        assert grads[name][index] == pytest.approx(numeric, rel=1e-4, abs=1e-8)


def test_uniform_predictions_give_zero_output_path_gradient(random_model):
    model = random_model(seed=13, layer_dims=(6, 8, 8, 4))
    model.dense[-1].w[:] = 0.0
    X = np.random.default_rng(2).standard_normal((8, 6))
    for name, grad in grad_bn_affine(model, X).items():
        np.testing.assert_allclose(grad, 0.0, atol=1e-15, err_msg=name)


def test_saturated_model_has_vanishing_gradient(random_model):
    model = random_model(seed=14, layer_dims=(6, 8, 8, 4))
    model.dense[-1].w *= 1e6
    X = np.random.default_rng(3).standard_normal((8, 6))
    labels = np.argmax(forward(model, X).logits, axis=1)
    grads = grad_full(model, X, labels)
    total = np.sqrt(sum(float(np.sum(g ** 2)) for g in grads.values()))
    assert total < 1e-6


def test_gradients_need_two_rows(random_model):
    model = random_model()
    with pytest.raises(DimensionError):
        grad_bn_affine(model, np.zeros((1, 16)))
    with pytest.raises(DimensionError):
        grad_full(model, np.zeros((1, 16)), np.array([0]))


def test_grad_full_rejects_out_of_range_labels(random_model):
    model = random_model()
    with pytest.raises(DimensionError):
        grad_full(model, np.zeros((2, 16)), np.array([0, 5]))


def test_gradient_calls_do_not_mutate(random_model):
    model = random_model(seed=15)
    X = np.random.default_rng(4).standard_normal((8, 16))
    before = {name: value.copy() for name, value in model.parameters().items()}
    grad_bn_affine(model, X)
    grad_full(model, X, np.zeros(8, dtype=int))
    for name, value in model.parameters().items():
        np.testing.assert_array_equal(value, before[name])
