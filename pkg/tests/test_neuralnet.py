import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybridode.errors import DimensionError
from hybridode.neuralnet import (
    FeedForwardNet,
    backprop,
    forward,
    forward_cached,
    init_weights,
    load_model,
    permute_hidden,
    save_model,
    sigmoid,
)
from hybridode.neuralnet import _py_kernels
from hybridode.neuralnet._backend import BACKEND, kernels


def zero_net(dims):
    weights = [np.zeros((dims[l + 1], dims[l] + 1)) for l in range(len(dims) - 1)]
    return FeedForwardNet(tuple(dims), weights)


def sse_loss(net, x, target):
    r = forward(net, x) - target
    return float(r @ r)


def numeric_grad(net, x, target, h=1e-5):
    grads = []
    for l, w in enumerate(net.weights):
        g = np.empty_like(w)
        for idx in np.ndindex(*w.shape):
            orig = w[idx]
            w[idx] = orig + h
            hi = sse_loss(net, x, target)
            w[idx] = orig - h
            lo = sse_loss(net, x, target)
            w[idx] = orig
            g[idx] = (hi - lo) / (2 * h)
        grads.append(g)
    return grads


class TestSigmoid:
    def test_center(self):
        assert sigmoid(0.0) == 0.5

    def test_reflection_identity(self):
        assert sigmoid(3.7) + sigmoid(-3.7) == pytest.approx(1.0, abs=1e-15)

    def test_hand_value(self):
        assert sigmoid(1.0) == pytest.approx(0.7310585786300049, rel=1e-15)

    def test_saturation_without_overflow(self):
        assert sigmoid(800.0) == 1.0
        assert sigmoid(-800.0) == 0.0

    @given(st.floats(min_value=-36, max_value=36))
    def test_range(self, x):
        # beyond |x| ~ 36.7 the value rounds to exactly 0 or 1 in float64
        assert 0.0 < sigmoid(x) < 1.0

    @given(st.floats(min_value=-20, max_value=19.5))
    @settings(max_examples=50)
    def test_strictly_increasing(self, x):
        assert sigmoid(x + 0.5) > sigmoid(x)


class TestForward:
    def test_zero_weight_net(self):
        net = zero_net((1, 10, 1))
        out, pre, act = forward_cached(net, np.array([3.0]))
        assert out[0] == 0.0
        np.testing.assert_array_equal(pre[0], np.zeros(10))
        np.testing.assert_array_equal(act[0], np.full(10, 0.5))

    def test_hand_evaluated_1_1_1(self):
        net = FeedForwardNet((1, 1, 1), [np.array([[0.0, 0.0]]), np.array([[2.0, -1.0]])])
        assert forward(net, np.array([7.0]))[0] == pytest.approx(0.0, abs=1e-15)

    def test_single_linear_layer_is_identity(self):
        net = FeedForwardNet((1, 1), [np.array([[1.0, 0.0]])])
        assert forward(net, np.array([0.37]))[0] == 0.37

    def test_cached_matches_forward_bitwise(self, rng):
        net = init_weights((3, 10, 1), 5)
        x = rng.standard_normal(3)
        out, pre, act = forward_cached(net, x)
        assert np.array_equal(out, forward(net, x))
        assert len(pre) == len(act) == 2

    def test_input_dim_checked(self):
        net = init_weights((3, 4, 2), 0)
        with pytest.raises(DimensionError):
            forward(net, np.zeros(5))


class TestBackprop:
    def test_zero_residual_zero_gradient(self):
        net = zero_net((2, 5, 1))
        loss, grads = backprop(net, np.array([1.0, 2.0]), np.array([0.0]))
        assert loss == 0.0
        assert all(np.array_equal(g, np.zeros_like(g)) for g in grads)

    def test_hand_differentiated_linear_net(self):
        a, b, x = 0.7, -0.2, 1.3
        net = FeedForwardNet((1, 1), [np.array([[a, b]])])
        loss, grads = backprop(net, np.array([x]), np.array([0.0]))
        assert loss == pytest.approx((a * x + b) ** 2, rel=1e-14)
        assert grads[0][0, 0] == pytest.approx(2 * (a * x + b) * x, rel=1e-14)
        assert grads[0][0, 1] == pytest.approx(2 * (a * x + b), rel=1e-14)

    @pytest.mark.parametrize("dims", [(3, 10, 1), (2, 5, 5, 2), (1, 4, 1), (4, 3, 2)])
    def test_matches_finite_differences(self, dims, rng):
        for trial in range(5):
            net = init_weights(dims, 100 + trial)
            x = rng.standard_normal(dims[0])
            target = rng.standard_normal(dims[-1])
            _, grads = backprop(net, x, target)
            num = numeric_grad(net, x, target)
            for g, n in zip(grads, num):
                err = np.abs(g - n)
                tol = np.maximum(1e-6 * np.abs(n), 1e-8)
                assert np.all(err <= tol)


class TestInitWeights:
    def test_bias_columns_zero(self):
        net = init_weights((3, 10, 2), 0)
        for w in net.weights:
            assert np.array_equal(w[:, -1], np.zeros(w.shape[0]))

    def test_seed_determinism(self):
        a = init_weights((3, 10, 1), 77)
        b = init_weights((3, 10, 1), 77)
        assert all(np.array_equal(x, y) for x, y in zip(a.weights, b.weights))

    def test_standard_normal_sample_mean(self):
        net = init_weights((99, 100, 1), 0)
        entries = net.weights[0][:, :-1].ravel()
        assert entries.size >= 9900
        assert abs(entries.mean()) < 0.05


class TestPermuteHidden:
    def test_identity_permutation(self):
        net = init_weights((2, 5, 1), 3)
        p = permute_hidden(net, 1, list(range(5)))
        assert all(np.array_equal(a, b) for a, b in zip(net.weights, p.weights))

    def test_swap_is_involution(self):
        net = init_weights((2, 5, 1), 3)
        perm = [1, 0, 2, 3, 4]
        twice = permute_hidden(permute_hidden(net, 1, perm), 1, perm)
        assert all(np.array_equal(a, b) for a, b in zip(net.weights, twice.weights))

    def test_forward_invariance(self, rng):
        net = init_weights((3, 10, 2), 11)
        perm = rng.permutation(10)
        permuted = permute_hidden(net, 1, perm)
        for _ in range(100):
            x = rng.standard_normal(3)
            delta = np.abs(forward(net, x) - forward(permuted, x))
            assert np.max(delta) <= 1e-12

    def test_deep_net_middle_layer(self, rng):
        net = init_weights((2, 5, 5, 2), 13)
        permuted = permute_hidden(net, 2, rng.permutation(5))
        x = rng.standard_normal(2)
        np.testing.assert_allclose(forward(net, x), forward(permuted, x), atol=1e-12)

    def test_invalid_permutation_rejected(self):
        net = init_weights((2, 5, 1), 3)
        with pytest.raises(ValueError):
            permute_hidden(net, 1, [0, 0, 1, 2, 3])
        with pytest.raises(DimensionError):
            permute_hidden(net, 2, [0, 1, 2, 3, 4])


class TestOutputLayerAffine:
    def test_linear_in_final_weights(self, rng):
        net = init_weights((2, 6, 2), 21)
        x = rng.standard_normal(2)
        base = forward(net, x)
        delta = rng.standard_normal(net.weights[-1].shape)

        def bumped(scale):
            w = [v.copy() for v in net.weights]
            w[-1] = w[-1] + scale * delta
            return forward(FeedForwardNet(net.layer_dims, w), x)

        d1 = bumped(1e-3) - base
        d2 = bumped(2e-3) - base
        np.testing.assert_allclose(d2, 2.0 * d1, rtol=1e-9)


class TestSerialization:
    def test_round_trip_bit_exact(self, tmp_path):
        net = init_weights((3, 10, 2), 17)
        path = tmp_path / "model.txt"
        save_model(net, path)
        loaded = load_model(path)
        assert loaded.layer_dims == net.layer_dims
        assert all(np.array_equal(a, b) for a, b in zip(net.weights, loaded.weights))

    def test_save_is_deterministic(self, tmp_path):
        net = init_weights((2, 4, 1), 5)
        p1, p2 = tmp_path / "a.txt", tmp_path / "b.txt"
        save_model(net, p1)
        save_model(net, p2)
        assert p1.read_bytes() == p2.read_bytes()


class TestBackendParity:
    """The compiled kernels must agree with the numpy fallback."""

    def test_active_backend_known(self):
        assert BACKEND in ("cython", "python")

    @pytest.mark.parametrize("dims", [(2, 10, 1), (3, 5, 5, 2)])
    def test_forward_and_backprop_agree(self, dims, rng):
        net = init_weights(dims, 31)
        x = rng.standard_normal(dims[0])
        target = rng.standard_normal(dims[-1])
        np.testing.assert_allclose(
            kernels.forward(net.weights, x),
            _py_kernels.forward(net.weights, x),
            rtol=1e-12, atol=1e-14,
        )
        l1, g1 = kernels.backprop(net.weights, x, target)
        l2, g2 = _py_kernels.backprop(net.weights, x, target)
        assert l1 == pytest.approx(l2, rel=1e-12)
        for a, b in zip(g1, g2):
            np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-14)

    def test_dataset_sse_agrees(self, rng):
        net = init_weights((4, 7, 3), 8)
        x = rng.standard_normal((25, 4))
        y = rng.standard_normal((25, 3))
        a = kernels.dataset_sse(net.weights, x, y)
        b = _py_kernels.dataset_sse(net.weights, x, y)
        assert a == pytest.approx(b, rel=1e-12)
