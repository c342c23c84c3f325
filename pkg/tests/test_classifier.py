import math

import numpy as np
import pytest

from somaction.classifier import (OutputLayer, create_output_layer,
                                  out_activity, predict, scores, train_step)
from somaction.errors import DimensionMismatch, UnknownClass, ZeroVector


class TestOutActivity:
    def test_parallel(self, rng):
        x = rng.normal(size=5)
        assert abs(out_activity(x, x) - 1.0) < 1e-12
        assert abs(out_activity(x, 3.0 * x) - 1.0) < 1e-12

    def test_orthogonal(self):
        assert out_activity([1.0, 0.0], [0.0, 2.0]) == 0.0

    def test_brute_force_oracle(self, rng):
        for _ in range(200):
            x, w = rng.normal(size=8), rng.normal(size=8)
            dot = sum(a * b for a, b in zip(x, w))
            nx = math.sqrt(sum(a * a for a in x))
            nw = math.sqrt(sum(b * b for b in w))
            assert abs(out_activity(x, w) - dot / (nx * nw)) < 1e-12

    def test_bounds(self, rng):
        for _ in range(100):
            v = out_activity(rng.normal(size=4), rng.normal(size=4))
            assert -1.0 <= v <= 1.0

    def test_errors(self):
        with pytest.raises(ZeroVector):
            out_activity([0.0, 0.0], [1.0, 0.0])
        with pytest.raises(DimensionMismatch):
            out_activity([1.0], [1.0, 2.0])


class TestTrainStep:
    def test_beta_zero_is_identity(self, rng):
        layer = create_output_layer(["a", "b"], 4, beta=0.0, seed=0)
        before = layer.weights.copy()
        train_step(layer, rng.normal(size=4), "a")
        np.testing.assert_array_equal(layer.weights, before)

    def test_fixed_point_bitwise(self):
        x = np.array([2.0, 0.0, 0.0])
        w = np.array([[1.0, 0.0, 0.0],   # cos = 1 = target
                      [0.0, 1.0, 0.0]])  # cos = 0 = target
        layer = OutputLayer(classes=("hit", "miss"), weights=w.copy(), beta=0.3)
        train_step(layer, x, "hit")
        np.testing.assert_array_equal(layer.weights, w)

    def test_unknown_class(self, rng):
        layer = create_output_layer(["a"], 3, seed=1)
        with pytest.raises(UnknownClass):
            train_step(layer, rng.normal(size=3), "z")

    def test_converges_on_orthogonal_prototypes(self):
        xa = np.array([1.0, 0.0, 0.0, 0.0])
        xb = np.array([0.0, 1.0, 0.0, 0.0])
        layer = create_output_layer(["a", "b"], 4, beta=0.1, seed=2)
        for _ in range(200):
            train_step(layer, xa, "a")
            train_step(layer, xb, "b")
        assert predict(layer, xa) == "a"
        assert predict(layer, xb) == "b"

    def test_strict_mode_matches_printed_rule(self, rng):
        layer = create_output_layer(["a", "b"], 3, beta=0.2, seed=3,
                                    strict_update=True)
        x = rng.normal(size=3)
        y = scores(layer, x)
        d = np.array([1.0, 0.0])
        expected = layer.weights + 0.2 * (y - d)[:, None]
        train_step(layer, x, "a")
        np.testing.assert_allclose(layer.weights, expected, atol=1e-15)

    def test_separable_toy_set_reaches_full_accuracy(self, rng):
        # three well separated directions, a few noisy samples each
        protos = np.eye(3)
        classes = ["c0", "c1", "c2"]
        data = []
        for k, c in enumerate(classes):
            for _ in range(10):
                data.append((protos[k] + rng.normal(scale=0.05, size=3), c))
        layer = create_output_layer(classes, 3, beta=0.1, seed=4)
        for _ in range(100):
            for x, c in data:
                train_step(layer, x, c)
        assert all(predict(layer, x) == c for x, c in data)


class TestPredict:
    def test_exact_weight(self, rng):
        layer = create_output_layer(["a", "b", "c"], 5, seed=5)
        x = layer.weights[1].copy()
        assert predict(layer, x) == "b"

    def test_scale_invariance(self, rng):
        layer = create_output_layer(["a", "b", "c"], 6, seed=6)
        for _ in range(50):
            x = rng.normal(size=6)
            p = predict(layer, x)
            for k in (1e-6, 0.5, 7.0, 1e6):
                assert predict(layer, k * x) == p

    def test_argmax_oracle(self, rng):
        layer = create_output_layer(["a", "b", "c", "d"], 5, seed=7)
        for _ in range(50):
            x = rng.normal(size=5)
            best = max(range(4),
                       key=lambda k: out_activity(x, layer.weights[k]))
            assert predict(layer, x) == layer.classes[best]

    def test_tie_to_smallest_index(self):
        w = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        layer = OutputLayer(classes=("a", "b", "c"), weights=w)
        assert predict(layer, np.array([2.0, 0.0])) == "a"

    def test_zero_vector(self):
        layer = create_output_layer(["a"], 3, seed=8)
        with pytest.raises(ZeroVector):
            predict(layer, np.zeros(3))
