"""Sigmoid, gradient summands, full-batch descent, and the logistic model."""

import math
from decimal import Decimal, getcontext

import numpy as np
import pytest

from parml import (
    ConfigError,
    DimError,
    DivergenceError,
    LogisticModel,
    MLNumericTable,
    SgdConfig,
    WeightVector,
    generate_classification_data,
    gradient_descent,
    logistic_gradient_summand,
    sgd_optimize,
    sigmoid,
    train_logistic,
)


def exact_sigmoid(z, digits=40):
    """High-precision reference: 1 / (1 + e^-z) via Decimal."""
    getcontext().prec = digits
    return float(1 / (1 + Decimal(-z).exp()))


class TestSigmoid:
    def test_midpoint(self):
        assert sigmoid(0.0) == 0.5

    def test_known_value(self):
        assert sigmoid(2.0) == 0.8807970779778823

    def test_matches_decimal_reference(self):
        rng = np.random.default_rng(0)
        for z in rng.uniform(-30, 30, size=200):
            assert sigmoid(float(z)) == pytest.approx(exact_sigmoid(float(z)), rel=1e-15)

    def test_extreme_inputs_saturate_without_overflow(self):
        assert sigmoid(1000.0) == 1.0
        assert sigmoid(-1000.0) == 0.0
        assert 0.0 < sigmoid(-700.0) or sigmoid(-700.0) == 0.0  # no OverflowError

    def test_symmetry(self):
        rng = np.random.default_rng(1)
        for z in rng.uniform(-20, 20, size=100):
            assert sigmoid(z) + sigmoid(-z) == pytest.approx(1.0, abs=1e-15)

    def test_monotone(self):
        zs = np.linspace(-10, 10, 101)
        vals = [sigmoid(z) for z in zs]
        assert all(a < b for a, b in zip(vals, vals[1:]))


class TestGradientSummand:
    def test_zero_weights_balanced_point(self):
        g = logistic_gradient_summand(np.zeros(2), np.array([2.0, 4.0]), 1)
        np.testing.assert_allclose(g, [-1.0, -2.0])  # (0.5 - 1) * x

    def test_correctly_classified_point_small_gradient(self):
        w = np.array([10.0])
        g = logistic_gradient_summand(w, np.array([5.0]), 1)
        assert abs(g[0]) < 1e-15

    def test_matches_finite_differences(self):
        """Central differences on the pointwise loss, relative error < 1e-6."""

        def loss(w, x, y):
            z = float(w @ x)
            # numerically stable -[y log p + (1-y) log(1-p)]
            return math.log1p(math.exp(-abs(z))) + max(z, 0.0) - y * z

        rng = np.random.default_rng(2)
        h = 1e-6
        for _ in range(100):
            d = int(rng.integers(1, 8))
            w = rng.standard_normal(d)
            x = rng.standard_normal(d)
            y = int(rng.integers(0, 2))
            g = logistic_gradient_summand(w, x, y)
            for j in range(d):
                e = np.zeros(d)
                e[j] = h
                fd = (loss(w + e, x, y) - loss(w - e, x, y)) / (2 * h)
                assert g[j] == pytest.approx(fd, rel=1e-5, abs=1e-7)

    def test_dim_mismatch(self):
        with pytest.raises(DimError):
            logistic_gradient_summand(np.zeros(2), np.zeros(3), 1)


class TestWeightVector:
    def test_round_trip(self):
        w = WeightVector([1.0, 2.0])
        np.testing.assert_array_equal(w.values, [1.0, 2.0])
        assert w.d == 2 and len(w) == 2

    def test_rejects_non_finite(self):
        with pytest.raises(DivergenceError):
            WeightVector([1.0, float("nan")])
        with pytest.raises(DivergenceError):
            WeightVector([float("inf")])

    def test_values_read_only(self):
        w = WeightVector([1.0])
        with pytest.raises(ValueError):
            w.values[0] = 2.0

    def test_equality_exact(self):
        assert WeightVector([1.0, 2.0]) == WeightVector([1.0, 2.0])
        assert WeightVector([1.0]) != WeightVector([1.0 + 1e-16, 0.0])


class TestSgdConfig:
    def test_defaults(self):
        c = SgdConfig(learning_rate=0.5, rounds=3)
        assert c.local_passes == 1 and c.seed == 0

    def test_validation(self):
        with pytest.raises(ConfigError):
            SgdConfig(learning_rate=0.0, rounds=1)
        with pytest.raises(ConfigError):
            SgdConfig(learning_rate=0.1, rounds=0)
        with pytest.raises(ConfigError):
            SgdConfig(learning_rate=0.1, rounds=1, local_passes=0)
        with pytest.raises(ConfigError):
            SgdConfig(learning_rate=0.1, rounds=1, seed=-1)


class TestGradientDescent:
    def test_single_point_single_step(self):
        """One example x=[1], y=1, eta=1: w moves from 0 to eta*(1-sigmoid(0))=0.5."""
        data = MLNumericTable.from_array(np.array([[1.0]]))
        cfg = SgdConfig(learning_rate=1.0, rounds=1)
        w = gradient_descent(data, np.array([1]), cfg)
        np.testing.assert_allclose(w.values, [0.5])

    def test_matches_serial_reference(self):
        """Distributed descent equals a plain numpy loop at every step count."""
        rng = np.random.default_rng(3)
        x = rng.standard_normal((60, 4))
        y = (rng.random(60) < 0.5).astype(int)
        eta = 0.3

        w_ref = np.zeros(4)
        for t in range(1, 6):
            p = 1 / (1 + np.exp(-(x @ w_ref)))
            w_ref = w_ref - eta * ((p - y) @ x)
            data = MLNumericTable.from_array(x, num_partitions=3)
            cfg = SgdConfig(learning_rate=eta, rounds=t)
            got = gradient_descent(data, y, cfg)
            np.testing.assert_allclose(got.values, w_ref, rtol=1e-12, atol=1e-12)

    def test_partition_layout_invariant(self):
        rng = np.random.default_rng(4)
        x = rng.standard_normal((50, 3))
        y = (rng.random(50) < 0.5).astype(int)
        cfg = SgdConfig(learning_rate=0.1, rounds=4)
        results = []
        for parts in (1, 2, 5, 10):
            data = MLNumericTable.from_array(x, num_partitions=parts)
            results.append(gradient_descent(data, y, cfg).values)
        for r in results[1:]:
            np.testing.assert_allclose(r, results[0], atol=1e-12)

    def test_divergence_detected(self):
        data = MLNumericTable.from_array(np.array([[1e200], [1e200]]))
        cfg = SgdConfig(learning_rate=1e200, rounds=3)
        with pytest.raises(DivergenceError):
            gradient_descent(data, np.array([1, 1]), cfg)

    def test_label_length_mismatch(self):
        data = MLNumericTable.from_array(np.ones((4, 2)))
        with pytest.raises(DimError):
            gradient_descent(data, np.array([1, 0]), SgdConfig(learning_rate=0.1, rounds=1))


class TestSgdOptimize:
    def test_single_partition_matches_hand_loop(self):
        """P=1 must reproduce a plain sequential SGD loop bit for bit."""
        rng = np.random.default_rng(5)
        x = rng.standard_normal((30, 3))
        y = (rng.random(30) < 0.5).astype(int)
        eta, rounds, passes, seed = 0.25, 4, 2, 42

        w_ref = np.zeros(3)
        for t in range(rounds):
            order_rng = np.random.default_rng([seed, t, 0])
            for _ in range(passes):
                for i in order_rng.permutation(30):
                    z = float(w_ref @ x[i])
                    p = 1 / (1 + math.exp(-z)) if z >= 0 else math.exp(z) / (1 + math.exp(z))
                    w_ref -= eta * ((p - y[i]) * x[i])

        data = MLNumericTable.from_array(x, num_partitions=1)
        cfg = SgdConfig(learning_rate=eta, rounds=rounds, local_passes=passes, seed=seed)
        got = sgd_optimize(data, y, cfg)
        assert got.values.tobytes() == w_ref.tobytes()

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(6)
        x = rng.standard_normal((40, 3))
        y = (rng.random(40) < 0.5).astype(int)
        data = MLNumericTable.from_array(x, num_partitions=4)
        cfg = SgdConfig(learning_rate=0.5, rounds=3, seed=9)
        a = sgd_optimize(data, y, cfg, workers=4)
        b = sgd_optimize(data, y, cfg, workers=4)
        assert a == b

    def test_seed_changes_trajectory(self):
        rng = np.random.default_rng(7)
        x = rng.standard_normal((40, 3))
        y = (rng.random(40) < 0.5).astype(int)
        data = MLNumericTable.from_array(x, num_partitions=2)
        a = sgd_optimize(data, y, SgdConfig(learning_rate=0.5, rounds=2, seed=1))
        b = sgd_optimize(data, y, SgdConfig(learning_rate=0.5, rounds=2, seed=2))
        assert a != b

    def test_custom_gradient_fn(self):
        """Plug in a squared-loss summand; SGD then fits a linear model."""
        rng = np.random.default_rng(8)
        x = rng.standard_normal((200, 2))
        truth = np.array([1.5, -2.0])
        y = x @ truth

        def squared_loss_grad(w, xi, yi):
            return (float(w @ xi) - yi) * xi

        data = MLNumericTable.from_array(x, num_partitions=1)
        cfg = SgdConfig(learning_rate=0.05, rounds=30, seed=0)
        w = sgd_optimize(data, y, cfg, gradient_fn=squared_loss_grad)
        np.testing.assert_allclose(w.values, truth, atol=1e-3)

    def test_empty_table_rejected(self):
        from parml import EmptyTableError

        data = MLNumericTable.from_array(np.zeros((0, 3)))
        with pytest.raises(EmptyTableError):
            sgd_optimize(data, np.zeros(0), SgdConfig(learning_rate=0.1, rounds=1))


class TestLogisticModel:
    def test_predictions_and_threshold(self):
        m = LogisticModel(WeightVector([1.0, 0.0]))
        assert m.predict_probability([4.0, 0.0]) == sigmoid(4.0)
        assert m.predict([4.0, 0.0]) == 1
        assert m.predict([-4.0, 0.0]) == 0
        assert m.predict([0.0, 0.0]) == 1  # p = 0.5 sits on the positive side

    def test_predict_all_matches_pointwise(self):
        rng = np.random.default_rng(9)
        w = WeightVector(rng.standard_normal(3))
        m = LogisticModel(w)
        x = rng.standard_normal((20, 3))
        data = MLNumericTable.from_array(x)
        got = m.predict_all(data)
        want = [m.predict(row) for row in x]
        np.testing.assert_array_equal(got, want)

    def test_accuracy(self):
        m = LogisticModel(WeightVector([1.0]))
        data = MLNumericTable.from_array(np.array([[1.0], [-1.0], [2.0]]))
        assert m.accuracy(data, np.array([1, 0, 0])) == pytest.approx(2 / 3)

    def test_save_load_round_trip(self, tmp_path):
        rng = np.random.default_rng(10)
        m = LogisticModel(WeightVector(rng.standard_normal(7)))
        p = tmp_path / "model.txt"
        m.save(p)
        back = LogisticModel.load(p)
        assert back.weights == m.weights

    def test_load_rejects_truncated_file(self, tmp_path):
        p = tmp_path / "model.txt"
        p.write_text("3\n0.5\n0.25\n")
        with pytest.raises(ValueError):
            LogisticModel.load(p)


class TestTrainLogistic:
    def test_learns_separable_data(self):
        gen = generate_classification_data(n=500, d=5, seed=11)
        cfg = SgdConfig(learning_rate=0.5, rounds=10, seed=11)
        model = train_logistic(gen.table, gen.labels, cfg)
        assert model.accuracy(gen.table, gen.labels) >= 0.98

    def test_worker_count_is_quality_neutral_for_one_partition(self):
        gen = generate_classification_data(n=100, d=3, seed=12)
        data = gen.table.repartition(1)
        cfg = SgdConfig(learning_rate=0.5, rounds=3, seed=12)
        a = train_logistic(data, gen.labels, cfg, workers=1)
        b = train_logistic(data, gen.labels, cfg, workers=4)
        assert a.weights == b.weights
