import numpy as np
import pytest

from kerrqrc.measurement import MeasurementModel, apply_distortion
from kerrqrc.readout import (BETA_GRID, FeatureMatrix, classify_accuracy,
                             greedy_select, load_model, nrmse, predict,
                             ridge_fit, save_model, select_beta)


def make_features(n=50, k=6, seed=0):
    rng = np.random.default_rng(seed)
    return FeatureMatrix.from_features(rng.normal(size=(n, k)))


class TestFeatureMatrix:
    def test_bias_column_enforced(self):
        with pytest.raises(ValueError):
            FeatureMatrix(np.ones((4, 3)) * 2.0)
        fm = FeatureMatrix.from_features(np.zeros((4, 2)))
        assert np.all(fm.values[:, -1] == 1.0)
        assert fm.n_features == 2

    def test_finite_required(self):
        bad = np.ones((3, 2))
        bad[0, 0] = np.nan
        with pytest.raises(ValueError):
            FeatureMatrix.from_features(bad)

    def test_select_keeps_bias(self):
        fm = make_features(10, 4)
        sub = fm.select([2, 0])
        assert sub.values.shape == (10, 3)
        assert np.array_equal(sub.values[:, 0], fm.values[:, 2])
        assert np.all(sub.values[:, -1] == 1.0)


class TestRidgeFit:
    def test_identity_no_bias(self):
        y = np.array([[2.0, 1.0], [0.5, -1.0], [3.0, 0.0]])
        model = ridge_fit(np.eye(3), y, beta=0.0)
        assert np.allclose(model.weights, y, atol=1e-10)

    def test_penalty_dominance(self):
        fm = make_features()
        y = np.arange(50.0)
        model = ridge_fit(fm, y, beta=1e14)
        assert np.max(np.abs(model.weights)) < 1e-6

    def test_matches_normal_equations(self):
        fm = make_features(50, 6, seed=4)
        rng = np.random.default_rng(5)
        y = rng.normal(size=(50, 2))
        beta = 0.1
        model = ridge_fit(fm, y, beta)
        f = fm.values
        brute = np.linalg.solve(f.T @ f + beta * np.eye(7), f.T @ y)
        assert np.max(np.abs(model.weights - brute)) < 1e-10

    def test_residual_gradient(self):
        fm = make_features(80, 5, seed=8)
        y = np.random.default_rng(9).normal(size=80)
        for beta in (0.0, 1e-4, 0.3):
            model = ridge_fit(fm, y, beta)
            grad = fm.values.T @ (predict(model, fm) - y[:, None]) \
                + beta * model.weights
            scale = np.max(np.abs(fm.values.T @ y[:, None]))
            assert np.max(np.abs(grad)) < 1e-8 * scale

    def test_rank_deficient_at_zero_beta(self):
        f = np.ones((6, 3))  # all columns identical
        with pytest.raises(np.linalg.LinAlgError, match="singular"):
            ridge_fit(f, np.arange(6.0), beta=0.0)

    def test_rejects_negative_beta_and_mismatch(self):
        fm = make_features(10, 2)
        with pytest.raises(ValueError):
            ridge_fit(fm, np.zeros(10), beta=-1.0)
        with pytest.raises(ValueError):
            ridge_fit(fm, np.zeros(9), beta=0.1)

    def test_local_minimum_of_cost(self):
        # perturbing any single weight entry never decreases J
        fm = make_features(40, 4, seed=12)
        y = np.random.default_rng(13).normal(size=(40, 1))
        beta = 0.05
        model = ridge_fit(fm, y, beta)

        def cost(w):
            r = fm.values @ w - y
            return float(np.sum(r * r) + beta * np.sum(w * w))

        j0 = cost(model.weights)
        for i in range(model.weights.shape[0]):
            for delta in (1e-4, -1e-4):
                w = model.weights.copy()
                w[i, 0] += delta
                assert cost(w) >= j0


class TestPredict:
    def test_zero_weights(self):
        fm = make_features(12, 3)
        model = ridge_fit(fm, np.zeros(12), beta=1.0)
        assert np.max(np.abs(predict(model, fm))) < 1e-12

    def test_linearity(self):
        fm = make_features(20, 4, seed=2)
        model = ridge_fit(fm, np.random.default_rng(3).normal(size=20), beta=0.01)
        f1 = fm.values.copy()
        f2 = fm.values[::-1].copy()
        lhs = (f1 + f2) @ model.weights
        rhs = f1 @ model.weights + f2 @ model.weights
        assert np.max(np.abs(lhs - rhs)) < 1e-12

    def test_shape_mismatch(self):
        model = ridge_fit(make_features(10, 3), np.zeros(10), beta=0.1)
        with pytest.raises(ValueError):
            predict(model, make_features(10, 5))


class TestMetrics:
    def test_accuracy_perfect_and_inverted(self):
        labels = np.array([0, 1, 1, 0])
        assert classify_accuracy(np.array([0.1, 0.9, 0.8, 0.2]), labels) == 1.0
        assert classify_accuracy(np.array([0.9, 0.1, 0.2, 0.8]), labels) == 0.0

    def test_accuracy_tie_toward_zero(self):
        labels = np.array([0, 0, 1, 0, 1])
        pred = np.full(5, 0.5)
        assert classify_accuracy(pred, labels) == pytest.approx(3 / 5)

    def test_nrmse_examples(self):
        assert nrmse([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 0.0
        assert nrmse([1.0, 0.0], [0.0, 1.0]) == pytest.approx(1.0)
        assert nrmse([1.0, 1.0], [0.0, 2.0]) == pytest.approx(0.5)

    def test_nrmse_constant_target(self):
        with pytest.raises(ValueError):
            nrmse([1.0, 2.0], [1.0, 1.0])


class TestGreedySelect:
    def test_k_equals_all(self):
        fm = make_features(30, 4, seed=6)
        y = (fm.values[:, 0] > 0).astype(float)
        idx = greedy_select(fm, y, 4, beta=1e-6)
        assert sorted(idx) == [0, 1, 2, 3]

    def test_duplicate_columns_not_picked_twice_early(self):
        rng = np.random.default_rng(17)
        informative = rng.normal(size=(60, 1))
        noise = rng.normal(size=(60, 1)) * 0.01
        features = np.hstack([informative, informative, noise,
                              rng.normal(size=(60, 1))])
        y = (informative[:, 0] + 0.3 * features[:, 3] > 0).astype(float)
        idx = greedy_select(FeatureMatrix.from_features(features), y, 2, beta=1e-6)
        assert idx[0] == 0           # tie between the twin columns 0 and 1
        assert idx[1] != 1           # the copy adds nothing before feature 3

    def test_k_bounds(self):
        fm = make_features(10, 3)
        y = np.zeros(10)
        with pytest.raises(ValueError):
            greedy_select(fm, y, 0, beta=0.1)
        with pytest.raises(ValueError):
            greedy_select(fm, y, 4, beta=0.1)


class TestBetaSelection:
    def test_ties_go_to_larger_beta(self):
        # constant-zero targets: every beta fits exactly -> the largest wins
        fm = make_features(40, 3, seed=20)
        y = np.zeros(40)
        assert select_beta(fm, y, classification=True) == BETA_GRID[-1]

    def test_regression_prefers_fit(self):
        rng = np.random.default_rng(30)
        f = rng.normal(size=(200, 4))
        w = np.array([1.0, -2.0, 0.5, 3.0])
        y = f @ w
        fm = FeatureMatrix.from_features(f)
        assert select_beta(fm, y, classification=False) <= 1e-4


class TestDistortionCompensation:
    def test_affine_map_absorbed_at_zero_beta(self):
        rng = np.random.default_rng(44)
        raw = rng.uniform(0.0, 1.0, size=(120, 6))
        labels = (raw[:, 0] + raw[:, 3] > 1.0).astype(float)
        model_cfg = MeasurementModel(distortion_a=0.5, distortion_b=0.25)
        distorted = np.vectorize(lambda p: apply_distortion(p, model_cfg))(raw)

        fm_ideal = FeatureMatrix.from_features(raw)
        fm_dist = FeatureMatrix.from_features(distorted)
        m_ideal = ridge_fit(fm_ideal, labels, beta=0.0)
        m_dist = ridge_fit(fm_dist, labels, beta=0.0)
        pred_ideal = predict(m_ideal, fm_ideal).ravel()
        pred_dist = predict(m_dist, fm_dist).ravel()
        assert np.array_equal(pred_ideal > 0.5, pred_dist > 0.5)
        assert classify_accuracy(pred_ideal, labels) == \
            classify_accuracy(pred_dist, labels)


class TestSerialization:
    def test_json_roundtrip(self, tmp_path):
        fm = make_features(25, 3, seed=1)
        fm = FeatureMatrix(fm.values, ("a", "b", "c"))
        model = ridge_fit(fm, np.random.default_rng(2).normal(size=(25, 2)),
                          beta=0.01, target_names=("u", "v"))
        path = tmp_path / "model.json"
        save_model(model, path)
        back = load_model(path)
        assert np.array_equal(back.weights, model.weights)
        assert back.beta == model.beta
        assert back.feature_labels == ("a", "b", "c")
        assert back.target_names == ("u", "v")
