import numpy as np

from udrl.models import GradientBoostingClassifier
from udrl.models._kernels import grow_tree_second_order


class TestSecondOrderTree:
    def test_single_leaf_value(self):
        # G = -2, H = 1, lambda = 1 -> leaf value -G/(H+lambda) = 1.0
        X = np.zeros((4, 1))
        g = np.array([-0.5, -0.5, -0.5, -0.5])
        h = np.array([0.25, 0.25, 0.25, 0.25])
        feat, _, _, _, _, _, leaf = grow_tree_second_order(X, g, h, 1.0, 0.0, 6, 2)
        assert len(feat) == 1 and feat[0] == -1
        assert abs(leaf[0] - 1.0) < 1e-12

    def test_gain_matches_hand_evaluation(self):
        # split x <= 1.5: G_L=-1.4, H_L=0.4, G_R=1.6, H_R=0.5, lam=1
        X = np.array([[1.0], [1.0], [2.0], [2.0]])
        g = np.array([-0.8, -0.6, 0.9, 0.7])
        h = np.array([0.16, 0.24, 0.09, 0.41])
        gl, hl = -1.4, 0.4
        gr, hr = 1.6, 0.5
        gtot, htot = 0.2, 0.9
        expected = 0.5 * (gl**2 / (hl + 1) + gr**2 / (hr + 1) - gtot**2 / (htot + 1))
        feat, thr, _, _, _, gain, _ = grow_tree_second_order(X, g, h, 1.0, 0.0, 6, 2)
        assert feat[0] == 0
        assert thr[0] == 1.5
        assert abs(gain[0] - expected) < 1e-12

    def test_no_positive_gain_stays_leaf(self):
        X = np.array([[1.0], [2.0]])
        g = np.array([0.0, 0.0])
        h = np.array([0.5, 0.5])
        feat, *_ = grow_tree_second_order(X, g, h, 1.0, 0.0, 6, 2)
        assert len(feat) == 1


class TestBoostedEnsemble:
    def test_zero_learning_rate_is_uniform(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(50, 3))
        y = rng.integers(0, 3, size=50)
        model = GradientBoostingClassifier(n_rounds=5, learning_rate=0.0).fit(X, y)
        proba = model.predict_proba(X)
        assert np.allclose(proba, 1.0 / 3.0, atol=1e-12)

    def test_round_zero_gradients_from_uniform_base(self):
        # with zero scores the softmax is 0.5 per class, so the first tree
        # of class 0 is fit on g = 0.5 - 1[y = 0]; a perfect split on the
        # label boundary then drives training accuracy to 1 in one round
        X = np.array([[0.0], [1.0], [2.0], [3.0]])
        y = np.array([0, 0, 1, 1])
        model = GradientBoostingClassifier(n_rounds=1, learning_rate=1.0).fit(X, y)
        scores = model.decision_scores(X)
        # leaf values: -G/(H+1) with per-sample g = ±0.5, h = 0.25
        # left leaf (two class-0 points): G=-1, H=0.5 -> +2/3
        assert np.allclose(scores[:2, 0], 2.0 / 3.0, atol=1e-12)
        assert np.allclose(scores[2:, 0], -2.0 / 3.0, atol=1e-12)
        assert (model.predict(X) == y).all()

    def test_learns_multiclass(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(300, 4))
        y = (X[:, 0] > 0).astype(int) + 2 * (X[:, 1] > 0).astype(int)
        model = GradientBoostingClassifier(n_rounds=20).fit(X, y, n_classes=4)
        assert (model.predict(X) == y).mean() > 0.95

    def test_proba_normalized(self):
        rng = np.random.default_rng(2)
        X = rng.normal(size=(100, 3))
        y = rng.integers(0, 3, size=100)
        model = GradientBoostingClassifier(n_rounds=10).fit(X, y)
        proba = model.predict_proba(rng.normal(size=(50, 3)))
        assert np.all(proba >= 0)
        assert np.allclose(proba.sum(axis=1), 1.0, atol=1e-9)

    def test_deterministic(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(80, 3))
        y = rng.integers(0, 2, size=80)
        a = GradientBoostingClassifier(n_rounds=10).fit(X, y)
        b = GradientBoostingClassifier(n_rounds=10).fit(X, y)
        assert np.array_equal(a.predict_proba(X), b.predict_proba(X))
