import numpy as np
import pytest

from udrl.importance import (
    GLOBAL_MDI,
    LOCAL_PATH,
    ImportanceVector,
    UnsupportedModelError,
    export_importance_dat,
    global_mdi,
    local_path_importance,
    read_importance_dat,
)
from udrl.models import (
    DecisionTreeClassifier,
    ExtraTreesClassifier,
    KNeighborsClassifier,
    GradientBoostingClassifier,
    RandomForestClassifier,
)
from udrl.models._kernels import path_contributions


def single_feature_forest(informative=2, d=4, n=200, seed=0, **kwargs):
    """Only one feature carries signal; the rest are constant, so every
    split lands on the informative feature."""
    rng = np.random.default_rng(seed)
    X = np.zeros((n, d))
    X[:, informative] = rng.normal(size=n)
    y = (X[:, informative] > 0).astype(int)
    params = dict(n_trees=3, bootstrap=False, max_features="all")
    params.update(kwargs)
    return RandomForestClassifier(**params).fit(X, y), X


class TestGlobalMdi:
    def test_single_informative_feature_is_indicator(self):
        model, _ = single_feature_forest()
        vec = global_mdi(model)
        assert vec.kind == GLOBAL_MDI
        assert np.allclose(vec.scores, [0, 0, 1, 0], atol=1e-12)

    def test_noise_labels_spread_importance(self):
        rng = np.random.default_rng(42)
        X = rng.normal(size=(300, 4))
        y = rng.integers(0, 2, size=300)
        model = RandomForestClassifier(n_trees=2, random_state=0).fit(X, y)
        vec = global_mdi(model)
        assert vec.scores.max() < 0.6

    def test_sums_to_one_for_trained_forests(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(150, 6))
        y = (X[:, 0] + X[:, 3] > 0).astype(int)
        for cls in (RandomForestClassifier, ExtraTreesClassifier):
            model = cls(n_trees=10).fit(X, y)
            vec = global_mdi(model)
            assert np.all(vec.scores >= 0)
            assert abs(vec.scores.sum() - 1.0) < 1e-9

    def test_no_splits_gives_all_zero(self):
        rng = np.random.default_rng(2)
        X = rng.normal(size=(10, 3))
        y = rng.integers(0, 2, size=10)
        model = RandomForestClassifier(n_trees=3, min_samples_split=100).fit(X, y)
        assert np.array_equal(global_mdi(model).scores, np.zeros(3))

    def test_unsupported_families_rejected(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(30, 3))
        y = rng.integers(0, 2, size=30)
        for model in (
            KNeighborsClassifier().fit(X, y),
            GradientBoostingClassifier(n_rounds=2).fit(X, y),
        ):
            with pytest.raises(UnsupportedModelError):
                global_mdi(model)

    def test_feature_names_carried(self):
        model, _ = single_feature_forest()
        vec = global_mdi(model, feature_names=("a", "b", "c", "d"))
        assert vec.feature_names == ("a", "b", "c", "d")


class TestLocalPathImportance:
    def test_never_traversed_feature_scores_zero(self):
        model, _ = single_feature_forest()
        vec = local_path_importance(model, np.array([9.0, 9.0, 0.1, 9.0]))
        assert vec.kind == LOCAL_PATH
        assert vec.scores[0] == 0 and vec.scores[1] == 0 and vec.scores[3] == 0

    def test_depth_one_tree_is_indicator_everywhere(self):
        rng = np.random.default_rng(4)
        X = rng.normal(size=(100, 3))
        y = (X[:, 0] > 0).astype(int)
        model = RandomForestClassifier(
            n_trees=1, max_depth=1, bootstrap=False, max_features="all"
        ).fit(X, y)
        for _ in range(20):
            x = rng.normal(size=3)
            vec = local_path_importance(model, x)
            assert np.allclose(vec.scores, [1, 0, 0], atol=1e-12)

    def test_normalized_and_nonnegative(self):
        rng = np.random.default_rng(5)
        X = rng.normal(size=(200, 5))
        y = ((X[:, 1] > 0) ^ (X[:, 4] > 0)).astype(int)
        model = ExtraTreesClassifier(n_trees=15).fit(X, y)
        for _ in range(50):
            vec = local_path_importance(model, rng.normal(size=5))
            assert np.all(vec.scores >= 0)
            total = vec.scores.sum()
            assert total == 0 or abs(total - 1.0) < 1e-9

    def test_monte_carlo_average_matches_frequency_weighting(self):
        # with uniformly distributed training data, the sample fraction at a
        # node estimates the probability a uniform query reaches it, so the
        # expected raw path contribution equals the sample-weighted profile
        rng = np.random.default_rng(6)
        X = rng.uniform(0, 1, size=(400, 2))
        y = ((X[:, 0] > 0.5) & (X[:, 1] > 0.3)).astype(int)
        model = RandomForestClassifier(
            n_trees=5, max_depth=3, bootstrap=False, max_features="all", random_state=1
        ).fit(X, y)

        queries = rng.uniform(0, 1, size=(20000, 2))
        raw = np.zeros(2)
        for q in queries:
            raw += path_contributions(
                np.ascontiguousarray(q),
                model.node_feature_,
                model.node_threshold_,
                model.node_left_,
                model.node_right_,
                model.node_decrease_,
                model.tree_roots_,
                2,
            )
        raw /= len(queries)

        expected = np.zeros(2)
        for t in range(len(model.tree_roots_)):
            start, end = model.tree_node_range(t)
            feats = model.node_feature_[start:end]
            internal = feats >= 0
            weights = (
                model.node_samples_[start:end][internal]
                / model.node_samples_[start]
                * model.node_decrease_[start:end][internal]
            )
            np.add.at(expected, feats[internal], weights)
        expected /= len(model.tree_roots_)

        assert np.allclose(raw, expected, atol=0.02)

    def test_wrong_dimension_rejected(self):
        model, _ = single_feature_forest()
        with pytest.raises(ValueError, match="dimension"):
            local_path_importance(model, np.zeros(7))

    def test_unsupported_model_rejected(self):
        rng = np.random.default_rng(7)
        X = rng.normal(size=(30, 3))
        y = rng.integers(0, 2, size=30)
        knn = KNeighborsClassifier().fit(X, y)
        with pytest.raises(UnsupportedModelError):
            local_path_importance(knn, np.zeros(3))


class TestExportDat:
    def test_three_lines(self, tmp_path):
        vec = ImportanceVector(np.array([0.5, 0.3, 0.2]), GLOBAL_MDI)
        path = tmp_path / "scores.dat"
        export_importance_dat(vec, path)
        assert path.read_text() == "0 0.5\n1 0.3\n2 0.2\n"

    def test_round_trip(self, tmp_path):
        scores = np.array([0.123456789012345, 0.5, 0.376543210987655])
        path = tmp_path / "scores.dat"
        export_importance_dat(ImportanceVector(scores, LOCAL_PATH), path)
        assert np.allclose(read_importance_dat(path), scores, atol=1e-9)

    def test_line_count_matches_feature_count(self, tmp_path):
        from udrl.envs import EnvKind, env_spec, input_feature_names

        for kind in EnvKind:
            names = input_feature_names(kind)
            vec = ImportanceVector(np.zeros(len(names)), GLOBAL_MDI, names)
            path = tmp_path / f"{kind.value}.dat"
            export_importance_dat(vec, path)
            n_lines = len(path.read_text().splitlines())
            assert n_lines == env_spec(kind).state_dim + 2
