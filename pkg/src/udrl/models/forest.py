"""Randomized tree ensembles: bagged forests and extremely randomized trees.

Both average the leaf class-frequency vectors of their trees. The forest
draws a bootstrap resample per tree and searches exhaustive splits over a
random feature subset; the extremely randomized variant skips the
bootstrap and draws a single uniform threshold per candidate feature.
Per-tree randomness comes from streams derived from ``random_state`` and
the tree index, so fits are reproducible.
"""

from __future__ import annotations

import numpy as np

from udrl.models import _kernels
from udrl.models.base import BehaviorClassifier
from udrl.models.tree import TreeArraysMixin, resolve_max_features


class _BaseForest(TreeArraysMixin, BehaviorClassifier):
    _random_threshold = False

    def _fit(self, X, y):
        arrays = _kernels.grow_forest(
            X,
            y,
            np.ones(len(y)),
            self.n_classes_,
            int(self.n_trees),
            -1 if self.max_depth is None else int(self.max_depth),
            int(self.min_samples_split),
            resolve_max_features(self.max_features, X.shape[1]),
            bool(self.bootstrap),
            self._random_threshold,
            int(self.random_state),
        )
        self._store_nodes(arrays)

    def _proba(self, X):
        return _kernels.forest_predict_proba(
            X,
            self.node_feature_,
            self.node_threshold_,
            self.node_left_,
            self.node_right_,
            self.node_value_,
            self.tree_roots_,
        )


class RandomForestClassifier(_BaseForest):
    def __init__(
        self,
        n_trees=100,
        max_depth=None,
        min_samples_split=2,
        max_features="sqrt",
        bootstrap=True,
        random_state=0,
    ):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.random_state = random_state


class ExtraTreesClassifier(_BaseForest):
    _random_threshold = True

    def __init__(
        self,
        n_trees=100,
        max_depth=None,
        min_samples_split=2,
        max_features="sqrt",
        bootstrap=False,
        random_state=0,
    ):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.random_state = random_state
