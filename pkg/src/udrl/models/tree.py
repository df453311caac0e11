"""Single CART-style decision tree classifier.

Grown top-down on Gini impurity. Two split modes: exhaustive evaluation of
all midpoints between consecutive sorted unique feature values (``best``),
or one uniform random threshold per candidate feature (``random``, the
extremely-randomized rule). Supports per-sample weights, which the
boosting ensemble relies on.
"""

from __future__ import annotations

import numpy as np

from udrl.models import _kernels
from udrl.models.base import BehaviorClassifier


def resolve_max_features(rule, n_features: int) -> int:
    if rule in (None, "all"):
        return n_features
    if rule == "sqrt":
        return max(1, int(np.sqrt(n_features)))
    raise ValueError(f"max_features must be 'all', 'sqrt', or None, got {rule!r}")


class TreeArraysMixin:
    """Flat-array tree storage shared by every tree-backed estimator.

    Fitted attributes: ``node_feature_`` (-1 for leaves), ``node_threshold_``,
    ``node_left_``/``node_right_`` (child node ids), ``node_impurity_``,
    ``node_samples_``, ``node_decrease_`` (impurity decrease of the split),
    ``node_value_`` (class-frequency vectors), ``tree_roots_``.
    """

    def _store_nodes(self, arrays):
        (
            self.node_feature_,
            self.node_threshold_,
            self.node_left_,
            self.node_right_,
            self.node_impurity_,
            self.node_samples_,
            self.node_decrease_,
            self.node_value_,
            self.tree_roots_,
        ) = arrays

    def tree_node_range(self, tree_index: int) -> tuple[int, int]:
        """Node-id interval [start, end) occupied by one tree."""
        start = int(self.tree_roots_[tree_index])
        if tree_index + 1 < len(self.tree_roots_):
            end = int(self.tree_roots_[tree_index + 1])
        else:
            end = len(self.node_feature_)
        return start, end


class DecisionTreeClassifier(TreeArraysMixin, BehaviorClassifier):
    """One tree, no bootstrap. ``splitter='best'`` is exhaustive CART;
    ``splitter='random'`` draws one threshold per candidate feature."""

    def __init__(
        self,
        max_depth=None,
        min_samples_split=2,
        max_features=None,
        splitter="best",
        random_state=0,
    ):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.max_features = max_features
        self.splitter = splitter
        self.random_state = random_state

    def fit(self, X, y, n_classes=None, sample_weight=None):
        self._sample_weight = sample_weight
        try:
            return super().fit(X, y, n_classes=n_classes)
        finally:
            del self._sample_weight

    def _fit(self, X, y):
        w = self._sample_weight
        w = np.ones(len(y)) if w is None else np.asarray(w, dtype=np.float64)
        if self.splitter not in ("best", "random"):
            raise ValueError(f"unknown splitter {self.splitter!r}")
        arrays = _kernels.grow_forest(
            X,
            y,
            w,
            self.n_classes_,
            1,
            -1 if self.max_depth is None else int(self.max_depth),
            int(self.min_samples_split),
            resolve_max_features(self.max_features, X.shape[1]),
            False,
            self.splitter == "random",
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
