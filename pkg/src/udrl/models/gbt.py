"""Gradient-boosted trees with a second-order softmax objective.

Per round and per class: gradients g_i = p_ic - 1[y_i = c] and hessians
h_i = p_ic (1 - p_ic) of the softmax cross-entropy, a depth-limited
regression tree grown on the usual second-order split gain, and class
scores accumulated with shrinkage. Scores start at zero, so the base
distribution is uniform.
"""

from __future__ import annotations

import numpy as np

from udrl.models import _kernels
from udrl.models.base import BehaviorClassifier


def softmax(scores):
    z = scores - scores.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


class GradientBoostingClassifier(BehaviorClassifier):
    def __init__(
        self,
        n_rounds=100,
        learning_rate=0.3,
        max_depth=6,
        reg_lambda=1.0,
        gamma=0.0,
        min_samples_split=2,
        random_state=0,
    ):
        self.n_rounds = n_rounds
        self.learning_rate = learning_rate
        self.max_depth = max_depth
        self.reg_lambda = reg_lambda
        self.gamma = gamma
        self.min_samples_split = min_samples_split
        self.random_state = random_state

    def _fit(self, X, y):
        n = len(y)
        k = self.n_classes_
        onehot = np.zeros((n, k))
        onehot[np.arange(n), y] = 1.0
        scores = np.zeros((n, k))
        lr = float(self.learning_rate)

        feat_parts, thr_parts, left_parts, right_parts, leaf_parts = [], [], [], [], []
        roots = np.zeros((int(self.n_rounds), k), np.int64)
        offset = 0
        for r in range(int(self.n_rounds)):
            p = softmax(scores)
            for c in range(k):
                g = np.ascontiguousarray(p[:, c] - onehot[:, c])
                h = np.ascontiguousarray(p[:, c] * (1.0 - p[:, c]))
                feat, thr, left, right, _, _, leaf = _kernels.grow_tree_second_order(
                    X, g, h,
                    float(self.reg_lambda),
                    float(self.gamma),
                    -1 if self.max_depth is None else int(self.max_depth),
                    int(self.min_samples_split),
                )
                if lr != 0.0:
                    out = scores[:, c].copy()
                    _kernels.trees_add_scalar(
                        X, feat, thr, left, right, leaf,
                        np.zeros(1, np.int64), lr, out,
                    )
                    scores[:, c] = out
                feat_parts.append(feat)
                thr_parts.append(thr)
                left_parts.append(np.where(left >= 0, left + offset, -1))
                right_parts.append(np.where(right >= 0, right + offset, -1))
                leaf_parts.append(leaf)
                roots[r, c] = offset
                offset += len(feat)

        self.node_feature_ = np.concatenate(feat_parts)
        self.node_threshold_ = np.concatenate(thr_parts)
        self.node_left_ = np.concatenate(left_parts)
        self.node_right_ = np.concatenate(right_parts)
        self.node_leaf_value_ = np.concatenate(leaf_parts)
        self.tree_roots_ = roots

    def decision_scores(self, X):
        """Accumulated per-class boosting scores (before the softmax)."""
        X = self._check_predict_input(X)
        scores = np.zeros((X.shape[0], self.n_classes_))
        for c in range(self.n_classes_):
            out = np.zeros(X.shape[0])
            _kernels.trees_add_scalar(
                X,
                self.node_feature_,
                self.node_threshold_,
                self.node_left_,
                self.node_right_,
                self.node_leaf_value_,
                np.ascontiguousarray(self.tree_roots_[:, c]),
                float(self.learning_rate),
                out,
            )
            scores[:, c] = out
        return scores

    def _proba(self, X):
        return softmax(self.decision_scores(X))
