"""Multi-class AdaBoost (SAMME) over depth-1 weighted trees.

Each round fits a stump on the current sample weights, scores it by
weighted misclassification, and reweights the mistakes. Stages vote with
their one-hot prediction scaled by the stage weight alpha.
"""

from __future__ import annotations

import numpy as np

from udrl.models import _kernels
from udrl.models.base import BehaviorClassifier
from udrl.models.tree import TreeArraysMixin

PERFECT_STAGE_ALPHA = 20.0  # cap used when a stump reaches zero error


class AdaBoostClassifier(TreeArraysMixin, BehaviorClassifier):
    def __init__(self, n_stages=50, random_state=0):
        self.n_stages = n_stages
        self.random_state = random_state

    def _fit(self, X, y):
        n = len(y)
        k = self.n_classes_
        weights = np.full(n, 1.0 / n)
        stages = []
        alphas = []

        for _ in range(int(self.n_stages)):
            arrays = _kernels.grow_forest(
                X, y, weights, k, 1, 1, 2, X.shape[1], False, False,
                int(self.random_state),
            )
            pred = _kernels.forest_predict_proba(
                X, arrays[0], arrays[1], arrays[2], arrays[3], arrays[7], arrays[8]
            ).argmax(axis=1)
            miss = pred != y
            err = float(weights[miss].sum())

            if err >= 1.0 - 1.0 / k:
                break  # stage worse than chance: discard it and stop
            if err == 0.0:
                stages.append(arrays)
                alphas.append(PERFECT_STAGE_ALPHA)
                break
            alpha = np.log((1.0 - err) / err) + np.log(k - 1.0)
            stages.append(arrays)
            alphas.append(alpha)
            weights[miss] *= np.exp(alpha)
            weights /= weights.sum()

        self.sample_weights_ = weights
        self.stage_weights_ = np.array(alphas)
        if stages:
            self._store_nodes(_stack_stages(stages))
        else:
            # no stump beat chance; fall back to the class prior
            self._store_nodes(_stack_stages([]))
            self.class_prior_ = np.bincount(y, minlength=k) / n

    def _proba(self, X):
        if len(self.stage_weights_) == 0:
            return np.tile(self.class_prior_, (X.shape[0], 1))
        votes = _kernels.weighted_vote(
            X,
            self.node_feature_,
            self.node_threshold_,
            self.node_left_,
            self.node_right_,
            self.node_value_,
            self.tree_roots_,
            self.stage_weights_,
        )
        return votes / votes.sum(axis=1, keepdims=True)


def _stack_stages(stages):
    """Concatenate per-stage tree arrays, shifting child ids by the offset."""
    if not stages:
        empty_i = np.zeros(0, np.int64)
        empty_f = np.zeros(0, np.float64)
        return (empty_i, empty_f, empty_i.copy(), empty_i.copy(), empty_f.copy(),
                empty_i.copy(), empty_f.copy(), np.zeros((0, 1)), empty_i.copy())
    parts = {i: [] for i in range(9)}
    offset = 0
    for arrays in stages:
        feat, thr, left, right, imp, nsamp, dec, val, roots = arrays
        parts[0].append(feat)
        parts[1].append(thr)
        parts[2].append(np.where(left >= 0, left + offset, -1))
        parts[3].append(np.where(right >= 0, right + offset, -1))
        parts[4].append(imp)
        parts[5].append(nsamp)
        parts[6].append(dec)
        parts[7].append(val)
        parts[8].append(roots + offset)
        offset += len(feat)
    return tuple(np.concatenate(parts[i]) for i in range(9))
