"""K-nearest-neighbour classifier over z-scored inputs."""

from __future__ import annotations

import numpy as np

from udrl.models.base import BehaviorClassifier


class KNeighborsClassifier(BehaviorClassifier):
    def __init__(self, k=5):
        self.k = k

    def _fit(self, X, y):
        self.feature_means_ = X.mean(axis=0)
        stds = X.std(axis=0)
        stds[stds == 0.0] = 1.0
        self.feature_stds_ = stds
        self._Xz = (X - self.feature_means_) / self.feature_stds_
        self._y = y

    def _proba(self, X):
        Xz = (X - self.feature_means_) / self.feature_stds_
        k_eff = min(int(self.k), len(self._y))
        out = np.empty((X.shape[0], self.n_classes_))
        for i in range(X.shape[0]):
            d2 = ((self._Xz - Xz[i]) ** 2).sum(axis=1)
            # stable sort: equidistant neighbours resolve by training order
            nearest = np.argsort(d2, kind="stable")[:k_eff]
            out[i] = np.bincount(self._y[nearest], minlength=self.n_classes_) / k_eff
        return out
