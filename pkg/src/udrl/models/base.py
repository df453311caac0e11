"""Shared estimator plumbing for the behavior-function learners.

All six families implement the same contract: ``fit(X, y, n_classes)``
trains from scratch, ``predict_proba`` returns a row-stochastic matrix of
length ``n_classes_`` per input, and ``predict`` takes the argmax with ties
broken toward the lowest action index. Estimators subclass sklearn's
``BaseEstimator`` so they pick up ``get_params``/``set_params``/``clone``
and compose with the wider ecosystem; the learning algorithms themselves
are implemented in this package.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin


def check_X_y(X, y):
    """Validate a training set: 2-D float inputs, integer labels."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2:
        raise ValueError(f"X must be 2-D, got shape {X.shape}")
    if X.shape[0] == 0:
        raise ValueError("cannot fit on an empty dataset")
    if y.shape != (X.shape[0],):
        raise ValueError(f"y must have shape ({X.shape[0]},), got {y.shape}")
    if y.min() < 0:
        raise ValueError("labels must be non-negative action indices")
    return X, y


class BehaviorClassifier(BaseEstimator, ClassifierMixin):
    """Base class: validation, degenerate single-class handling, predict."""

    def fit(self, X, y, n_classes=None):
        X, y = check_X_y(X, y)
        if n_classes is None:
            n_classes = int(y.max()) + 1
        elif y.max() >= n_classes:
            raise ValueError(f"label {y.max()} out of range for {n_classes} classes")
        self.n_classes_ = int(n_classes)
        self.n_features_in_ = X.shape[1]
        self.classes_ = np.arange(self.n_classes_)
        # a one-class dataset yields a constant model with probability 1
        labels = np.unique(y)
        self.single_class_ = int(labels[0]) if labels.size == 1 else None
        if self.single_class_ is None:
            self._fit(X, y)
        return self

    def _fit(self, X, y):
        raise NotImplementedError

    def _proba(self, X):
        raise NotImplementedError

    def _check_predict_input(self, X):
        if not hasattr(self, "n_classes_"):
            raise ValueError(f"{type(self).__name__} is not fitted")
        X = np.ascontiguousarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"expected inputs of dimension {self.n_features_in_}, got shape {X.shape}"
            )
        return X

    def predict_proba(self, X):
        X = self._check_predict_input(X)
        if self.single_class_ is not None:
            out = np.zeros((X.shape[0], self.n_classes_))
            out[:, self.single_class_] = 1.0
            return out
        return self._proba(X)

    def predict(self, X):
        # np.argmax returns the first maximum: ties go to the lowest index
        return np.argmax(self.predict_proba(X), axis=1)
