"""Multi-layer perceptron trained with Adam on softmax cross-entropy.

Three ReLU hidden layers by default. State inputs are z-scored with
statistics recomputed from the data of each training call, so the scaler
tracks the distribution of the growing replay data. The two trailing
command columns (desired return, desired horizon) are instead divided by
fixed constants: their empirical spread shifts throughout training and at
query time commands sit deliberately above anything collected, so a fixed
scale keeps ambitious queries in-range where a z-score would push them far
outside the training distribution. Pass ``command_scales=None`` to z-score
every column when the inputs are not state-plus-command shaped.

Each training call runs a fixed number of minibatch steps sampled with
replacement; the RNG stream persists across calls, making a full training
schedule reproducible from ``random_state``.
"""

from __future__ import annotations

import numpy as np

from udrl.models.base import BehaviorClassifier

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


def log_softmax(logits):
    z = logits - logits.max(axis=1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=1, keepdims=True))


class MLPClassifier(BehaviorClassifier):
    def __init__(
        self,
        hidden_sizes=(64, 64, 64),
        learning_rate=1e-3,
        n_steps=100,
        batch_size=64,
        command_scales=(50.0, 100.0),
        random_state=0,
    ):
        self.hidden_sizes = hidden_sizes
        self.learning_rate = learning_rate
        self.n_steps = n_steps
        self.batch_size = batch_size
        self.command_scales = command_scales
        self.random_state = random_state

    def _set_scaler(self, X):
        means = X.mean(axis=0)
        stds = X.std(axis=0)
        stds[stds == 0.0] = 1.0
        if self.command_scales is not None:
            k = min(len(self.command_scales), X.shape[1])
            means[-k:] = 0.0
            stds[-k:] = self.command_scales[-k:]
        self.feature_means_ = means
        self.feature_stds_ = stds

    def _fit(self, X, y):
        self._rng = np.random.default_rng(self.random_state)
        self._set_scaler(X)

        sizes = [X.shape[1], *self.hidden_sizes, self.n_classes_]
        self.weights_ = []
        self.biases_ = []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            limit = np.sqrt(6.0 / fan_in)  # He-uniform
            self.weights_.append(self._rng.uniform(-limit, limit, size=(fan_in, fan_out)))
            self.biases_.append(np.zeros(fan_out))
        self._adam_m = [np.zeros_like(p) for p in self.weights_ + self.biases_]
        self._adam_v = [np.zeros_like(p) for p in self.weights_ + self.biases_]
        self._adam_t = 0

        self._train(X, y, int(self.n_steps))

    def partial_fit(self, X, y, n_classes=None, n_steps=None):
        """Run more minibatch steps without reinitializing the weights."""
        if not hasattr(self, "weights_") or self.single_class_ is not None:
            return self.fit(X, y, n_classes=n_classes)
        X, y = np.ascontiguousarray(X, dtype=np.float64), np.asarray(y, dtype=np.int64)
        self._set_scaler(X)
        self._train(X, y, int(self.n_steps if n_steps is None else n_steps))
        return self

    def _train(self, X, y, n_steps):
        n = X.shape[0]
        Xz = (X - self.feature_means_) / self.feature_stds_
        for _ in range(n_steps):
            batch = self._rng.integers(0, n, size=int(self.batch_size))
            _, grads = self._loss_and_grads(Xz[batch], y[batch])
            self._adam_step(grads)

    def _adam_step(self, grads):
        self._adam_t += 1
        t = self._adam_t
        lr = float(self.learning_rate)
        params = self.weights_ + self.biases_
        for i, (p, grad) in enumerate(zip(params, grads)):
            m = self._adam_m[i]
            v = self._adam_v[i]
            m *= ADAM_BETA1
            m += (1 - ADAM_BETA1) * grad
            v *= ADAM_BETA2
            v += (1 - ADAM_BETA2) * grad**2
            m_hat = m / (1 - ADAM_BETA1**t)
            v_hat = v / (1 - ADAM_BETA2**t)
            p -= lr * m_hat / (np.sqrt(v_hat) + ADAM_EPS)

    def _forward(self, Xz):
        activations = [Xz]
        h = Xz
        for W, b in zip(self.weights_[:-1], self.biases_[:-1]):
            h = np.maximum(h @ W + b, 0.0)
            activations.append(h)
        logits = h @ self.weights_[-1] + self.biases_[-1]
        return logits, activations

    def _loss_and_grads(self, Xz, y):
        """Mean cross-entropy and gradients, ordered as weights then biases."""
        n = Xz.shape[0]
        logits, activations = self._forward(Xz)
        logp = log_softmax(logits)
        loss = -logp[np.arange(n), y].mean()

        delta = np.exp(logp)
        delta[np.arange(n), y] -= 1.0
        delta /= n

        w_grads = [None] * len(self.weights_)
        b_grads = [None] * len(self.biases_)
        for layer in range(len(self.weights_) - 1, -1, -1):
            w_grads[layer] = activations[layer].T @ delta
            b_grads[layer] = delta.sum(axis=0)
            if layer > 0:
                delta = (delta @ self.weights_[layer].T) * (activations[layer] > 0)
        return loss, w_grads + b_grads

    def loss_and_gradients(self, X, y):
        """Cross-entropy loss and parameter gradients on a raw batch.

        Returns (loss, weight gradients, bias gradients); used by the
        finite-difference checks.
        """
        X = self._check_predict_input(X)
        y = np.asarray(y, dtype=np.int64)
        Xz = (X - self.feature_means_) / self.feature_stds_
        loss, grads = self._loss_and_grads(Xz, y)
        n_w = len(self.weights_)
        return loss, grads[:n_w], grads[n_w:]

    def _proba(self, X):
        Xz = (X - self.feature_means_) / self.feature_stds_
        logits, _ = self._forward(Xz)
        return np.exp(log_softmax(logits))
