"""Feature-importance scores for the randomized-tree behavior functions.

Two views are produced. The global score aggregates, per tree, every split
node's impurity decrease weighted by the fraction of that tree's samples
reaching it. The local score attributes only the impurity decreases of the
nodes an individual input actually traverses, answering which features
drove this particular decision. Both are averaged over trees and
normalized; both align with the environment features followed by the two
command entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from udrl.models import BehaviorClassifier, ExtraTreesClassifier, RandomForestClassifier
from udrl.models import _kernels

GLOBAL_MDI = "global-mdi"
LOCAL_PATH = "local-path"


class UnsupportedModelError(ValueError):
    """Raised when importances are requested from a non-forest model."""


@dataclass(frozen=True)
class ImportanceVector:
    scores: np.ndarray
    kind: str
    feature_names: Optional[tuple[str, ...]] = None


def _require_forest(model: BehaviorClassifier):
    if not isinstance(model, (RandomForestClassifier, ExtraTreesClassifier)):
        raise UnsupportedModelError(
            f"feature importances need a randomized-tree model, got {type(model).__name__}"
        )
    if not hasattr(model, "n_classes_"):
        raise ValueError("model is not fitted")


def _normalized(scores: np.ndarray) -> np.ndarray:
    total = scores.sum()
    return scores / total if total > 0 else scores


def global_mdi(
    model: BehaviorClassifier, feature_names: Optional[tuple[str, ...]] = None
) -> ImportanceVector:
    """Mean-decrease-impurity importance over the whole forest."""
    _require_forest(model)
    d = model.n_features_in_
    if model.single_class_ is not None:
        return ImportanceVector(np.zeros(d), GLOBAL_MDI, feature_names)
    totals = np.zeros(d)
    n_trees = len(model.tree_roots_)
    for t in range(n_trees):
        start, end = model.tree_node_range(t)
        features = model.node_feature_[start:end]
        internal = features >= 0
        if not internal.any():
            continue
        weight = (
            model.node_samples_[start:end][internal]
            / model.node_samples_[start]
            * model.node_decrease_[start:end][internal]
        )
        np.add.at(totals, features[internal], weight)
    return ImportanceVector(_normalized(totals / n_trees), GLOBAL_MDI, feature_names)


def local_path_importance(
    model: BehaviorClassifier,
    x: np.ndarray,
    feature_names: Optional[tuple[str, ...]] = None,
) -> ImportanceVector:
    """Impurity decreases along the decision paths x takes, per feature."""
    _require_forest(model)
    d = model.n_features_in_
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.shape != (d,):
        raise ValueError(f"expected an input of dimension {d}, got shape {x.shape}")
    if model.single_class_ is not None:
        return ImportanceVector(np.zeros(d), LOCAL_PATH, feature_names)
    scores = _kernels.path_contributions(
        x,
        model.node_feature_,
        model.node_threshold_,
        model.node_left_,
        model.node_right_,
        model.node_decrease_,
        model.tree_roots_,
        d,
    )
    return ImportanceVector(_normalized(scores), LOCAL_PATH, feature_names)


def export_importance_dat(vec: ImportanceVector, path) -> None:
    """Write one 'index value' line per feature, ordered by feature index."""
    with open(path, "w") as fh:
        for i, score in enumerate(vec.scores):
            fh.write(f"{i} {float(score)!r}\n")


def read_importance_dat(path) -> np.ndarray:
    """Parse a file written by export_importance_dat back into scores."""
    scores = []
    with open(path) as fh:
        for line in fh:
            _, value = line.split()
            scores.append(float(value))
    return np.asarray(scores)
