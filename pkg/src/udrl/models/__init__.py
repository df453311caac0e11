"""Six interchangeable behavior-function learners behind one interface.

Each family is an sklearn-style estimator: ``fit(X, y, n_classes)``,
``predict_proba``, ``predict``. Defaults mirror the widely documented
library defaults for these algorithms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from udrl.models.adaboost import AdaBoostClassifier
from udrl.models.base import BehaviorClassifier
from udrl.models.forest import ExtraTreesClassifier, RandomForestClassifier
from udrl.models.gbt import GradientBoostingClassifier
from udrl.models.knn import KNeighborsClassifier
from udrl.models.mlp import MLPClassifier
from udrl.models.tree import DecisionTreeClassifier

FAMILIES: dict[str, type[BehaviorClassifier]] = {
    "rf": RandomForestClassifier,
    "et": ExtraTreesClassifier,
    "adaboost": AdaBoostClassifier,
    "gbt": GradientBoostingClassifier,
    "knn": KNeighborsClassifier,
    "mlp": MLPClassifier,
}

FOREST_FAMILIES = ("rf", "et")  # the families that support impurity-based importances

_TYPE_TO_FAMILY = {cls: name for name, cls in FAMILIES.items()}


def family_of(model: BehaviorClassifier) -> str:
    """Family tag for a fitted estimator (e.g. 'rf')."""
    try:
        return _TYPE_TO_FAMILY[type(model)]
    except KeyError:
        raise ValueError(f"unknown model family: {type(model).__name__}") from None


def make_model(family: str, random_state: int = 0, **overrides: Any) -> BehaviorClassifier:
    """Instantiate one learner family with defaults plus overrides."""
    if family not in FAMILIES:
        raise ValueError(f"unknown model family {family!r}; choose from {sorted(FAMILIES)}")
    cls = FAMILIES[family]
    params = dict(overrides)
    if "random_state" in cls().get_params():
        params.setdefault("random_state", random_state)
    return cls(**params)


@dataclass
class ModelConfig:
    """Family selector plus hyperparameter overrides.

    The random state is supplied by the training run that builds the model,
    so one config can be reused across seeds.
    """

    family: str = "rf"
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(
                f"unknown model family {self.family!r}; choose from {sorted(FAMILIES)}"
            )

    def build(self, random_state: int) -> BehaviorClassifier:
        return make_model(self.family, random_state=random_state, **self.params)


__all__ = [
    "AdaBoostClassifier",
    "BehaviorClassifier",
    "DecisionTreeClassifier",
    "ExtraTreesClassifier",
    "FAMILIES",
    "FOREST_FAMILIES",
    "GradientBoostingClassifier",
    "KNeighborsClassifier",
    "MLPClassifier",
    "ModelConfig",
    "RandomForestClassifier",
    "family_of",
    "make_model",
]
