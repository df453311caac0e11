"""Artifact persistence: versioned model files, run manifests, and the
per-seed training-log CSV.

Model files are self-describing: magic bytes, a format version, the family
tag, a JSON metadata block, and a numpy archive holding the fitted arrays.
Saves are atomic (temp file + rename) so a crash can never leave a
loadable-but-wrong model behind. A loaded model predicts identically to
the saved one; optimizer state and RNG streams are not preserved, so
continuing to train a loaded perceptron restarts its optimizer.

The manifest is human-readable JSON describing one multi-seed training
run: configuration, seeds, per-seed artifacts, and the log-derived
inference command of each seed.
"""

from __future__ import annotations

import io
import json
import os
import struct
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import numpy as np

from udrl.envs import EnvKind
from udrl.models import (
    FAMILIES,
    AdaBoostClassifier,
    BehaviorClassifier,
    GradientBoostingClassifier,
    KNeighborsClassifier,
    MLPClassifier,
    family_of,
    make_model,
)
from udrl.models.tree import TreeArraysMixin
from udrl.training import Command, TrainingConfig, TrainingLog
from udrl.models import ModelConfig

MAGIC = b"UDRL"
FORMAT_VERSION = 1
MANIFEST_VERSION = 1


class ModelFormatError(ValueError):
    """File is not a model file or is corrupted/truncated."""


class ModelVersionError(ValueError):
    """File was written by an unsupported format version."""


class UnknownModelFamilyError(ValueError):
    """File carries a family tag this build does not know."""


_TREE_ARRAY_FIELDS = (
    "node_feature_",
    "node_threshold_",
    "node_left_",
    "node_right_",
    "node_impurity_",
    "node_samples_",
    "node_decrease_",
    "node_value_",
    "tree_roots_",
)


def _pack_arrays(model: BehaviorClassifier) -> dict[str, np.ndarray]:
    if model.single_class_ is not None:
        return {}
    arrays: dict[str, np.ndarray] = {}
    if isinstance(model, AdaBoostClassifier):
        for name in _TREE_ARRAY_FIELDS:
            arrays[name] = getattr(model, name)
        arrays["stage_weights_"] = model.stage_weights_
        arrays["sample_weights_"] = model.sample_weights_
        if hasattr(model, "class_prior_"):
            arrays["class_prior_"] = model.class_prior_
    elif isinstance(model, TreeArraysMixin):
        for name in _TREE_ARRAY_FIELDS:
            arrays[name] = getattr(model, name)
    elif isinstance(model, GradientBoostingClassifier):
        arrays["node_feature_"] = model.node_feature_
        arrays["node_threshold_"] = model.node_threshold_
        arrays["node_left_"] = model.node_left_
        arrays["node_right_"] = model.node_right_
        arrays["node_leaf_value_"] = model.node_leaf_value_
        arrays["tree_roots_"] = model.tree_roots_
    elif isinstance(model, KNeighborsClassifier):
        arrays["feature_means_"] = model.feature_means_
        arrays["feature_stds_"] = model.feature_stds_
        arrays["exemplars_"] = model._Xz
        arrays["labels_"] = model._y
    elif isinstance(model, MLPClassifier):
        arrays["feature_means_"] = model.feature_means_
        arrays["feature_stds_"] = model.feature_stds_
        for i, w in enumerate(model.weights_):
            arrays[f"weight_{i}"] = w
        for i, b in enumerate(model.biases_):
            arrays[f"bias_{i}"] = b
    else:
        raise ValueError(f"cannot serialize {type(model).__name__}")
    return arrays


def _unpack_arrays(model: BehaviorClassifier, arrays: dict[str, np.ndarray]) -> None:
    if model.single_class_ is not None:
        return
    if isinstance(model, AdaBoostClassifier):
        for name in _TREE_ARRAY_FIELDS:
            setattr(model, name, arrays[name])
        model.stage_weights_ = arrays["stage_weights_"]
        model.sample_weights_ = arrays["sample_weights_"]
        if "class_prior_" in arrays:
            model.class_prior_ = arrays["class_prior_"]
    elif isinstance(model, TreeArraysMixin):
        for name in _TREE_ARRAY_FIELDS:
            setattr(model, name, arrays[name])
    elif isinstance(model, GradientBoostingClassifier):
        model.node_feature_ = arrays["node_feature_"]
        model.node_threshold_ = arrays["node_threshold_"]
        model.node_left_ = arrays["node_left_"]
        model.node_right_ = arrays["node_right_"]
        model.node_leaf_value_ = arrays["node_leaf_value_"]
        model.tree_roots_ = arrays["tree_roots_"]
    elif isinstance(model, KNeighborsClassifier):
        model.feature_means_ = arrays["feature_means_"]
        model.feature_stds_ = arrays["feature_stds_"]
        model._Xz = arrays["exemplars_"]
        model._y = arrays["labels_"]
    elif isinstance(model, MLPClassifier):
        model.feature_means_ = arrays["feature_means_"]
        model.feature_stds_ = arrays["feature_stds_"]
        model.weights_ = []
        model.biases_ = []
        i = 0
        while f"weight_{i}" in arrays:
            model.weights_.append(arrays[f"weight_{i}"])
            model.biases_.append(arrays[f"bias_{i}"])
            i += 1
        # fresh optimizer: further training restarts Adam
        model._rng = np.random.default_rng(model.random_state)
        model._adam_m = [np.zeros_like(p) for p in model.weights_ + model.biases_]
        model._adam_v = [np.zeros_like(p) for p in model.weights_ + model.biases_]
        model._adam_t = 0


def _atomic_write(path, payload: bytes) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _jsonable(value):
    if isinstance(value, tuple):
        return list(value)
    if isinstance(value, (np.integer, np.floating)):
        return value.item()
    return value


def save_model(model: BehaviorClassifier, path) -> None:
    """Serialize a fitted model atomically."""
    if not hasattr(model, "n_classes_"):
        raise ValueError("model is not fitted")
    family = family_of(model)
    metadata = {
        "n_classes": model.n_classes_,
        "n_features_in": model.n_features_in_,
        "single_class": model.single_class_,
        "params": {k: _jsonable(v) for k, v in model.get_params().items()},
    }
    buf = io.BytesIO()
    arrays = _pack_arrays(model)
    if not arrays:
        arrays = {"_empty": np.zeros(0)}
    np.savez(buf, **arrays)

    family_bytes = family.encode()
    meta_bytes = json.dumps(metadata, sort_keys=True).encode()
    blob = b"".join(
        [
            MAGIC,
            struct.pack(">H", FORMAT_VERSION),
            struct.pack(">H", len(family_bytes)),
            family_bytes,
            struct.pack(">I", len(meta_bytes)),
            meta_bytes,
            buf.getvalue(),
        ]
    )
    _atomic_write(path, blob)


def load_model(path) -> BehaviorClassifier:
    """Load a model saved by save_model, verifying format and version."""
    with open(path, "rb") as fh:
        blob = fh.read()

    def take(n: int, what: str) -> bytes:
        nonlocal offset
        if offset + n > len(blob):
            raise ModelFormatError(f"{path}: truncated model file (while reading {what})")
        out = blob[offset : offset + n]
        offset += n
        return out

    offset = 0
    if take(4, "magic") != MAGIC:
        raise ModelFormatError(f"{path}: not a model file (bad magic bytes)")
    (version,) = struct.unpack(">H", take(2, "version"))
    if version != FORMAT_VERSION:
        raise ModelVersionError(
            f"{path}: file format version {version}, this build supports {FORMAT_VERSION}"
        )
    (fam_len,) = struct.unpack(">H", take(2, "family length"))
    family = take(fam_len, "family tag").decode()
    if family not in FAMILIES:
        raise UnknownModelFamilyError(f"{path}: unknown model family {family!r}")
    (meta_len,) = struct.unpack(">I", take(4, "metadata length"))
    metadata = json.loads(take(meta_len, "metadata"))

    params = metadata["params"]
    model = make_model(family, **params)
    model.n_classes_ = int(metadata["n_classes"])
    model.n_features_in_ = int(metadata["n_features_in"])
    model.classes_ = np.arange(model.n_classes_)
    model.single_class_ = metadata["single_class"]

    try:
        with np.load(io.BytesIO(blob[offset:])) as payload:
            arrays = {name: payload[name] for name in payload.files}
    except Exception as exc:
        raise ModelFormatError(f"{path}: unreadable model payload ({exc})") from exc
    _unpack_arrays(model, arrays)
    return model


@dataclass
class RunRecord:
    seed: int
    model_file: str
    inference_command: Command


@dataclass
class RunManifest:
    """Everything needed to reuse one multi-seed training run."""

    env: EnvKind
    model: ModelConfig
    training: dict[str, Any]
    seeds: list[int]
    runs: list[RunRecord] = field(default_factory=list)
    artifacts: dict[str, str] = field(default_factory=dict)
    created_at: str = ""

    def __post_init__(self):
        self.env = EnvKind(self.env)
        if not self.created_at:
            self.created_at = datetime.now(timezone.utc).isoformat()

    def training_config(self, seed: int) -> TrainingConfig:
        return TrainingConfig(env=self.env, model=self.model, seed=seed, **self.training)

    def to_dict(self) -> dict:
        return {
            "manifest_version": MANIFEST_VERSION,
            "created_at": self.created_at,
            "env": self.env.value,
            "model": {"family": self.model.family, "params": self.model.params},
            "training": self.training,
            "seeds": self.seeds,
            "runs": [
                {
                    "seed": r.seed,
                    "model_file": r.model_file,
                    "inference_command": {
                        "d_r": r.inference_command.d_r,
                        "d_t": r.inference_command.d_t,
                    },
                }
                for r in self.runs
            ],
            "artifacts": self.artifacts,
        }

    def save(self, path) -> None:
        payload = json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"
        _atomic_write(path, payload.encode())

    @classmethod
    def load(cls, path) -> "RunManifest":
        with open(path) as fh:
            data = json.load(fh)
        manifest = cls(
            env=EnvKind(data["env"]),
            model=ModelConfig(data["model"]["family"], data["model"]["params"]),
            training=data["training"],
            seeds=list(data["seeds"]),
            artifacts=dict(data.get("artifacts", {})),
            created_at=data["created_at"],
        )
        for run in data.get("runs", []):
            manifest.runs.append(
                RunRecord(
                    seed=int(run["seed"]),
                    model_file=run["model_file"],
                    inference_command=Command(
                        d_r=float(run["inference_command"]["d_r"]),
                        d_t=int(run["inference_command"]["d_t"]),
                    ),
                )
            )
        return manifest


def write_training_log_csv(logs: list[TrainingLog], path) -> None:
    """Long-format per-seed log: episode, seed, return, smoothed_return."""
    from udrl.evaluation import smoothed

    lines = ["episode,seed,return,smoothed_return"]
    for log in logs:
        smooth = smoothed(log.returns)
        for record, s in zip(log.records, smooth):
            lines.append(f"{record.index},{log.seed},{record.total_return!r},{s!r}")
    _atomic_write(path, ("\n".join(lines) + "\n").encode())
