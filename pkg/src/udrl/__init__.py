"""Command-conditioned behavior functions for optimal control.

Train any of six learner families to map (state, desired return, desired
horizon) to an action, evaluate them on three native control tasks, and
inspect the tree-based ones through impurity-based feature importances.
"""

from udrl.envs import EnvKind, EnvSpec, StepResult, env_spec, input_feature_names, reset, step
from udrl.evaluation import (
    EvalStats,
    InferenceSpec,
    choose_inference_command,
    evaluate,
    export_training_csv,
)
from udrl.importance import (
    ImportanceVector,
    UnsupportedModelError,
    export_importance_dat,
    global_mdi,
    local_path_importance,
)
from udrl.models import FAMILIES, ModelConfig, make_model
from udrl.persistence import RunManifest, load_model, save_model
from udrl.training import (
    Command,
    Dataset,
    Episode,
    ReplayBuffer,
    TrainingConfig,
    TrainingLog,
    Transition,
    build_training_set,
    collect_episode,
    feature_vector,
    run_training,
    sample_commands,
)

__version__ = "0.1.0"

__all__ = [
    "Command",
    "Dataset",
    "EnvKind",
    "EnvSpec",
    "EvalStats",
    "Episode",
    "FAMILIES",
    "ImportanceVector",
    "InferenceSpec",
    "ModelConfig",
    "ReplayBuffer",
    "RunManifest",
    "StepResult",
    "TrainingConfig",
    "TrainingLog",
    "Transition",
    "UnsupportedModelError",
    "build_training_set",
    "choose_inference_command",
    "collect_episode",
    "env_spec",
    "evaluate",
    "export_importance_dat",
    "export_training_csv",
    "feature_vector",
    "global_mdi",
    "input_feature_names",
    "load_model",
    "local_path_importance",
    "make_model",
    "reset",
    "run_training",
    "sample_commands",
    "save_model",
    "step",
    "__version__",
]
