"""Native control environments behind a single pure stepping interface.

Every environment is a set of pure functions of (state, action); the RNG
used for initial states is derived from an explicit seed, so identical
(kind, seed) pairs always produce identical trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from udrl.envs import acrobot, cartpole, lander


class EnvKind(str, Enum):
    CARTPOLE = "cartpole"
    ACROBOT = "acrobot"
    LANDER = "lander"


@dataclass(frozen=True)
class EnvSpec:
    """Static description of one environment."""

    kind: EnvKind
    state_dim: int
    action_count: int
    max_steps: int
    feature_names: tuple[str, ...]


@dataclass(frozen=True)
class StepResult:
    next_state: np.ndarray
    reward: float
    terminal: bool
    truncated: bool


_MODULES = {
    EnvKind.CARTPOLE: cartpole,
    EnvKind.ACROBOT: acrobot,
    EnvKind.LANDER: lander,
}

_SPECS = {
    EnvKind.CARTPOLE: EnvSpec(
        kind=EnvKind.CARTPOLE,
        state_dim=4,
        action_count=2,
        max_steps=200,
        feature_names=("x", "ẋ", "θ", "θ̇"),
    ),
    EnvKind.ACROBOT: EnvSpec(
        kind=EnvKind.ACROBOT,
        state_dim=6,
        action_count=3,
        max_steps=500,
        feature_names=("sin θ1", "cos θ1", "sin θ2", "cos θ2", "θ̇1", "θ̇2"),
    ),
    EnvKind.LANDER: EnvSpec(
        kind=EnvKind.LANDER,
        state_dim=8,
        action_count=4,
        max_steps=400,
        feature_names=("x", "y", "ẋ", "ẏ", "θ", "θ̇", "lc", "rc"),
    ),
}


def env_spec(kind: EnvKind) -> EnvSpec:
    """Static spec (dimensions, horizon, display labels) for one environment."""
    return _SPECS[EnvKind(kind)]


def input_feature_names(kind: EnvKind) -> tuple[str, ...]:
    """State feature labels followed by the two command labels."""
    return env_spec(kind).feature_names + ("d_r", "d_t")


def reset(kind: EnvKind, seed: int) -> np.ndarray:
    """Draw an initial state. Deterministic in (kind, seed)."""
    rng = np.random.default_rng(seed)
    return _MODULES[EnvKind(kind)].reset(rng)


def _check_state(kind: EnvKind, state: np.ndarray) -> np.ndarray:
    state = np.asarray(state, dtype=np.float64)
    expected = env_spec(kind).state_dim
    if state.shape != (expected,):
        raise ValueError(
            f"{EnvKind(kind).value} state must have shape ({expected},), got {state.shape}"
        )
    return state


def step(kind: EnvKind, state: np.ndarray, action: int, step_count: int) -> StepResult:
    """Advance the physics one tick.

    ``step_count`` is the number of steps already taken this episode; the
    result is flagged truncated when this step reaches the horizon.
    """
    kind = EnvKind(kind)
    spec = _SPECS[kind]
    state = _check_state(kind, state)
    action = int(action)
    if not 0 <= action < spec.action_count:
        raise ValueError(
            f"invalid action {action} for {kind.value} (expects 0..{spec.action_count - 1})"
        )
    if step_count >= spec.max_steps:
        raise ValueError(f"episode already at horizon ({spec.max_steps} steps)")
    next_state, reward, terminal = _MODULES[kind].step(state, action)
    truncated = step_count + 1 >= spec.max_steps
    return StepResult(
        next_state=next_state, reward=float(reward), terminal=bool(terminal), truncated=truncated
    )


__all__ = [
    "EnvKind",
    "EnvSpec",
    "StepResult",
    "env_spec",
    "input_feature_names",
    "reset",
    "step",
]
