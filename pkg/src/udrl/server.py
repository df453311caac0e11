"""HTTP inference service for trained behavior functions.

The server is authoritative for all physics and importance numbers:
clients send commands and step intents, the server owns environment state.
Sessions are isolated; each serializes its own steps behind a lock, and
models are immutable so they are shared freely across sessions.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from udrl.envs import EnvKind, env_spec, input_feature_names, reset, step
from udrl.evaluation import EvalStats, InferenceSpec, evaluate
from udrl.importance import (
    GLOBAL_MDI,
    UnsupportedModelError,
    global_mdi,
    local_path_importance,
)
from udrl.models import BehaviorClassifier, FOREST_FAMILIES
from udrl.persistence import RunManifest, load_model
from udrl.training import Command, feature_vector


@dataclass
class ServedModel:
    model_id: str
    model: BehaviorClassifier
    env: EnvKind
    family: str
    seed: int
    default_command: Command


class ModelRegistry:
    def __init__(self):
        self._models: dict[str, ServedModel] = {}

    def add(self, served: ServedModel) -> None:
        if served.model_id in self._models:
            raise ValueError(f"duplicate model id {served.model_id!r}")
        self._models[served.model_id] = served

    def get(self, model_id: str) -> Optional[ServedModel]:
        return self._models.get(model_id)

    def list(self) -> list[ServedModel]:
        return list(self._models.values())


def build_registry(manifest_dir) -> ModelRegistry:
    """Load every manifest.json under a directory into one registry."""
    root = Path(manifest_dir)
    manifests = sorted(root.rglob("manifest.json"))
    if root.is_file():
        manifests = [root]
    if not manifests:
        raise FileNotFoundError(f"no manifest.json found under {manifest_dir}")
    registry = ModelRegistry()
    for manifest_path in manifests:
        manifest = RunManifest.load(manifest_path)
        for run in manifest.runs:
            model = load_model(manifest_path.parent / run.model_file)
            model_id = f"{manifest.model.family}-{manifest.env.value}-s{run.seed}"
            suffix = 1
            while registry.get(model_id) is not None:
                model_id = f"{manifest.model.family}-{manifest.env.value}-s{run.seed}.{suffix}"
                suffix += 1
            registry.add(
                ServedModel(
                    model_id=model_id,
                    model=model,
                    env=manifest.env,
                    family=manifest.model.family,
                    seed=run.seed,
                    default_command=run.inference_command,
                )
            )
    return registry


@dataclass
class _Session:
    session_id: str
    served: ServedModel
    state: np.ndarray
    d_r: float
    d_t: int
    step_count: int = 0
    total_return: float = 0.0
    terminal: bool = False
    truncated: bool = False
    lock: threading.Lock = field(default_factory=threading.Lock)

    def to_body(self) -> dict:
        return {
            "session_id": self.session_id,
            "model_id": self.served.model_id,
            "env": self.served.env.value,
            "state": [float(v) for v in self.state],
            "command": {"d_r": self.d_r, "d_t": self.d_t},
            "step_count": self.step_count,
            "total_return": self.total_return,
            "terminal": self.terminal,
            "truncated": self.truncated,
        }


class CommandBody(BaseModel):
    d_r: float
    d_t: int


class CreateSessionRequest(BaseModel):
    model_id: str
    d_r: float
    d_t: int
    seed: int = 0


class StepRequest(BaseModel):
    override_command: Optional[CommandBody] = None


class EvalRequest(BaseModel):
    model_id: str
    d_r: float
    d_t: int
    n: int = 100
    seed: int = 0


def create_app(registry: ModelRegistry) -> FastAPI:
    app = FastAPI(title="behavior-function inference service")
    sessions: dict[str, _Session] = {}
    sessions_lock = threading.Lock()

    def get_served(model_id: str) -> ServedModel:
        served = registry.get(model_id)
        if served is None:
            raise HTTPException(status_code=404, detail=f"unknown model {model_id!r}")
        return served

    def get_session(session_id: str) -> _Session:
        with sessions_lock:
            session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return session

    def check_command(d_t: int) -> None:
        if d_t < 1:
            raise HTTPException(status_code=400, detail="d_t must be at least 1")

    @app.get("/models")
    def list_models():
        out = []
        for served in registry.list():
            spec = env_spec(served.env)
            out.append(
                {
                    "model_id": served.model_id,
                    "family": served.family,
                    "env": served.env.value,
                    "seed": served.seed,
                    "state_dim": spec.state_dim,
                    "action_count": spec.action_count,
                    "max_steps": spec.max_steps,
                    "feature_names": list(input_feature_names(served.env)),
                    "default_command": {
                        "d_r": served.default_command.d_r,
                        "d_t": served.default_command.d_t,
                    },
                    "supports_importance": served.family in FOREST_FAMILIES,
                }
            )
        return out

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionRequest):
        served = get_served(body.model_id)
        check_command(body.d_t)
        session = _Session(
            session_id=uuid.uuid4().hex,
            served=served,
            state=reset(served.env, body.seed),
            d_r=body.d_r,
            d_t=body.d_t,
        )
        with sessions_lock:
            sessions[session.session_id] = session
        return session.to_body()

    @app.post("/sessions/{session_id}/step")
    def step_session(session_id: str, body: StepRequest):
        session = get_session(session_id)
        if body.override_command is not None:
            check_command(body.override_command.d_t)
        with session.lock:
            if session.terminal or session.truncated:
                raise HTTPException(status_code=409, detail="session already ended")
            if body.override_command is not None:
                session.d_r = body.override_command.d_r
                session.d_t = body.override_command.d_t

            x = feature_vector(session.state, session.d_r, session.d_t)
            proba = session.served.model.predict_proba(x[None, :])[0]
            action = int(np.argmax(proba))
            result = step(session.served.env, session.state, action, session.step_count)

            session.state = result.next_state
            session.step_count += 1
            session.total_return += result.reward
            session.d_r -= result.reward
            session.d_t = max(session.d_t - 1, 1)
            session.terminal = result.terminal
            session.truncated = result.truncated

            return {
                "action": action,
                "action_probabilities": [float(p) for p in proba],
                "result": {
                    "next_state": [float(v) for v in result.next_state],
                    "reward": result.reward,
                    "terminal": result.terminal,
                    "truncated": result.truncated,
                },
                "session": session.to_body(),
            }

    @app.get("/sessions/{session_id}/importance")
    def session_importance(session_id: str, kind: str = "local"):
        session = get_session(session_id)
        if kind not in ("local", "global"):
            raise HTTPException(status_code=400, detail="kind must be 'local' or 'global'")
        names = input_feature_names(session.served.env)
        try:
            if kind == "global":
                vec = global_mdi(session.served.model, feature_names=names)
            else:
                x = feature_vector(session.state, session.d_r, session.d_t)
                vec = local_path_importance(session.served.model, x, feature_names=names)
        except UnsupportedModelError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return {
            "kind": vec.kind,
            "scores": [float(s) for s in vec.scores],
            "feature_names": list(names),
        }

    @app.get("/sessions/{session_id}")
    def show_session(session_id: str):
        return get_session(session_id).to_body()

    @app.delete("/sessions/{session_id}", status_code=204)
    def delete_session(session_id: str):
        with sessions_lock:
            if session_id not in sessions:
                raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
            del sessions[session_id]

    @app.post("/eval")
    def run_eval(body: EvalRequest):
        served = get_served(body.model_id)
        check_command(body.d_t)
        if body.n < 1:
            raise HTTPException(status_code=400, detail="n must be at least 1")
        spec = InferenceSpec(
            env=served.env,
            command=Command(d_r=body.d_r, d_t=body.d_t),
            n_episodes=body.n,
        )
        stats: EvalStats = evaluate(served.model, spec, seed=body.seed)
        return {
            "mean": stats.mean,
            "std": stats.std,
            "per_episode_returns": stats.per_episode_returns,
        }

    return app
