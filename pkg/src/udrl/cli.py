"""Command-line entry points: train, eval, importance, serve."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from udrl.envs import EnvKind, env_spec, input_feature_names
from udrl.evaluation import (
    EvalStats,
    InferenceSpec,
    choose_inference_command,
    evaluate,
    export_training_csv,
)
from udrl.importance import (
    UnsupportedModelError,
    export_importance_dat,
    global_mdi,
    local_path_importance,
)
from udrl.models import FAMILIES, ModelConfig
from udrl.persistence import (
    RunManifest,
    RunRecord,
    load_model,
    save_model,
    write_training_log_csv,
)
from udrl.training import (
    Command,
    TrainingConfig,
    collect_episode,
    default_training_config,
    feature_vector,
    run_training,
)

DEFAULT_SEEDS = "0,1,2,3,4"
DEFAULT_ADDR = "127.0.0.1:8000"
ENV_CHOICES = [kind.value for kind in EnvKind]


def _parse_value(raw: str):
    """Best-effort typed parse of a hyperparameter override value."""
    lowered = raw.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    if lowered in ("none", "null"):
        return None
    for cast in (int, float):
        try:
            return cast(raw)
        except ValueError:
            pass
    if "," in raw:
        try:
            return tuple(int(part) for part in raw.split(","))
        except ValueError:
            pass
    return raw


def _parse_model_params(pairs):
    params = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise argparse.ArgumentTypeError(f"--model-param expects NAME=VALUE, got {pair!r}")
        name, raw = pair.split("=", 1)
        params[name.strip()] = _parse_value(raw.strip())
    return params


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="udrl")
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="train behavior functions over several seeds")
    train.add_argument("--env", choices=ENV_CHOICES, required=True)
    train.add_argument("--model", choices=sorted(FAMILIES), required=True)
    train.add_argument("--episodes", type=int, default=500)
    train.add_argument("--seeds", default=DEFAULT_SEEDS, help="comma-separated run seeds")
    train.add_argument("--out", required=True, help="output directory")
    train.add_argument("--epsilon", type=float, default=0.2)
    train.add_argument("--buffer-capacity", type=int, default=700)
    train.add_argument("--warmup", type=int, default=30)
    train.add_argument("--k-best", type=int, default=None,
                       help="elite episodes for command sampling (default: per-task)")
    train.add_argument("--segments", type=int, default=None,
                       help="training segments drawn per episode (default: per-task)")
    train.add_argument("--refit-period", type=int, default=1)
    train.add_argument(
        "--model-param",
        action="append",
        metavar="NAME=VALUE",
        help="hyperparameter override, repeatable (e.g. n_trees=50)",
    )
    train.add_argument("--quiet", action="store_true")

    ev = sub.add_parser("eval", help="greedy inference over a trained manifest")
    ev.add_argument("--manifest", required=True)
    ev.add_argument("--dr", type=float, default=None, help="override desired return")
    ev.add_argument("--dt", type=int, default=None, help="override desired horizon")
    ev.add_argument("--n", type=int, default=100, help="episodes per seed")
    ev.add_argument("--eval-seed", type=int, default=1000)

    imp = sub.add_parser("importance", help="export feature-importance data files")
    imp.add_argument("--manifest", required=True)
    imp.add_argument("--kind", choices=["global", "local"], default="global")
    imp.add_argument("--states", default=None, help="file of states, one per line")
    imp.add_argument("--from-rollout", action="store_true",
                     help="take states from a fresh greedy rollout")
    imp.add_argument("--rollout-states", type=int, default=3)
    imp.add_argument("--seed", type=int, default=None, help="which trained seed to use")
    imp.add_argument("--out", default=None, help="output directory (default: manifest dir)")

    serve = sub.add_parser("serve", help="serve trained models over HTTP")
    serve.add_argument("manifest_dir", help="directory containing manifest.json files")
    serve.add_argument("--addr", default=None, help=f"host:port (default {DEFAULT_ADDR})")

    return parser


def cmd_train(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    seeds = [int(s) for s in args.seeds.split(",") if s.strip() != ""]
    model_config = ModelConfig(args.model, _parse_model_params(args.model_param))
    training_params = {
        "n_episodes": args.episodes,
        "epsilon": args.epsilon,
        "buffer_capacity": args.buffer_capacity,
        "n_warmup_episodes": args.warmup,
        "refit_period": args.refit_period,
    }
    if args.k_best is not None:
        training_params["k_best"] = args.k_best
    if args.segments is not None:
        training_params["segments_per_episode"] = args.segments
    # resolve the per-task curriculum defaults once so the manifest records
    # the exact values the run used
    resolved = default_training_config(
        EnvKind(args.env), model_config, seeds[0], **training_params
    )
    training_params = {
        "n_episodes": resolved.n_episodes,
        "epsilon": resolved.epsilon,
        "buffer_capacity": resolved.buffer_capacity,
        "n_warmup_episodes": resolved.n_warmup_episodes,
        "k_best": resolved.k_best,
        "segments_per_episode": resolved.segments_per_episode,
        "refit_period": resolved.refit_period,
    }
    manifest = RunManifest(
        env=EnvKind(args.env),
        model=model_config,
        training=training_params,
        seeds=seeds,
        artifacts={"training_log": "training_log.csv", "training_curve": "training_curve.csv"},
    )

    logs = []
    for seed in seeds:
        config = TrainingConfig(
            env=manifest.env, model=model_config, seed=seed, **training_params
        )

        def progress(record):
            if not args.quiet and (record.index + 1) % 50 == 0:
                print(
                    f"seed {seed} episode {record.index + 1}/{args.episodes} "
                    f"return {record.total_return:.1f}",
                    flush=True,
                )

        model, log, _ = run_training(config, on_episode=progress)
        logs.append(log)
        model_file = f"model_seed{seed}.udrl"
        save_model(model, out_dir / model_file)
        command = choose_inference_command(log, manifest.env)
        manifest.runs.append(RunRecord(seed=seed, model_file=model_file, inference_command=command))
        manifest.save(out_dir / "manifest.json")
        if not args.quiet:
            mean_recent = np.mean(log.returns[-50:])
            print(f"seed {seed} done: mean return over last 50 episodes {mean_recent:.1f}")

    write_training_log_csv(logs, out_dir / "training_log.csv")
    export_training_csv({args.model: logs}, out_dir / "training_curve.csv")
    if not args.quiet:
        print(f"wrote {out_dir / 'manifest.json'}")
    return 0


def cmd_eval(args) -> int:
    manifest_path = Path(args.manifest)
    manifest = RunManifest.load(manifest_path)
    if (args.dr is None) != (args.dt is None):
        print("error: --dr and --dt must be given together", file=sys.stderr)
        return 1

    pooled: list[float] = []
    for run in manifest.runs:
        model = load_model(manifest_path.parent / run.model_file)
        if args.dr is not None:
            command = Command(d_r=args.dr, d_t=args.dt)
        else:
            command = run.inference_command
        spec = InferenceSpec(env=manifest.env, command=command, n_episodes=args.n)
        stats: EvalStats = evaluate(model, spec, seed=args.eval_seed + run.seed)
        pooled.extend(stats.per_episode_returns)
        print(
            f"seed {run.seed}: {stats.mean:.2f} ± {stats.std:.2f}  "
            f"(command d_r={command.d_r:g}, d_t={command.d_t})"
        )
    overall = EvalStats(per_episode_returns=pooled)
    print(f"pooled: {overall.mean:.2f} ± {overall.std:.2f}  ({len(pooled)} episodes)")
    return 0


def _load_states_file(path, kind: EnvKind, default_command: Command) -> list[np.ndarray]:
    spec = env_spec(kind)
    vectors = []
    for line_no, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip().replace(",", " ")
        if not line or line.startswith("#"):
            continue
        values = np.array([float(v) for v in line.split()])
        if len(values) == spec.state_dim:
            values = feature_vector(values, default_command.d_r, default_command.d_t)
        elif len(values) != spec.state_dim + 2:
            raise ValueError(
                f"{path}:{line_no}: expected {spec.state_dim} or {spec.state_dim + 2} "
                f"values, got {len(values)}"
            )
        vectors.append(values)
    if not vectors:
        raise ValueError(f"{path}: no states found")
    return vectors


def _rollout_states(model, kind: EnvKind, command: Command, n_states: int) -> list[np.ndarray]:
    """Feature vectors actually queried during one greedy rollout, sampled
    evenly from start to finish."""
    rng = np.random.default_rng(0)
    episode = collect_episode(kind, model, command, epsilon=0.0, rng=rng)
    d_r, d_t = command.d_r, command.d_t
    vectors = []
    for transition in episode.transitions:
        vectors.append(feature_vector(transition.state, d_r, d_t))
        d_r -= transition.reward
        d_t = max(d_t - 1, 1)
    picks = np.unique(np.linspace(0, len(vectors) - 1, n_states).round().astype(int))
    return [vectors[i] for i in picks]


def cmd_importance(args) -> int:
    manifest_path = Path(args.manifest)
    manifest = RunManifest.load(manifest_path)
    out_dir = Path(args.out) if args.out else manifest_path.parent
    out_dir.mkdir(parents=True, exist_ok=True)

    runs = {run.seed: run for run in manifest.runs}
    seed = args.seed if args.seed is not None else manifest.runs[0].seed
    if seed not in runs:
        print(f"error: seed {seed} not in manifest (have {sorted(runs)})", file=sys.stderr)
        return 1
    run = runs[seed]
    model = load_model(manifest_path.parent / run.model_file)
    names = input_feature_names(manifest.env)

    try:
        if args.kind == "global":
            vec = global_mdi(model, feature_names=names)
            path = out_dir / "importance_global.dat"
            export_importance_dat(vec, path)
            print(f"wrote {path}")
            return 0

        if args.states:
            vectors = _load_states_file(args.states, manifest.env, run.inference_command)
        elif args.from_rollout:
            vectors = _rollout_states(
                model, manifest.env, run.inference_command, args.rollout_states
            )
        else:
            print("error: local importance needs --states FILE or --from-rollout",
                  file=sys.stderr)
            return 1

        states_path = out_dir / "importance_states.txt"
        with open(states_path, "w") as fh:
            for x in vectors:
                fh.write(" ".join(repr(float(v)) for v in x) + "\n")
        for i, x in enumerate(vectors):
            vec = local_path_importance(model, x, feature_names=names)
            path = out_dir / f"importance_state{i:03d}.dat"
            export_importance_dat(vec, path)
            print(f"wrote {path}")
        print(f"wrote {states_path}")
        return 0
    except UnsupportedModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def cmd_serve(args) -> int:
    import uvicorn

    from udrl.server import build_registry, create_app

    addr = args.addr or os.environ.get("UDRL_ADDR") or DEFAULT_ADDR
    host, _, port = addr.rpartition(":")
    if not host or not port.isdigit():
        print(f"error: --addr expects HOST:PORT, got {addr!r}", file=sys.stderr)
        return 1
    registry = build_registry(args.manifest_dir)
    app = create_app(registry)
    print(f"serving {len(registry.list())} models on http://{host}:{port}")
    uvicorn.run(app, host=host, port=int(port), log_level="warning")
    return 0


_COMMANDS = {
    "train": cmd_train,
    "eval": cmd_eval,
    "importance": cmd_importance,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
