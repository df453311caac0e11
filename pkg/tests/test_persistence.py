import json

import numpy as np
import pytest

from udrl.envs import EnvKind
from udrl.models import ModelConfig, make_model
from udrl.persistence import (
    FORMAT_VERSION,
    ModelFormatError,
    ModelVersionError,
    RunManifest,
    RunRecord,
    UnknownModelFamilyError,
    load_model,
    save_model,
    write_training_log_csv,
)
from udrl.training import Command, EpisodeRecord, TrainingLog


def fitted(family, **overrides):
    rng = np.random.default_rng(0)
    X = rng.normal(size=(120, 6))
    y = ((X[:, 0] > 0).astype(int) + (X[:, 2] > 0.5)).astype(int)
    small = {
        "rf": {"n_trees": 10},
        "et": {"n_trees": 10},
        "adaboost": {"n_stages": 10},
        "gbt": {"n_rounds": 5},
        "knn": {},
        "mlp": {"n_steps": 30},
    }[family]
    small.update(overrides)
    return make_model(family, random_state=1, **small).fit(X, y, n_classes=3), rng


class TestModelRoundTrip:
    @pytest.mark.parametrize("family", ["rf", "et", "adaboost", "gbt", "knn", "mlp"])
    def test_proba_identical_after_round_trip(self, family, tmp_path):
        model, rng = fitted(family)
        path = tmp_path / "model.udrl"
        save_model(model, path)
        loaded = load_model(path)
        queries = rng.normal(size=(100, 6))
        original = model.predict_proba(queries)
        restored = loaded.predict_proba(queries)
        assert np.max(np.abs(original - restored)) < 1e-12

    def test_params_survive(self, tmp_path):
        model, _ = fitted("rf")
        path = tmp_path / "model.udrl"
        save_model(model, path)
        loaded = load_model(path)
        assert loaded.get_params() == model.get_params()

    def test_degenerate_model_round_trip(self, tmp_path):
        X = np.zeros((5, 3))
        model = make_model("gbt").fit(X, np.full(5, 1), n_classes=4)
        path = tmp_path / "model.udrl"
        save_model(model, path)
        loaded = load_model(path)
        assert np.array_equal(loaded.predict_proba(X), model.predict_proba(X))

    def test_unfitted_model_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="not fitted"):
            save_model(make_model("rf"), tmp_path / "model.udrl")


class TestFormatErrors:
    def test_corrupted_magic(self, tmp_path):
        model, _ = fitted("rf")
        path = tmp_path / "model.udrl"
        save_model(model, path)
        blob = bytearray(path.read_bytes())
        blob[:4] = b"JUNK"
        path.write_bytes(blob)
        with pytest.raises(ModelFormatError, match="magic"):
            load_model(path)

    def test_newer_version_names_both(self, tmp_path):
        model, _ = fitted("knn")
        path = tmp_path / "model.udrl"
        save_model(model, path)
        blob = bytearray(path.read_bytes())
        blob[4:6] = (99).to_bytes(2, "big")
        path.write_bytes(blob)
        with pytest.raises(ModelVersionError) as err:
            load_model(path)
        assert "99" in str(err.value)
        assert str(FORMAT_VERSION) in str(err.value)

    def test_unknown_family_tag(self, tmp_path):
        model, _ = fitted("knn")
        path = tmp_path / "model.udrl"
        save_model(model, path)
        blob = bytearray(path.read_bytes())
        # family tag sits after magic+version+length; 'knn' -> 'zzz'
        blob[8:11] = b"zzz"
        path.write_bytes(blob)
        with pytest.raises(UnknownModelFamilyError):
            load_model(path)

    def test_truncated_file(self, tmp_path):
        model, _ = fitted("rf")
        path = tmp_path / "model.udrl"
        save_model(model, path)
        blob = path.read_bytes()
        path.write_bytes(blob[:10])
        with pytest.raises(ModelFormatError, match="truncated"):
            load_model(path)

    def test_truncated_payload(self, tmp_path):
        model, _ = fitted("rf")
        path = tmp_path / "model.udrl"
        save_model(model, path)
        blob = path.read_bytes()
        path.write_bytes(blob[:-200])
        with pytest.raises(ModelFormatError):
            load_model(path)

    def test_no_stray_temp_files_after_save(self, tmp_path):
        model, _ = fitted("rf")
        save_model(model, tmp_path / "model.udrl")
        assert [p.name for p in tmp_path.iterdir()] == ["model.udrl"]


class TestManifest:
    def make_manifest(self):
        return RunManifest(
            env=EnvKind.CARTPOLE,
            model=ModelConfig("rf", {"n_trees": 10}),
            training={"n_episodes": 20, "epsilon": 0.2, "buffer_capacity": 700,
                      "n_warmup_episodes": 5, "k_best": 25,
                      "segments_per_episode": 1, "refit_period": 1},
            seeds=[0, 1],
            runs=[RunRecord(0, "model_seed0.udrl", Command(200.0, 200))],
            artifacts={"training_log": "training_log.csv"},
        )

    def test_round_trip(self, tmp_path):
        manifest = self.make_manifest()
        path = tmp_path / "manifest.json"
        manifest.save(path)
        loaded = RunManifest.load(path)
        assert loaded.env is EnvKind.CARTPOLE
        assert loaded.model.family == "rf"
        assert loaded.model.params == {"n_trees": 10}
        assert loaded.seeds == [0, 1]
        assert loaded.runs[0].inference_command.d_t == 200
        assert loaded.created_at == manifest.created_at

    def test_json_is_human_readable(self, tmp_path):
        path = tmp_path / "manifest.json"
        self.make_manifest().save(path)
        data = json.loads(path.read_text())
        assert data["env"] == "cartpole"
        assert data["model"]["family"] == "rf"

    def test_training_config_reconstruction(self):
        manifest = self.make_manifest()
        config = manifest.training_config(seed=1)
        assert config.n_episodes == 20
        assert config.seed == 1
        assert config.env is EnvKind.CARTPOLE


class TestTrainingLogCsv:
    def test_long_format(self, tmp_path):
        logs = []
        for seed in (0, 1):
            log = TrainingLog(env=EnvKind.CARTPOLE, seed=seed)
            for i in range(3):
                log.records.append(EpisodeRecord(i, float(10 * seed + i), None, 0.2, 0.0))
            logs.append(log)
        path = tmp_path / "log.csv"
        write_training_log_csv(logs, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "episode,seed,return,smoothed_return"
        assert len(lines) == 1 + 6
        assert lines[1].startswith("0,0,0.0,")
        assert lines[4].startswith("0,1,10.0,")
