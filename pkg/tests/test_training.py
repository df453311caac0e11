import numpy as np
import pytest

from udrl.envs import EnvKind, env_spec
from udrl.training import (
    Command,
    Dataset,
    Episode,
    ReplayBuffer,
    TrainingConfig,
    Transition,
    build_training_set,
    collect_episode,
    feature_vector,
    run_training,
    sample_commands,
)
from udrl.models import ModelConfig

from oracles import top_k_by_return


def make_episode(rewards, actions=None, seed=0, state_dim=2):
    actions = actions or [0] * len(rewards)
    transitions = [
        Transition(state=np.full(state_dim, float(i)), action=a, reward=float(r))
        for i, (r, a) in enumerate(zip(rewards, actions))
    ]
    return Episode(transitions=transitions, total_return=float(sum(rewards)), seed=seed)


class CountingStub:
    """Minimal model double that counts queries and returns action 0."""

    def __init__(self):
        self.calls = 0

    def predict(self, X):
        self.calls += 1
        return np.zeros(len(X), dtype=int)


class TestCommand:
    def test_horizon_clamped_to_one(self):
        assert Command(d_r=0.0, d_t=0).d_t == 1
        assert Command(d_r=5.0, d_t=-3).d_t == 1


class TestReplayBuffer:
    def test_evicts_lowest_return(self):
        buf = ReplayBuffer(capacity=2)
        buf.push(make_episode([5]))
        buf.push(make_episode([3]))
        evicted = buf.push(make_episode([4]))
        assert evicted.total_return == 3
        assert sorted(e.total_return for e in buf.episodes) == [4, 5]

    def test_no_eviction_under_capacity(self):
        buf = ReplayBuffer(capacity=3)
        assert buf.push(make_episode([1])) is None
        assert buf.push(make_episode([2])) is None
        assert len(buf) == 2

    def test_tie_evicts_oldest(self):
        buf = ReplayBuffer(capacity=2)
        first = make_episode([1], seed=100)
        second = make_episode([1], seed=200)
        buf.push(first)
        buf.push(second)
        evicted = buf.push(make_episode([9]))
        assert evicted is first

    def test_retention_matches_sort_oracle(self):
        rng = np.random.default_rng(0)
        buf = ReplayBuffer(capacity=700)
        returns = rng.normal(size=1000).round(3)
        for r in returns:
            buf.push(make_episode([r]))
        retained = sorted((e.total_return for e in buf.episodes), reverse=True)
        assert retained == top_k_by_return(returns.tolist(), 700)


class TestSampleCommands:
    def test_single_episode_zero_std(self):
        buf = ReplayBuffer()
        buf.push(make_episode([1.0] * 10))
        cmd = sample_commands(buf, k_best=25, rng=np.random.default_rng(0))
        assert cmd.d_t == 10
        assert cmd.d_r == 10.0

    def test_two_episode_statistics(self):
        buf = ReplayBuffer()
        buf.push(make_episode([0.8] * 10))  # return 8, length 10
        buf.push(make_episode([0.6] * 20))  # return 12, length 20
        rng = np.random.default_rng(1)
        for _ in range(100):
            cmd = sample_commands(buf, k_best=2, rng=rng)
            assert cmd.d_t == 15
            assert 10.0 <= cmd.d_r <= 12.0

    def test_uniform_distribution_of_returns(self):
        from scipy import stats

        buf = ReplayBuffer()
        buf.push(make_episode([8.0]))
        buf.push(make_episode([12.0]))
        rng = np.random.default_rng(2)
        draws = np.array([sample_commands(buf, 2, rng).d_r for _ in range(10000)])
        # mean 10, population std 2: uniform on [10, 12]
        result = stats.kstest(draws, stats.uniform(loc=10.0, scale=2.0).cdf)
        assert result.pvalue > 0.01

    def test_only_best_k_considered(self):
        buf = ReplayBuffer()
        for r in (1.0, 2.0, 50.0):
            buf.push(make_episode([r]))
        cmd = sample_commands(buf, k_best=1, rng=np.random.default_rng(3))
        assert cmd.d_r == 50.0

    def test_empty_buffer_raises(self):
        with pytest.raises(ValueError, match="empty"):
            sample_commands(ReplayBuffer(), 5, np.random.default_rng(0))


class TestCollectEpisode:
    def test_epsilon_one_never_queries_model(self):
        stub = CountingStub()
        rng = np.random.default_rng(0)
        collect_episode(EnvKind.CARTPOLE, stub, Command(200, 200), epsilon=1.0, rng=rng)
        assert stub.calls == 0

    def test_no_model_means_random(self):
        rng = np.random.default_rng(1)
        episode = collect_episode(EnvKind.CARTPOLE, None, Command(200, 200), 0.2, rng)
        assert len(episode) >= 1
        assert abs(episode.total_return - sum(t.reward for t in episode.transitions)) < 1e-9

    def test_command_trace_follows_update_rule(self):
        # rewards are +1 per step: from (5, 3) the model must see commands
        # (5, 3), (4, 2), (3, 1), (2, 1), ...
        seen = []

        class Spy:
            def predict(self, X):
                seen.append((X[0, -2], X[0, -1]))
                return np.array([0])

        rng = np.random.default_rng(2)
        collect_episode(EnvKind.CARTPOLE, Spy(), Command(5, 3), epsilon=0.0, rng=rng)
        assert seen[0] == (5.0, 3.0)
        assert seen[1] == (4.0, 2.0)
        assert seen[2] == (3.0, 1.0)
        assert seen[3] == (2.0, 1.0)  # horizon floors at 1

    def test_horizon_floor(self):
        seen = []

        class Spy:
            def predict(self, X):
                seen.append(X[0, -1])
                return np.array([0])

        rng = np.random.default_rng(3)
        collect_episode(EnvKind.CARTPOLE, Spy(), Command(0, 1), epsilon=0.0, rng=rng)
        assert all(dt == 1.0 for dt in seen)

    def test_episode_reproducible_from_stored_seed(self):
        rng = np.random.default_rng(4)
        episode = collect_episode(EnvKind.CARTPOLE, None, Command(0, 1), 0.0, rng)
        from udrl.envs import reset

        assert np.array_equal(episode.transitions[0].state, reset(EnvKind.CARTPOLE, episode.seed))


class TestBuildTrainingSet:
    def test_trailing_sum_rule(self):
        buf = ReplayBuffer()
        buf.push(make_episode([1.0, 1.0, 1.0], actions=[0, 1, 0]))
        rng = np.random.default_rng(0)
        seen = set()
        for _ in range(200):
            data = build_training_set(buf, 1, rng, n_classes=2)
            d_r, d_t = data.inputs[0, -2], data.inputs[0, -1]
            seen.add((d_r, d_t, int(data.labels[0])))
        assert seen == {(3.0, 3.0, 0), (2.0, 2.0, 1), (1.0, 1.0, 0)}

    def test_labels_match_actions_taken(self):
        buf = ReplayBuffer()
        buf.push(make_episode([1.0, 2.0], actions=[1, 0]))
        rng = np.random.default_rng(1)
        data = build_training_set(buf, 50, rng, n_classes=2)
        for row, label in zip(data.inputs, data.labels):
            t1 = int(row[0])  # states were filled with the step index
            expected = [1, 0][t1]
            assert label == expected

    def test_toy_mdp_trailing_tuples(self):
        # two episodes through the four-state toy process:
        # s0 -a1 r2-> s1 -a3 r-1-> s3  and  s0 -a2 r1-> s2.
        # trailing segments must be exactly
        # (s0, 1, 2, a1), (s1, -1, 1, a3), (s0, 1, 1, a2)
        s0 = np.array([1.0, 0.0, 0.0, 0.0])
        s1 = np.array([0.0, 1.0, 0.0, 0.0])
        ep1 = Episode(
            transitions=[
                Transition(state=s0, action=0, reward=2.0),
                Transition(state=s1, action=2, reward=-1.0),
            ],
            total_return=1.0,
            seed=0,
        )
        ep2 = Episode(
            transitions=[Transition(state=s0, action=1, reward=1.0)],
            total_return=1.0,
            seed=1,
        )
        buf = ReplayBuffer()
        buf.push(ep1)
        buf.push(ep2)
        rng = np.random.default_rng(2)
        produced = set()
        for _ in range(100):
            data = build_training_set(buf, 1, rng, n_classes=3)
            for row, label in zip(data.inputs, data.labels):
                produced.add((int(np.argmax(row[:4])), row[4], row[5], int(label)))
        assert produced == {(0, 1.0, 2.0, 0), (1, -1.0, 1.0, 2), (0, 1.0, 1.0, 1)}

    def test_empty_buffer_raises(self):
        with pytest.raises(ValueError, match="empty"):
            build_training_set(ReplayBuffer(), 1, np.random.default_rng(0), 2)


class TestRunTraining:
    def quick_config(self, **kwargs):
        defaults = dict(
            env=EnvKind.CARTPOLE,
            model=ModelConfig("rf", {"n_trees": 5}),
            n_episodes=12,
            n_warmup_episodes=4,
            seed=3,
        )
        defaults.update(kwargs)
        return TrainingConfig(**defaults)

    def test_log_length_equals_episode_count(self):
        _, log, _ = run_training(self.quick_config())
        assert len(log.records) == 12
        assert [r.index for r in log.records] == list(range(12))

    def test_warmup_records_have_no_command(self):
        _, log, _ = run_training(self.quick_config())
        assert all(r.command is None for r in log.records[:4])
        assert all(r.command is not None for r in log.records[4:])

    def test_deterministic_given_config(self):
        _, log1, _ = run_training(self.quick_config())
        _, log2, _ = run_training(self.quick_config())
        assert log1.returns == log2.returns
        cmds1 = [(r.command.d_r, r.command.d_t) for r in log1.records[4:]]
        cmds2 = [(r.command.d_r, r.command.d_t) for r in log2.records[4:]]
        assert cmds1 == cmds2

    def test_training_inputs_well_formed(self):
        model, _, buffer = run_training(self.quick_config())
        spec = env_spec(EnvKind.CARTPOLE)
        rng = np.random.default_rng(0)
        data = build_training_set(buffer, 2, rng, spec.action_count)
        assert data.inputs.shape[1] == spec.state_dim + 2
        assert (data.labels < spec.action_count).all()
        assert model.n_features_in_ == spec.state_dim + 2

    def test_more_warmup_than_episodes_still_fits(self):
        model, log, _ = run_training(self.quick_config(n_episodes=3, n_warmup_episodes=10))
        assert len(log.records) == 3
        assert hasattr(model, "n_classes_")

    def test_progress_callback_streams_records(self):
        seen = []
        run_training(self.quick_config(), on_episode=seen.append)
        assert len(seen) == 12
        assert seen[0].index == 0

    def test_mlp_updates_incrementally(self):
        cfg = self.quick_config(model=ModelConfig("mlp", {"n_steps": 5}))
        model, log, _ = run_training(cfg)
        assert len(log.records) == 12
        # the adam step counter accumulates across refits instead of being
        # reset, proving the perceptron is updated rather than refit
        assert model._adam_t >= 5 * 8
        assert model._adam_t % 5 == 0


class TestFeatureVector:
    def test_layout(self):
        vec = feature_vector(np.array([1.0, 2.0]), 3.0, 4)
        assert np.array_equal(vec, [1.0, 2.0, 3.0, 4.0])


class TestCurriculumDefaults:
    def test_every_env_covered(self):
        from udrl.training import CURRICULUM_DEFAULTS, default_training_config

        for kind in EnvKind:
            assert kind in CURRICULUM_DEFAULTS
            config = default_training_config(kind, ModelConfig("rf"), seed=0)
            assert config.segments_per_episode == CURRICULUM_DEFAULTS[kind]["segments_per_episode"]
            assert config.k_best == CURRICULUM_DEFAULTS[kind]["k_best"]
            assert config.n_episodes == 500 and config.epsilon == 0.2

    def test_overrides_win(self):
        from udrl.training import default_training_config

        config = default_training_config(
            EnvKind.CARTPOLE, ModelConfig("rf"), seed=1, segments_per_episode=2, n_episodes=10
        )
        assert config.segments_per_episode == 2
        assert config.n_episodes == 10
