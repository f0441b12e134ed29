import numpy as np
import pytest

from drunkcop import generators as gen
from drunkcop.engine import GameConfig, PolicyFault, _run_batched, monte_carlo, play_game
from drunkcop.policies import CopPolicy, make_policy
from drunkcop.rng import TrialStream, batch_uniforms, trial_keys


def test_scalar_and_batched_streams_agree():
    keys = trial_keys(42, np.arange(5))
    for i in range(5):
        s = TrialStream(42, i)
        draws = [s.random() for _ in range(6)]
        assert draws == [float(batch_uniforms(keys[i:i + 1], k)[0]) for k in range(1, 7)]


def test_uniforms_look_uniform():
    u = batch_uniforms(trial_keys(0, np.arange(200_000)), 1)
    assert u.min() >= 0.0 and u.max() < 1.0
    hist, _ = np.histogram(u, bins=10, range=(0, 1))
    assert np.all(np.abs(hist - 20_000) < 5 * np.sqrt(20_000))


@pytest.mark.parametrize("policy", ["greedy:lex", "greedy:random", "random", "oscillate", "hitting"])
def test_batched_matches_scalar(policy):
    g = gen.random_connected(9, 0.35, seed=4)
    cfg = GameConfig(0, 8)
    pol = make_policy(policy, g, cop_start=0)
    batched = _run_batched(g, pol, cfg, 7, 0, 400)
    scalar = [play_game(g, pol, cfg, TrialStream(7, i)).capture_time for i in range(400)]
    assert batched.tolist() == scalar


def test_worker_count_does_not_change_report():
    g = gen.cycle(30)
    cfg = GameConfig(0, 15)
    one = monte_carlo(g, "smart", cfg, 300, master_seed=5, workers=1)
    two = monte_carlo(g, "smart", cfg, 300, master_seed=5, workers=2)
    assert one.to_dict() == two.to_dict()
    assert one.capture_times.tolist() == two.capture_times.tolist()


def test_seed_changes_results():
    g = gen.cycle(30)
    a = monte_carlo(g, "random", GameConfig(0, 15), 500, master_seed=1)
    b = monte_carlo(g, "random", GameConfig(0, 15), 500, master_seed=2)
    assert a.capture_times.tolist() != b.capture_times.tolist()


def test_same_start_is_immediate_capture():
    rep = monte_carlo(gen.cycle(6), "smart", GameConfig(2, 2), 10)
    assert rep.mean == 0.0 and rep.max == 0


def test_trajectory_is_legal_and_ends_in_capture():
    g = gen.petersen()
    cfg = GameConfig(0, 7)
    rep = monte_carlo(g, "greedy:history", cfg, 50, master_seed=3, record=True)
    for o in rep.outcomes:
        traj = o.trajectory
        assert len(traj) == o.capture_time + 1
        assert traj[0] == (0, 7) and traj[-1][0] == traj[-1][1]
        for (y0, x0), (y1, x1) in zip(traj, traj[1:]):
            assert g.has_edge(y0, y1)
            assert x1 == x0 or g.has_edge(x0, x1)
        lines = o.dump_trajectory().splitlines()
        assert lines[0] == "0 0 7" and len(lines) == len(traj)


def test_mid_move_capture_freezes_drunk():
    # cop adjacent to the drunk on K_2 catches it before it moves
    g = gen.complete(2)
    o = play_game(g, make_policy("greedy", g), GameConfig(0, 1), TrialStream(0, 0), record=True)
    assert o.capture_time == 1 and o.trajectory == [(0, 1), (1, 1)]


def test_idle_rules():
    g = gen.path(4)

    class Stay(CopPolicy):
        name = "stay"

        def decide(self, y, x, u):
            return y

    with pytest.raises(PolicyFault):
        play_game(g, Stay(g), GameConfig(0, 3), TrialStream(0, 0))
    o = play_game(g, Stay(g, cop_may_idle=True), GameConfig(0, 3, cop_may_idle=True), TrialStream(0, 0))
    assert o.capture_time >= 1


def test_truncation_reports_undefined_mean(caplog):
    rep = monte_carlo(gen.path(50), "oscillate", GameConfig(0, 49, move_cap=3), 20)
    assert rep.truncated == 20 and rep.mean is None and rep.stderr is None
    assert "move cap" in caplog.text


def test_trials_csv_round_trip():
    rep = monte_carlo(gen.cycle(8), "random", GameConfig(0, 4), 25, master_seed=9)
    rows = rep.trials_csv().splitlines()
    assert rows[0] == "trial,capture_time"
    assert [int(r.split(",")[1]) for r in rows[1:]] == rep.capture_times.tolist()


def test_summary_statistics():
    rep = monte_carlo(gen.cycle(12), "greedy:random", GameConfig(0, 6), 3000, master_seed=0)
    t = rep.capture_times
    assert rep.mean == pytest.approx(t.mean())
    assert rep.stderr == pytest.approx(t.std(ddof=1) / np.sqrt(len(t)))
    assert sum(b[2] for b in rep.histogram) == 3000
    assert rep.min == t.min() and rep.max == t.max()


def test_stage_means_present_for_smart():
    rep = monte_carlo(gen.cycle(200), "smart:strict", GameConfig(0, 100), 50, master_seed=2, keep_outcomes=True)
    sm = rep.stage_means
    # the drunk may stumble into the cop during stage 1, otherwise stage 1 takes exactly 100 moves
    arrivals = [o for o in rep.outcomes if o.telemetry["stage1_exit"] == "arrival"]
    assert arrivals and all(o.telemetry["stage_times"][0] == 100 for o in arrivals)
    assert sm["T1"] <= 100.0
    assert sm["D1_count"] == len(arrivals)
    total = sum(sm[f"T{i}"] for i in range(1, 5))
    assert total == pytest.approx(rep.mean)


def test_invalid_inputs():
    g = gen.cycle(5)
    with pytest.raises(ValueError):
        monte_carlo(g, "greedy", GameConfig(0, 7), 10)
    with pytest.raises(ValueError):
        monte_carlo(g, "warp", GameConfig(0, 2), 10)
    with pytest.raises(ValueError):
        monte_carlo(g, "greedy", GameConfig(0, 2), 0)
