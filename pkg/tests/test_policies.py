import pytest
from hypothesis import given, settings, strategies as st

from drunkcop import generators as gen
from drunkcop.analysis import hitting_time_matrix
from drunkcop.policies import (FourStage, FourStageState, Greedy, HittingTimeGreedy, Oscillate, RandomCop,
                               candidate_table, four_stage_decide, greedy_decide, hitting_time_greedy_decide,
                               make_policy, oscillate_decide, random_decide)
from test_graph import connected_graphs


@settings(max_examples=50, deadline=None)
@given(connected_graphs(), st.data())
def test_greedy_candidates_are_exactly_the_distance_minimizers(g, data):
    c = data.draw(st.integers(0, g.n - 1))
    d = data.draw(st.integers(0, g.n - 1))
    if c == d:
        return
    best = min(g.dist(w, d) for w in g.neighbors(c))
    want = tuple(w for w in g.neighbors(c) if g.dist(w, d) == best)
    assert Greedy(g, "random").candidates(c, d) == want
    assert Greedy(g, "lex").candidates(c, d) == want[:1]
    # greedy always closes in by one step
    assert best == g.dist(c, d) - 1


def test_greedy_history_prefers_previous_drunk_position():
    g = gen.cycle(8)
    # cop 0, drunk 4: both neighbors 1 and 7 are minimizers
    assert greedy_decide(g, 0, 4, "history", previous=None) == 1
    assert greedy_decide(g, 0, 4, "history", previous=5) == 7
    assert greedy_decide(g, 0, 4, "history", previous=3) == 1
    p = Greedy(g, "history")
    p.reset(0, 3)
    p.decide(0, 3, 0.0)
    assert p.previous == 3
    assert not p.memoryless
    with pytest.raises(TypeError):
        p.candidates(0, 4)


def test_greedy_random_uses_the_draw():
    g = gen.cycle(8)
    assert greedy_decide(g, 0, 4, "random", u=0.1) == 1
    assert greedy_decide(g, 0, 4, "random", u=0.9) == 7


def test_random_cop():
    g = gen.petersen()
    assert RandomCop(g).candidates(0, 5) == g.neighbors(0)
    assert [random_decide(g, 0, u) for u in (0.0, 0.4, 0.99)] == list(g.neighbors(0))


def test_oscillate_bounces_and_returns_home():
    g = gen.path(6)
    assert oscillate_decide(g, 2, 2) == 1
    assert oscillate_decide(g, 2, 1) == 2
    assert oscillate_decide(g, 2, 5) == 4
    assert Oscillate(g, anchor=2).candidates(4, 0) == (3,)


def test_hitting_policy_on_path():
    g = gen.path(5)
    # drunk at 4, cop at 2: the walk from 4 hits 3 before 1
    assert hitting_time_greedy_decide(g, 2, 4) == 3
    h = hitting_time_matrix(g)
    p = HittingTimeGreedy(g, cop_may_idle=True)
    # from 3 with the drunk at 4: stepping to 4 costs H[4,4]=0, strictly better than staying
    assert p.candidates(3, 4) == (4,)
    assert h[4, 3] == pytest.approx(1.0)


def test_hitting_policy_idles_when_strictly_better():
    # K_{2,4} with both players on the small side: the walk from 0 returns to
    # that side every other step, so it reaches 1 sooner than any fixed vertex opposite
    g = gen.complete_bipartite(2, 4)
    h = hitting_time_matrix(g)
    assert h[0, 1] < min(h[0, w] for w in g.neighbors(1))
    assert HittingTimeGreedy(g, cop_may_idle=True).candidates(1, 0) == (1,)
    assert HittingTimeGreedy(g, cop_may_idle=False).candidates(1, 0) == (2,)


def test_candidate_table_shapes():
    g = gen.cycle(5)
    cand, count = candidate_table(Greedy(g, "random"))
    assert cand.shape[:2] == (5, 5)
    assert count[0, 2] == 1 and count[0, 0] == 1
    cand, count = candidate_table(RandomCop(g))
    assert (count[~__import__("numpy").eye(5, dtype=bool)] == 2).all()
    with pytest.raises(TypeError):
        candidate_table(FourStage(g))


def test_make_policy_names():
    g = gen.cycle(6)
    for name in ("oscillate", "random", "greedy", "greedy:lex", "greedy:random", "greedy:history", "hitting",
                 "smart", "smart:strict"):
        assert make_policy(name, g) is not None
    with pytest.raises(ValueError):
        make_policy("teleport", g)
    with pytest.raises(ValueError):
        make_policy("greedy:sideways", g)


def _script(g, early_exit, cop, drunk_positions):
    p = FourStage(g, early_exit=early_exit)
    p.reset(cop, drunk_positions[0])
    y = cop
    for x in drunk_positions:
        assert y != x
        y = p.decide(y, x, 0.0)
    return p.state


def test_four_stage_scripted_block_exit_on_path():
    # drunk runs right for 19 moves, then turns back toward the cop
    g = gen.path(40)
    xs = [10 + (m - 1) if m <= 20 else 29 - (m - 20) for m in range(1, 25)]
    s = _script(g, False, 0, xs)
    assert s.stage_times[:2] == [10, 9]
    assert (s.D1, s.D2) == (9, 9)
    assert s.stage1_exit == "arrival"
    # stage 3 ran one full block (moves 20-23); at move 24 the drunk was within 3
    assert s.stage_times[2] == 4 and s.stage_times[3] == 1
    assert s.stage == 4 and s.stage4_move == 24 and s.early_exit_from is None


def test_four_stage_retargets_every_four_moves():
    g = gen.path(40)
    xs = [10 + (m - 1) for m in range(1, 30)]
    s = FourStageState(target=10)
    y = 0
    targets = []
    for m, x in enumerate(xs, 1):
        y, s = four_stage_decide(g, s, y, x, early_exit=False)
        if s.stage == 3:
            targets.append((m, s.target))
    # stage 3 opens at move 19 aimed at the drunk's spot on arrival, then
    # retargets at moves 20, 24, 28 to wherever the drunk stands at that move
    changes = [(m, t) for (m, t), prev in zip(targets, [(0, None)] + targets) if t != prev[1]]
    assert changes == [(19, 28), (20, 29), (24, 33), (28, 37)]


def test_four_stage_early_exit():
    g = gen.cycle(20)
    s = _script(g, True, 0, [3])
    assert s.stage == 4 and s.stage1_exit == "early" and s.early_exit_from == 1
    s = _script(g, False, 0, [3])
    assert s.stage == 1


def test_four_stage_telemetry_keys():
    p = FourStage(gen.cycle(10))
    p.reset(0, 5)
    tel = p.telemetry()
    assert set(tel) >= {"stage_times", "D1", "D2", "stage1_exit", "stage4_move"}
    assert not p.memoryless
