import json
import math
from fractions import Fraction

import pytest

from drunkcop import generators as gen
from drunkcop import lemmas
from drunkcop.engine import GameConfig, monte_carlo
from test_analysis import _walk_enumeration


def test_bounds():
    assert lemmas.keylemma_bound(1, 0) == 1.0
    assert lemmas.keylemma_bound(10, 4) == pytest.approx(1 + 2 * math.sqrt(1 + 5 * math.log(10)))
    assert lemmas.four_lemma_bound(8) == pytest.approx(1 / 16)
    assert lemmas.LOG_CONVENTION == "natural"


@pytest.mark.parametrize("g", [gen.petersen(), gen.funnel(10), gen.lollipop(20)], ids=lambda g: g.name)
def test_four_step_prob_matches_enumeration(g):
    for x0 in range(g.n):
        ref = sum(p for v, p in enumerate(_walk_enumeration(g, x0, 4)) if g.dist(x0, v) < 4)
        assert lemmas.four_step_prob(g, x0) == pytest.approx(float(ref), abs=1e-14)


@pytest.mark.parametrize("n", [10, 50, 100])
def test_three_step_funnel_rational(n):
    # the only ways back within distance 2 in three steps go through the single bridge
    g = gen.funnel(n)
    half = Fraction(2, n)
    assert lemmas.three_step_prob(g, 0) == pytest.approx(float(half + (1 - half) * half), abs=1e-15)


def test_three_step_check_passes():
    rep = lemmas.three_step_check()
    assert rep.passed and rep.details["matches_formula"]
    assert all(v["prob"] < v["four_over_n"] for v in rep.details["values"].values())


def test_four_lemma_small():
    rep = lemmas.four_lemma_check(n_max=5)
    assert rep.passed and rep.checked == 1 + 1 + 4 + 38 + 728 - 1
    assert rep.worst_margin > 0


def test_four_lemma_parallel_matches_serial():
    a = lemmas.four_lemma_check(n_max=5, workers=1)
    b = lemmas.four_lemma_check(n_max=5, workers=2)
    assert (a.worst_margin, a.checked) == (b.worst_margin, b.checked)


def test_diam_delta_equality_on_paths():
    rep = lemmas.diam_delta_check(n_max=5, graphs=[gen.path(30), gen.petersen()])
    assert rep.passed and rep.worst_margin == 0
    assert rep.details["equality_on_paths"]
    assert rep.details["equality_cases"] > 0


def test_vc_and_keylemma_small_suite():
    vc, key = lemmas.vc_keylemma_suite(n_exhaustive=4, t_exhaustive=8, random_count=5, random_n_max=9)
    assert vc.passed and key.passed
    assert key.worst_margin > 0


def test_single_graph_checks():
    g = gen.lollipop(30)
    assert lemmas.vc_bound_check(g, 12).passed
    assert lemmas.expected_distance_check(g, 9).passed


def test_regular_bound_on_cycle_is_tight():
    rep = lemmas.regular_greedy_bound_check(gen.cycle(6))
    assert rep.passed
    assert rep.details["max_expected"] == pytest.approx(3.0, abs=1e-9)
    with pytest.raises(ValueError):
        lemmas.regular_greedy_bound_check(gen.path(5))


def test_tree_bound_small():
    rep = lemmas.tree_bound_check(count=20, n_max=9, seed=4)
    assert rep.passed and rep.checked == 20


def test_failure_produces_counterexample():
    rep = lemmas._report("demo", "toy", -0.5, 3, {"where": 1})
    assert not rep.passed and rep.counterexample == {"where": 1}
    doc = json.loads(rep.to_json())
    assert doc["passed"] is False and doc["details"]["log"] == "natural"
    assert rep.line().startswith("[FAIL]")


def test_stage_telemetry_on_cycle():
    g = gen.cycle(200)
    rep = monte_carlo(g, "smart", GameConfig(0, 100), 200, master_seed=8, record=True)
    check = lemmas.stage_telemetry_check(g, rep.outcomes, 0, 100)
    assert check.passed and check.details["arrivals"] > 0


def test_stage_telemetry_detects_violation():
    g = gen.cycle(200)
    rep = monte_carlo(g, "smart", GameConfig(0, 100), 5, master_seed=8, record=True)
    o = rep.outcomes[0]
    o.telemetry = dict(o.telemetry, stage1_exit="arrival", stage_times=[99] + o.telemetry["stage_times"][1:])
    assert not lemmas.stage_telemetry_check(g, rep.outcomes, 0, 100).passed


def test_stage_distance_check():
    g = gen.cycle(200)
    rep = monte_carlo(g, "smart:strict", GameConfig(0, 100), 200, master_seed=1)
    assert lemmas.stage_distance_check(rep, g.n).passed


def test_family_instances_all_connected():
    for g in lemmas.family_instances():
        assert g.diameter + g.max_degree <= g.n + 1
