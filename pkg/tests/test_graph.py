import itertools
import json

import pytest
from hypothesis import given, settings, strategies as st

from gpcsp.bench import exhaustive_level_oracle
from gpcsp.graph import (PlanningGraph, action_mutex, extend_level, fig1_graph, goals_feasible,
                         has_leveled_off, prop_mutex, synthetic_graph)
from gpcsp.model import load_instance

from helpers import make_problem, random_problem


def level_names(level):
    return [a.name for a in level.actions]


def mutex_names(level):
    names = level_names(level)
    return {frozenset((names[i], names[j])) for i, j in level.action_mutex_pairs()}


def test_single_move_level():
    problem = make_problem(["at-A"], ["at-B"], [("move", ["at-A"], ["at-B"], ["at-A"])])
    pg = extend_level(PlanningGraph(problem))
    level = pg.levels[1]
    assert {problem.name_of(p) for p in level.props} == {"at-A", "at-B"}
    assert level_names(level) == ["move", "persist-at-A"]
    assert mutex_names(level) == {frozenset(("move", "persist-at-A"))}


FIG1_MUTEX = {frozenset(p) for p in (("A5", "A9"), ("A6", "A8"), ("A7", "A11"))}


def test_fig1_synthetic_level():
    pg = fig1_graph()
    level = pg.levels[1]
    name = pg.problem.name_of
    assert [name(p) for p in level.props] == ["P1", "P2", "P3", "P4", "P5", "P6"]
    assert mutex_names(level) == FIG1_MUTEX
    assert level.prop_mutex_pairs() == set()
    supporters = {name(p): [a.name for a in level.supporter_actions(p)] for p in level.props}
    assert supporters == {"P1": ["A5"], "P2": ["A6", "A11"], "P3": ["A7"], "P4": ["A8", "A9"],
                          "P5": ["A10"], "P6": ["A10"]}


def test_fig1_strips_encoding_builds_the_same_level():
    problem = load_instance("fig1")
    pg = PlanningGraph(problem)
    pg.extend_to(2)
    level = pg.levels[1]
    assert mutex_names(level) == FIG1_MUTEX
    assert level.prop_mutex_pairs() == set()
    assert pg.goals_feasible(2, problem.goals)
    assert not pg.goals_feasible(1, problem.goals)


def test_no_applicable_actions_levels_off():
    problem = make_problem(["a"], ["b"], [("never", ["c"], ["b"], [])])
    pg = PlanningGraph(problem)
    pg.extend_to(3)
    assert pg.levels[1].props == pg.levels[0].props
    assert pg.leveled_off
    assert has_leveled_off(pg)


def test_persists_never_interfere():
    problem = make_problem(["p", "q"], ["p"], [])
    pg = extend_level(PlanningGraph(problem))
    level = pg.levels[1]
    a, b = level.actions
    assert a.is_persist and b.is_persist
    assert not action_mutex(a, b, pg.levels[0])


def test_competing_needs():
    # x and y are mutex at level 1; actions needing them are mutex at level 2
    problem = make_problem(["s"], ["u", "v"], [
        ("mk-x", ["s"], ["x"], ["s"]),
        ("mk-y", ["s"], ["y"], ["s"]),
        ("use-x", ["x"], ["u"], []),
        ("use-y", ["y"], ["v"], []),
    ])
    pg = PlanningGraph(problem)
    pg.extend_to(2)
    x, y = problem.prop("x"), problem.prop("y")
    assert pg.levels[1].is_prop_mutex(x, y)
    level = pg.levels[2]
    by_name = {a.name: a for a in level.actions}
    ux, uy = by_name["use-x"], by_name["use-y"]
    assert not (ux.action.dele & (uy.action.pre | uy.action.add))
    assert action_mutex(ux, uy, pg.levels[1])
    assert level.is_action_mutex(ux.index, uy.index)


def test_prop_mutex_examples():
    pg = fig1_graph()
    p = pg.problem.prop
    level = pg.levels[1]
    assert not prop_mutex(p("P3"), p("P2"), level)
    assert not prop_mutex(p("P1"), p("P1"), level)
    single = synthetic_graph((), ("a", "b"), [{"actions": [("x", (), ("a",)), ("y", (), ("b",))],
                                                "mutex": [("x", "y")]}])
    q = single.problem.prop
    assert prop_mutex(q("a"), q("b"), single.levels[1])


def test_goals_feasible_examples():
    pg = fig1_graph()
    goals = pg.problem.goals
    assert goals_feasible(pg, 2, goals)
    assert not goals_feasible(pg, 1, goals)
    assert goals_feasible(pg, 2, ())


def test_fig1_graph_has_not_leveled_off():
    assert not has_leveled_off(fig1_graph())


def test_growing_graph_not_leveled_off():
    pg = PlanningGraph(load_instance("gripper", 2))
    pg.extend_to(3)
    assert len(pg.levels[3].props) > len(pg.levels[2].props)
    assert not has_leveled_off(pg)


def test_fixed_graph_cannot_extend():
    with pytest.raises(ValueError):
        fig1_graph().extend()


def test_dump_is_json():
    pg = fig1_graph()
    dumped = pg.dump()
    json.dumps(dumped)
    assert dumped[1]["action_mutex"] == [["A5", "A9"], ["A6", "A8"], ["A7", "A11"]]


def _check_graph(pg):
    for k in range(1, pg.depth + 1):
        prev, level = pg.levels[k - 1], pg.levels[k]
        # monotone growth and persists
        assert set(prev.props) <= set(level.props)
        names = level_names(level)
        for p in prev.props:
            assert f"persist-{pg.problem.name_of(p)}" in names
        # persists come after all regular actions
        flags = [a.is_persist for a in level.actions]
        assert flags == sorted(flags)
        # every prop is supported and props are exactly the union of adds
        assert set(level.props) == {p for a in level.actions for p in a.supports}
        for a in level.actions:
            assert not any(prev.is_prop_mutex(p, q) for p, q in itertools.combinations(a.pre_props, 2))
        # incremental relation equals the rule applied from scratch, symmetrically
        for a, b in itertools.combinations(level.actions, 2):
            expected = action_mutex(a, b, prev)
            assert level.is_action_mutex(a.index, b.index) == expected
            assert level.is_action_mutex(b.index, a.index) == expected
        for p, q in itertools.combinations(level.props, 2):
            expected = prop_mutex(p, q, level)
            assert level.is_prop_mutex(p, q) == expected == level.is_prop_mutex(q, p)


@pytest.mark.parametrize("family, n", [("gripper", 2), ("ferry", 2), ("hanoi", 3), ("tsp", 4)])
def test_incremental_build_matches_rules(family, n):
    pg = PlanningGraph(load_instance(family, n))
    pg.extend_to(4)
    _check_graph(pg)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_graphs_match_rules(seed):
    pg = PlanningGraph(random_problem(seed))
    pg.extend_to(4)
    _check_graph(pg)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_prop_mutexes_are_sound(seed):
    pg = PlanningGraph(random_problem(seed))
    pg.extend_to(3)
    for k in range(1, pg.depth + 1):
        for p, q in pg.levels[k].prop_mutex_pairs():
            assert not exhaustive_level_oracle(pg, k, [p, q])
