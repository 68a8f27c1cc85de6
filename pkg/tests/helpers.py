"""Shared builders for small hand-made and random STRIPS problems."""

import random

from gpcsp.model import GroundAction, Problem


def make_problem(init, goals, actions, name="hand"):
    """``actions`` is a list of (name, pre, add, del) with proposition names."""
    names = []
    index = {}

    def pid(n):
        if n not in index:
            index[n] = len(names)
            names.append(n)
        return index[n]

    init_ids = frozenset(pid(p) for p in init)
    goal_ids = tuple(dict.fromkeys(pid(g) for g in goals))
    acts = tuple(
        GroundAction(an, frozenset(map(pid, pre)), frozenset(map(pid, add)), frozenset(map(pid, dele)))
        for an, pre, add, dele in actions
    )
    return Problem(name, names, init_ids, goal_ids, acts)


def random_problem(seed, n_props=6, n_actions=6, n_goals=3, min_pre=0, min_del=0):
    """A random STRIPS problem over at most ``n_props`` propositions.

    Raising ``min_pre``/``min_del`` gives more interference and so more search failures.
    """
    rng = random.Random(seed)
    props = [f"p{i}" for i in range(n_props)]
    init = rng.sample(props, rng.randint(1, 2))
    actions = []
    for i in range(n_actions):
        pre = rng.sample(props, rng.randint(min_pre, 2))
        add = rng.sample(props, rng.randint(1, 2))
        rest = [p for p in props if p not in add]
        dele = rng.sample(rest, rng.randint(min(min_del, len(rest)), min(2, len(rest))))
        actions.append((f"a{i}", pre, add, dele))
    goals = rng.sample(props, min(n_goals, n_props))
    return make_problem(init, goals, actions, name=f"random-{seed}")
