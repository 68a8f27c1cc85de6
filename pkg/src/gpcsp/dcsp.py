"""DCSP view of a planning graph, its null-value CSP compilation, and counting bounds."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

from .graph import LevelAction, PlanningGraph
from .model import PropId

BOTTOM = "⊥"


@dataclass(eq=False)
class DcspVariable:
    prop: PropId
    level: int
    domain: tuple[LevelAction, ...]
    active: bool = False

    @property
    def key(self) -> tuple[PropId, int]:
        return (self.prop, self.level)


@dataclass(frozen=True)
class ActionMutexConstraint:
    """not (p = a and q = b), with p and q at the same level."""

    level: int
    p: PropId
    a: str
    q: PropId
    b: str


@dataclass(frozen=True)
class FactMutexConstraint:
    """p and q cannot both be active at ``level``."""

    level: int
    p: PropId
    q: PropId


@dataclass(frozen=True)
class ActivityConstraint:
    """Assigning ``value`` to ``prop``@``level`` activates the listed props at ``level - 1``."""

    level: int
    prop: PropId
    value: str
    activates: tuple[PropId, ...]


@dataclass
class Dcsp:
    graph: PlanningGraph
    k: int
    variables: list[DcspVariable] = field(default_factory=list)
    mutex: list[ActionMutexConstraint] = field(default_factory=list)
    fact_mutex: list[FactMutexConstraint] = field(default_factory=list)
    activity: list[ActivityConstraint] = field(default_factory=list)
    init: tuple[PropId, ...] = ()

    def var_name(self, prop: PropId, level: int) -> str:
        return f"{self.graph.problem.name_of(prop)}@{level}"


def formulate(pg: PlanningGraph, k: int, goals: Iterable[PropId]) -> Dcsp:
    goals = tuple(goals)
    if not pg.goals_feasible(k, goals):
        raise ValueError(f"goals are not feasible at level {k}")
    top = set(goals)
    d = Dcsp(pg, k, init=tuple(sorted(top)))
    for lvl in range(1, k + 1):
        level = pg.levels[lvl]
        for p in level.props:
            d.variables.append(DcspVariable(p, lvl, tuple(level.supporter_actions(p)),
                                            active=(lvl == k and p in top)))
        props = level.props
        for x, p in enumerate(props):
            for q in props[x + 1:]:
                for i in level.supporters[p]:
                    for j in level.supporters[q]:
                        if level.is_action_mutex(i, j):
                            d.mutex.append(ActionMutexConstraint(lvl, p, level.actions[i].name,
                                                                 q, level.actions[j].name))
        for p, q in sorted(level.prop_mutex_pairs()):
            d.fact_mutex.append(FactMutexConstraint(lvl, p, q))
        if lvl >= 2:
            for p in props:
                for a in level.supporter_actions(p):
                    if a.pre_props:
                        d.activity.append(ActivityConstraint(lvl, p, a.name, a.pre_props))
    return d


@dataclass
class CspExport:
    """Standard CSP with a null value ``⊥`` in every domain."""

    variables: list[tuple[str, int, tuple[str, ...]]] = field(default_factory=list)
    records: list[dict] = field(default_factory=list)

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r, ensure_ascii=False, separators=(", ", ": ")) + "\n" for r in self.records)

    def satisfied_by(self, assignment: dict[str, str]) -> bool:
        """Check a total assignment (variable name -> value or ``⊥``) against every constraint."""
        for r in self.records:
            kind = r["kind"]
            if kind == "mutex":
                vp, vq = assignment[r["p"]], assignment[r["q"]]
                if r["a"] is None:
                    if vp != BOTTOM and vq != BOTTOM:
                        return False
                elif vp == r["a"] and vq == r["b"]:
                    return False
            elif kind == "activity":
                if assignment[r["var"]] == r["value"] and any(assignment[v] == BOTTOM for v in r["activates"]):
                    return False
            elif kind == "init":
                if any(assignment[v] == BOTTOM for v in r["active"]):
                    return False
        return True


def compile_to_csp(d: Dcsp) -> CspExport:
    out = CspExport()
    name = d.var_name
    for v in d.variables:
        dom = tuple(a.name for a in v.domain) + (BOTTOM,)
        out.variables.append((name(v.prop, v.level), v.level, dom))
        out.records.append({"kind": "var", "name": name(v.prop, v.level), "level": v.level, "domain": list(dom)})
    for c in d.mutex:
        out.records.append({"kind": "mutex", "p": name(c.p, c.level), "a": c.a, "q": name(c.q, c.level), "b": c.b})
    for c in d.fact_mutex:
        out.records.append({"kind": "mutex", "p": name(c.p, c.level), "a": None, "q": name(c.q, c.level), "b": None})
    for c in d.activity:
        out.records.append({"kind": "activity", "var": name(c.prop, c.level), "value": c.value,
                            "activates": [name(p, c.level - 1) for p in c.activates]})
    if d.variables:
        out.records.append({"kind": "init", "active": [name(p, d.k) for p in d.init]})
    return out


@dataclass(frozen=True)
class CapacityReport:
    n: int
    l: int
    m: int
    d: int
    graphplan_memo_bound: int
    ebl_nogood_bound: int
    pairwise_mutex_bound: int
    value_nogood_bound: int

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.graphplan_memo_bound, self.ebl_nogood_bound,
                self.pairwise_mutex_bound, self.value_nogood_bound)


def memo_capacity_bounds(n: int, l: int, m: int, d: int) -> CapacityReport:
    """Counting bounds for ``n`` propositions over ``l`` levels, ``m`` per level,
    ``d`` supporters per proposition.

    When ``l`` does not divide ``n`` the per-level share is rounded up.
    """
    if min(n, l, m) < 1 or d < 0:
        raise ValueError("n, l, m must be >= 1 and d >= 0")
    return CapacityReport(
        n, l, m, d,
        graphplan_memo_bound=l * 2 ** -(-n // l),
        ebl_nogood_bound=(d + 2) ** n,
        pairwise_mutex_bound=l * m * m,
        value_nogood_bound=l * (m * (d + 1)) ** 2,
    )
