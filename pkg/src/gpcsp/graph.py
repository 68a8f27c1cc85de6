"""Planning-graph construction with persist actions and mutex propagation.

Mutex relations are stored per level as symmetric bit-matrices: row ``i``
is a Python int whose bit ``j`` is set when items ``i`` and ``j`` (level-local
indices) are mutex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .model import GroundAction, Problem, PropId


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(eq=False)
class LevelAction:
    """A ground action placed at one graph level."""

    action: GroundAction
    level: int
    index: int
    pre_props: tuple[PropId, ...]
    supports: tuple[PropId, ...]
    pre_mask: int = 0  # bits over level-1 local prop positions

    @property
    def name(self) -> str:
        return self.action.name

    @property
    def is_persist(self) -> bool:
        return self.action.is_persist

    def __repr__(self) -> str:
        return f"<{self.action.name}@{self.level}>"


@dataclass(eq=False)
class GraphLevel:
    index: int
    props: tuple[PropId, ...]
    actions: list[LevelAction] = field(default_factory=list)
    supporters: dict[PropId, tuple[int, ...]] = field(default_factory=dict)
    amutex: list[int] = field(default_factory=list)
    pmutex: list[int] = field(default_factory=list)
    prop_pos: dict[PropId, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.prop_pos:
            self.prop_pos = {p: i for i, p in enumerate(self.props)}
        if not self.pmutex:
            self.pmutex = [0] * len(self.props)

    def is_action_mutex(self, i: int, j: int) -> bool:
        return bool(self.amutex[i] >> j & 1)

    def is_prop_mutex(self, p: PropId, q: PropId) -> bool:
        pos = self.prop_pos
        return bool(self.pmutex[pos[p]] >> pos[q] & 1)

    def supporter_actions(self, p: PropId) -> list[LevelAction]:
        return [self.actions[i] for i in self.supporters.get(p, ())]

    def action_mutex_pairs(self) -> set[tuple[int, int]]:
        return {(i, j) for i, row in enumerate(self.amutex) for j in _bits(row) if i < j}

    def prop_mutex_pairs(self) -> set[tuple[PropId, PropId]]:
        out = set()
        for i, row in enumerate(self.pmutex):
            for j in _bits(row):
                if i < j:
                    out.add((self.props[i], self.props[j]))
        return out

    def signature(self):
        names = [a.action.name for a in self.actions]
        return (
            frozenset(self.props),
            frozenset((p, frozenset(names[i] for i in s)) for p, s in self.supporters.items()),
            frozenset(frozenset((names[i], names[j])) for i, j in self.action_mutex_pairs()),
            frozenset(self.prop_mutex_pairs()),
        )


class PlanningGraph:
    """Leveled proposition/action structure grown one level at a time.

    ``levels[0]`` holds the initial state; action levels start at 1.
    """

    def __init__(self, problem: Problem):
        self.problem = problem
        self.levels: list[GraphLevel] = [GraphLevel(0, tuple(sorted(problem.init)))]
        self.leveled_off = False
        self.level_off_depth: int | None = None
        self._persists: dict[PropId, GroundAction] = {}
        self._signatures: list = [None]
        self.extensible = True

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def __getitem__(self, k: int) -> GraphLevel:
        return self.levels[k]

    def persist(self, p: PropId) -> GroundAction:
        act = self._persists.get(p)
        if act is None:
            act = GroundAction(f"persist-{self.problem.name_of(p)}", frozenset((p,)), frozenset((p,)), is_persist=True)
            self._persists[p] = act
        return act

    def extend(self) -> GraphLevel:
        if not self.extensible:
            raise ValueError("this graph is fixed and cannot be extended")
        prev = self.levels[-1]
        k = prev.index + 1
        pos = prev.prop_pos
        pmut = prev.pmutex
        admitted: list[tuple[GroundAction, int]] = []
        for ga in self.problem.actions:
            mask = 0
            for p in ga.pre:
                i = pos.get(p)
                if i is None:
                    break
                mask |= 1 << i
            else:
                if any(pmut[i] & mask for i in _bits(mask)):
                    continue
                admitted.append((ga, mask))
        for p in prev.props:
            admitted.append((self.persist(p), 1 << pos[p]))
        level = _build_level(k, prev, admitted)
        self.levels.append(level)
        self._signatures.append(level.signature())
        if not self.leveled_off and k >= 2 and self._signatures[-1] == self._signatures[-2]:
            self.leveled_off = True
            self.level_off_depth = k - 1
        return level

    def extend_to(self, k: int) -> None:
        while self.depth < k:
            self.extend()

    def goals_feasible(self, k: int, goals: Iterable[PropId]) -> bool:
        level = self.levels[k]
        pos = level.prop_pos
        mask = 0
        for g in goals:
            i = pos.get(g)
            if i is None:
                return False
            mask |= 1 << i
        return not any(level.pmutex[i] & mask for i in _bits(mask))

    def dump(self) -> list[dict]:
        """Per-level JSON-ready summary used by ``--dump-graph``."""
        name = self.problem.name_of
        out = []
        for level in self.levels:
            acts = [a.action.name for a in level.actions]
            out.append({
                "level": level.index,
                "props": [name(p) for p in level.props],
                "actions": acts,
                "action_mutex": sorted([acts[i], acts[j]] for i, j in level.action_mutex_pairs()),
                "prop_mutex": sorted([name(p), name(q)] for p, q in level.prop_mutex_pairs()),
            })
        return out


def _build_level(k: int, prev: GraphLevel, admitted: Sequence[tuple[GroundAction, int]], explicit_mutex=None) -> GraphLevel:
    """Assemble level ``k`` from admitted actions (regular actions first, then persists).

    With ``explicit_mutex`` (a set of index pairs) the action-mutex relation is
    taken as given instead of being derived by the interference rules.
    """
    actions = [
        LevelAction(ga, k, i, tuple(sorted(ga.pre)), tuple(sorted(ga.add)), mask)
        for i, (ga, mask) in enumerate(admitted)
    ]
    n = len(actions)
    props = tuple(sorted({p for a in actions for p in a.supports}))
    supporters: dict[PropId, list[int]] = {p: [] for p in props}
    for a in actions:
        for p in a.supports:
            supporters[p].append(a.index)

    amutex = [0] * n
    if explicit_mutex is not None:
        for i, j in explicit_mutex:
            amutex[i] |= 1 << j
            amutex[j] |= 1 << i
    else:
        needs_or_adds: dict[PropId, int] = {}
        deleters: dict[PropId, int] = {}
        pre_users = [0] * len(prev.props)
        for a in actions:
            bit = 1 << a.index
            ga = a.action
            for p in ga.pre | ga.add:
                needs_or_adds[p] = needs_or_adds.get(p, 0) | bit
            for p in ga.dele:
                deleters[p] = deleters.get(p, 0) | bit
            for i in _bits(a.pre_mask):
                pre_users[i] |= bit
        pmut = prev.pmutex
        for a in actions:
            ga = a.action
            row = 0
            for p in ga.dele:
                row |= needs_or_adds.get(p, 0)
            for p in ga.pre | ga.add:
                row |= deleters.get(p, 0)
            forbidden = 0
            for i in _bits(a.pre_mask):
                forbidden |= pmut[i]
            for i in _bits(forbidden):
                row |= pre_users[i]
            amutex[a.index] = row & ~(1 << a.index)

    level = GraphLevel(k, props, actions, {p: tuple(s) for p, s in supporters.items()}, amutex)
    level.pmutex = _prop_mutexes(level)
    return level


def _prop_mutexes(level: GraphLevel) -> list[int]:
    props = level.props
    amutex = level.amutex
    supmask = []
    common = []
    for p in props:
        m = 0
        allm = -1
        for i in level.supporters[p]:
            m |= 1 << i
            allm &= amutex[i]
        supmask.append(m)
        common.append(allm)
    rows = [0] * len(props)
    for i in range(len(props)):
        for j in range(i + 1, len(props)):
            if supmask[j] & ~common[i] == 0:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
    return rows


# ---------------------------------------------------------------------------
# rule-level operations (reference semantics, used as oracles in tests)


def extend_level(pg: PlanningGraph) -> PlanningGraph:
    pg.extend()
    return pg


def action_mutex(a: LevelAction, b: LevelAction, prev: GraphLevel) -> bool:
    """Interference or competing needs, computed from scratch."""
    x, y = a.action, b.action
    if x.dele & (y.pre | y.add) or y.dele & (x.pre | x.add):
        return True
    return any(prev.is_prop_mutex(p, q) for p in a.pre_props for q in b.pre_props if p != q)


def prop_mutex(p: PropId, q: PropId, level: GraphLevel) -> bool:
    if p == q:
        return False
    sp, sq = level.supporters[p], level.supporters[q]
    return all(level.is_action_mutex(i, j) for i in sp for j in sq)


def goals_feasible(pg: PlanningGraph, k: int, goals: Iterable[PropId]) -> bool:
    return pg.goals_feasible(k, goals)


def has_leveled_off(pg: PlanningGraph) -> bool:
    if pg.depth < 2:
        return False
    return pg._signatures[-1] == pg._signatures[-2]


# ---------------------------------------------------------------------------
# hand-built graphs


def synthetic_graph(init: Sequence[str], goals: Sequence[str], levels: Sequence[dict], name: str = "synthetic") -> PlanningGraph:
    """Build a graph level by level from explicit action lists and mutex pairs.

    Each entry of ``levels`` is ``{"actions": [(name, pre, add), ...],
    "mutex": [(name_a, name_b), ...]}``. No persist actions are added and
    action mutexes are exactly the listed pairs; proposition mutexes follow
    from the supporter rule.
    """
    prop_names: list[str] = []
    index: dict[str, int] = {}

    def intern(n: str) -> int:
        if n not in index:
            index[n] = len(prop_names)
            prop_names.append(n)
        return index[n]

    init_ids = [intern(p) for p in init]
    goal_ids = [intern(g) for g in goals]
    specs = []
    for spec in levels:
        acts = [GroundAction(an, frozenset(intern(p) for p in pre), frozenset(intern(p) for p in add))
                for an, pre, add in spec["actions"]]
        specs.append((acts, spec.get("mutex", ())))
    all_actions = tuple(a for acts, _ in specs for a in acts)
    problem = Problem(name, prop_names, frozenset(init_ids), tuple(goal_ids), all_actions)
    pg = PlanningGraph(problem)
    for acts, mutex in specs:
        prev = pg.levels[-1]
        admitted = []
        for ga in acts:
            missing = [problem.name_of(p) for p in ga.pre if p not in prev.prop_pos]
            if missing:
                raise ValueError(f"{ga.name}: preconditions {missing} absent at level {prev.index}")
            admitted.append((ga, sum(1 << prev.prop_pos[p] for p in ga.pre)))
        pos = {ga.name: i for i, (ga, _) in enumerate(admitted)}
        pairs = [(pos[x], pos[y]) for x, y in mutex]
        level = _build_level(prev.index + 1, prev, admitted, explicit_mutex=pairs)
        pg.levels.append(level)
        pg._signatures.append(level.signature())
    pg.extensible = False
    return pg


def fig1_graph() -> PlanningGraph:
    """The four-goal worked example graph (goals G1..G4 over P1..P6), fixed by hand."""
    return synthetic_graph(
        init=(),
        goals=("G1", "G2", "G3", "G4"),
        levels=[
            {
                "actions": [
                    ("A5", (), ("P1",)),
                    ("A6", (), ("P2",)),
                    ("A7", (), ("P3",)),
                    ("A8", (), ("P4",)),
                    ("A9", (), ("P4",)),
                    ("A10", (), ("P5", "P6")),
                    ("A11", (), ("P2",)),
                ],
                "mutex": [("A5", "A9"), ("A6", "A8"), ("A7", "A11")],
            },
            {
                "actions": [
                    ("A1", ("P1", "P2", "P3"), ("G1",)),
                    ("A2", ("P4",), ("G2",)),
                    ("A3", ("P5",), ("G3",)),
                    ("A4", ("P1", "P6"), ("G4",)),
                ],
            },
        ],
        name="fig1",
    )
