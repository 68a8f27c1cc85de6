"""Backward search over a planning graph, viewed as a dynamic CSP.

One engine covers every strategy. The behaviours that differ between
strategies are switched by :class:`SearchConfig`:

* conflict-directed backjumping (``ddb``) versus chronological backtracking;
* which goal set is memoized on failure (``memo_generation``) and how memos
  are consulted (``memo_lookup``);
* forward checking, dynamic variable ordering, sticky values and the value
  ordering.

At each level the goals are CSP variables. Their values are the actions at
that level that support them. A level fails with a *conflict set*: the goals
at that level implicated in the failure. The caller regresses that set over
its own action selection to obtain an explanation one level up.
"""

from __future__ import annotations

import logging
import random
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .graph import GraphLevel, LevelAction, PlanningGraph, _bits
from .memostore import Memo, MemoTable
from .model import GroundAction, Problem, PropId

log = logging.getLogger(__name__)

GENERATION_MODES = ("plain", "ebl")
LOOKUP_MODES = ("off", "exact", "subset", "partial")
STICKY_MODES = ("off", "simple", "fold")
VALUE_ORDERS = ("canonical", "noop_first", "random")


class ConfigError(ValueError):
    pass


class SearchAborted(Exception):
    """Raised inside the engine when a limit interrupts the search."""


class BacktrackLimitReached(SearchAborted):
    pass


class SearchTimeout(SearchAborted):
    pass


@dataclass(frozen=True)
class SearchConfig:
    memo_generation: str = "plain"
    memo_lookup: str = "exact"
    ddb: bool = False
    fc: bool = False
    dvo: bool = False
    sticky: str = "off"
    value_order: str = "canonical"
    seed: int = 0
    minimal_action_set: bool = False

    def __post_init__(self):
        if self.memo_generation not in GENERATION_MODES:
            raise ConfigError(f"unknown memo generation {self.memo_generation!r}")
        if self.memo_lookup not in LOOKUP_MODES:
            raise ConfigError(f"unknown memo lookup {self.memo_lookup!r}")
        if self.sticky not in STICKY_MODES:
            raise ConfigError(f"unknown sticky mode {self.sticky!r}")
        if self.value_order not in VALUE_ORDERS:
            raise ConfigError(f"unknown value order {self.value_order!r}")
        if self.sticky != "off" and not self.ddb:
            raise ConfigError("sticky values require ddb")
        if self.memo_generation == "ebl" and self.memo_lookup != "subset":
            raise ConfigError("ebl memo generation requires subset lookup")

    @classmethod
    def preset(cls, strategy: str, **overrides) -> "SearchConfig":
        """The three named strategies; keyword overrides adjust the rest."""
        base = {
            "plain": dict(memo_generation="plain", memo_lookup="exact", ddb=False),
            "ddb": dict(memo_generation="plain", memo_lookup="exact", ddb=True),
            "ebl": dict(memo_generation="ebl", memo_lookup="subset", ddb=True),
        }
        if strategy not in base:
            raise ConfigError(f"unknown strategy {strategy!r}")
        return cls(**{**base[strategy], **overrides})

    @property
    def label(self) -> str:
        if self.memo_generation == "ebl":
            name = "ebl"
        elif self.ddb:
            name = "ddb"
        else:
            name = "plain"
        extras = []
        if self.memo_lookup != {"ebl": "subset"}.get(name, "exact"):
            extras.append(f"memo={self.memo_lookup}")
        if self.fc:
            extras.append("fc")
        if self.dvo:
            extras.append("dvo")
        if self.sticky != "off":
            extras.append(f"sticky={self.sticky}")
        if self.value_order != "canonical":
            extras.append(self.value_order)
        if self.minimal_action_set:
            extras.append("min-action-set")
        return "+".join([name] + extras)


@dataclass
class SearchStats:
    backtracks: int = 0
    interlevel_backtracks: int = 0
    memos_stored: int = 0
    memo_hits: int = 0
    total_memo_length: int = 0
    memo_lookups: int = 0
    assignments: int = 0
    levels_searched: int = 0
    memo_time: float = 0.0
    total_time: float = 0.0

    @property
    def avln(self) -> float:
        return self.total_memo_length / self.memos_stored if self.memos_stored else 0.0

    @property
    def avfm(self) -> float:
        return self.memo_hits / self.memos_stored if self.memos_stored else 0.0

    def copy(self) -> "SearchStats":
        return SearchStats(**self.__dict__)


@dataclass
class Plan:
    """Parallel plan: ``steps[i]`` holds the non-persist actions of level ``i + 1``.

    ``supports`` keeps the full per-level selection (goal -> action name,
    persists included) for inspection.
    """

    steps: list[tuple[GroundAction, ...]]
    supports: list[dict[str, str]] = field(default_factory=list)

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def action_count(self) -> int:
        return sum(len(s) for s in self.steps)

    def describe(self) -> str:
        lines = []
        for i, step in enumerate(self.steps, 1):
            lines.append(f"{i}: {' '.join(a.name for a in step)}".rstrip())
        return "\n".join(lines) + ("\n" if lines else "")


@dataclass(frozen=True)
class Failure:
    conflict: frozenset


class Trace:
    """Line-per-event search log: ``event key=value ...``."""

    def __init__(self, names=None):
        self.lines: list[str] = []
        self._names = names

    def name(self, p: PropId) -> str:
        return self._names(p) if self._names else str(p)

    def fmt_set(self, props: Iterable[PropId]) -> str:
        return "{" + ",".join(self.name(p) for p in sorted(props)) + "}"

    def emit(self, event: str, **fields) -> None:
        parts = [event] + [f"{k.replace('_', '-')}={v}" for k, v in fields.items()]
        self.lines.append(" ".join(parts))

    def events(self, kind: str | None = None) -> list[str]:
        return [ln for ln in self.lines if kind is None or ln.split(" ", 1)[0] == kind]

    def text(self) -> str:
        return "".join(ln + "\n" for ln in self.lines)


# ---------------------------------------------------------------------------
# per-variable operations


@dataclass(eq=False)
class GoalVar:
    """One goal variable of the level currently being assigned.

    ``live_mask`` has a bit for every level-local action index still in the
    live domain; ``full_mask`` is the unpruned supporter set.
    """

    prop: PropId
    level: int
    full_domain: tuple[LevelAction, ...]
    full_mask: int = 0
    live_mask: int = 0
    assignment: LevelAction | None = None
    conflict_set: set = field(default_factory=set)
    pruners: set = field(default_factory=set)
    sticky: LevelAction | None = None

    def __post_init__(self):
        if not self.full_mask:
            for a in self.full_domain:
                self.full_mask |= 1 << a.index
        if not self.live_mask:
            self.live_mask = self.full_mask

    @property
    def live_domain(self) -> list[LevelAction]:
        return [a for a in self.full_domain if self.live_mask >> a.index & 1]


def select_variable(unassigned: Sequence[GoalVar], config: SearchConfig) -> GoalVar:
    """Next variable to assign; ``unassigned`` must be in canonical order."""
    if not unassigned:
        raise ValueError("no unassigned variables")
    if not config.dvo:
        return unassigned[0]
    best = unassigned[0]
    best_size = (best.live_mask if config.fc else best.full_mask).bit_count()
    for v in unassigned[1:]:
        size = (v.live_mask if config.fc else v.full_mask).bit_count()
        if size < best_size:
            best, best_size = v, size
    return best


def order_values(v: GoalVar, config: SearchConfig, rng: random.Random | None = None) -> list[LevelAction]:
    values = v.live_domain
    if config.value_order == "noop_first":
        values = [a for a in values if a.is_persist] + [a for a in values if not a.is_persist]
    elif config.value_order == "random":
        if rng is None:
            raise ValueError("random value order needs an rng")
        rng.shuffle(values)
    s = v.sticky
    if config.sticky != "off" and s is not None and s in values:
        i = values.index(s)
        if config.sticky == "simple":
            values = [s] + values[:i] + values[i + 1:]
        else:
            values = values[i:] + values[:i]
    return values


@dataclass
class Pruning:
    """Undo record of one forward-checking step."""

    by: GoalVar
    removed: list[tuple[GoalVar, int]] = field(default_factory=list)
    wipeout: GoalVar | None = None

    def undo(self) -> None:
        for w, mask in self.removed:
            w.live_mask |= mask
            w.pruners.discard(self.by.prop)
        self.removed.clear()


def forward_check(v: GoalVar, amutex_row: int, future: Iterable[GoalVar]) -> Pruning:
    """Remove values mutex with ``v``'s assignment from every future domain.

    ``amutex_row`` is the action-mutex bit row of the assigned action.
    Stops at the first emptied domain (after recording its pruning, so
    that :meth:`Pruning.undo` restores everything).
    """
    rec = Pruning(v)
    for w in future:
        removed = w.live_mask & amutex_row
        if removed:
            w.live_mask &= ~removed
            w.pruners.add(v.prop)
            rec.removed.append((w, removed))
            if not w.live_mask:
                rec.wipeout = w
                break
    return rec


def regress(cs: Iterable[PropId], selection: dict) -> frozenset:
    """Map a lower-level conflict set to the goals whose actions activated it.

    ``selection`` maps goal -> LevelAction in assignment order. Goals that
    are the unique activator of some member are taken first; remaining
    members already covered add nothing; otherwise the earliest-assigned
    activator is taken.
    """
    order = list(selection)
    members = sorted(cs)
    activators = {}
    for c in members:
        acts = [g for g in order if c in selection[g].pre_props]
        if not acts:
            raise ValueError(f"conflict member {c} is not a precondition of any selected action")
        activators[c] = acts
    chosen = set()
    for c in members:
        if len(activators[c]) == 1:
            chosen.add(activators[c][0])
    for c in members:
        acts = activators[c]
        if not any(g in chosen for g in acts):
            chosen.add(acts[0])
    return frozenset(chosen)


# ---------------------------------------------------------------------------
# the engine


class _LevelState:
    __slots__ = ("k", "level", "vars", "order", "assigned", "holders", "amask")

    def __init__(self, k: int, level: GraphLevel, goal_vars: list[GoalVar]):
        self.k = k
        self.level = level
        self.vars = {v.prop: v for v in goal_vars}
        self.order = goal_vars  # canonical order
        self.assigned: dict[PropId, GoalVar] = {}  # assignment order
        self.holders: dict[int, int] = {}  # action index -> goals using it
        self.amask = 0


class Engine:
    """Backward search over one planning graph.

    The memo table, stats and sticky values live as long as the engine;
    :meth:`reset_epoch` clears per-epoch state for restarts.
    """

    def __init__(self, pg: PlanningGraph, config: SearchConfig, memo: MemoTable | None = None,
                 stats: SearchStats | None = None, rng: random.Random | None = None,
                 trace: Trace | None = None, deadline: float | None = None,
                 backtrack_limit: int | None = None):
        self.pg = pg
        self.config = config
        self.memo = memo if memo is not None else MemoTable(
            "exact" if config.memo_lookup == "off" else config.memo_lookup)
        self.stats = stats if stats is not None else SearchStats()
        self.rng = rng if rng is not None else random.Random(config.seed)
        self.trace = trace
        self.deadline = deadline
        self.backtrack_limit = backtrack_limit
        self.epoch_backtracks = 0
        self.sticky: dict[tuple[int, PropId], LevelAction] = {}
        self._tick = 0

    def reset_epoch(self) -> None:
        self.epoch_backtracks = 0
        self.sticky.clear()

    # -- level entry ------------------------------------------------------

    def find_plan(self, goals: Sequence[PropId], k: int):
        """Plan for ``goals`` at level ``k``: a list of per-level selections or a Failure."""
        if k == 0 or not goals:
            return [None] * k
        tr = self.trace
        key = tuple(sorted(goals))
        cfg = self.config
        if cfg.memo_lookup != "off":
            t0 = time.perf_counter()
            hit = self.memo.lookup(k, key)
            self.stats.memo_time += time.perf_counter() - t0
            self.stats.memo_lookups += 1
            if hit is not None:
                self.stats.memo_hits += 1
                if tr:
                    tr.emit("memo-hit", level=k, goals=tr.fmt_set(key), memo=tr.fmt_set(hit.props))
                return Failure(frozenset(hit.props))

        level = self.pg.levels[k]
        sup = level.supporters
        acts = level.actions
        vars_ = [GoalVar(g, k, tuple(acts[i] for i in sup[g])) for g in goals]
        state = _LevelState(k, level, vars_)
        result = self._assign(state)
        if isinstance(result, Failure):
            stored = tuple(sorted(result.conflict)) if cfg.memo_generation == "ebl" else key
            if cfg.memo_lookup != "off" and self.memo.insert(Memo(k, stored)):
                self.stats.memos_stored += 1
                self.stats.total_memo_length += len(stored)
                if tr:
                    tr.emit("memo-store", level=k, memo=tr.fmt_set(stored))
        return result

    # -- goal assignment ----------------------------------------------------

    def _check_limits(self) -> None:
        self._tick += 1
        if self.deadline is not None and not self._tick & 255 and time.perf_counter() > self.deadline:
            raise SearchTimeout("search deadline exceeded")

    def _assign(self, st: _LevelState):
        unassigned = [v for v in st.order if v.prop not in st.assigned]
        if not unassigned:
            return self._descend(st)
        cfg = self.config
        tr = self.trace
        v = select_variable(unassigned, cfg)
        g = v.prop
        k = st.k
        amutex = st.level.amutex
        v.conflict_set = {g} | v.pruners if cfg.fc else {g}
        cs = v.conflict_set
        v.sticky = self.sticky.get((k, g)) if cfg.sticky != "off" else None
        values = order_values(v, cfg, self.rng)
        if cfg.minimal_action_set:
            covering = [a for a in values if a.index in st.holders]
            if covering:
                values = covering
                for w in st.assigned.values():
                    if w.assignment.index in st.holders and g in w.assignment.supports:
                        cs.add(w.prop)
        name = tr.name if tr else None

        for a in values:
            self._check_limits()
            row = amutex[a.index]
            if row & st.amask:
                culprit = next(w for w in st.assigned.values() if row >> w.assignment.index & 1)
                if cfg.fc:
                    cs |= culprit.conflict_set
                else:
                    cs.add(culprit.prop)
                if tr:
                    tr.emit("reject", level=k, var=name(g), value=a.name, conflict=name(culprit.prop))
                continue
            pruning = None
            if cfg.fc:
                future = [w for w in unassigned if w is not v]
                pruning = forward_check(v, row, future)
                if tr:
                    for w, mask in pruning.removed:
                        for i in _bits(mask):
                            tr.emit("prune", level=k, var=name(w.prop), value=st.level.actions[i].name, by=name(g))
                if pruning.wipeout is not None:
                    w = pruning.wipeout
                    cs.add(w.prop)
                    cs |= w.pruners
                    pruning.undo()
                    if tr:
                        tr.emit("reject", level=k, var=name(g), value=a.name, wipeout=name(w.prop))
                    continue
            # commit
            v.assignment = a
            st.assigned[g] = v
            st.holders[a.index] = st.holders.get(a.index, 0) + 1
            st.amask |= 1 << a.index
            self.stats.assignments += 1
            if tr:
                tr.emit("assign", level=k, var=name(g), value=a.name)

            result = self._assign(st)

            # uncommit
            n = st.holders[a.index] - 1
            if n:
                st.holders[a.index] = n
            else:
                del st.holders[a.index]
                st.amask &= ~(1 << a.index)
            if not isinstance(result, Failure):
                del st.assigned[g]
                v.assignment = None
                if pruning:
                    pruning.undo()
                return result
            conflict = result.conflict
            if not cfg.ddb:
                conflict = conflict | st.assigned.keys()
            del st.assigned[g]
            v.assignment = None
            if pruning:
                pruning.undo()
            if cfg.ddb and g not in conflict:
                if cfg.sticky != "off":
                    self.sticky[(k, g)] = a
                if tr:
                    tr.emit("backjump", level=k, var=name(g), value=a.name, cs=tr.fmt_set(conflict))
                return result if conflict is result.conflict else Failure(frozenset(conflict))
            cs |= conflict
            self.stats.backtracks += 1
            if tr:
                tr.emit("absorb", level=k, var=name(g), value=a.name, cs=tr.fmt_set(cs))

        if tr:
            tr.emit("fail", level=k, var=name(g), cs=tr.fmt_set(cs))
        return Failure(frozenset(cs))

    def _descend(self, st: _LevelState):
        """All goals at this level are assigned: recurse on their preconditions."""
        k = st.k
        tr = self.trace
        selection = {g: v.assignment for g, v in st.assigned.items()}
        chosen = {a.index: a for a in selection.values()}
        subgoals = sorted({p for a in chosen.values() for p in a.pre_props})
        result = self.find_plan(subgoals, k - 1)
        if isinstance(result, Failure):
            if self.backtrack_limit is not None and self.epoch_backtracks >= self.backtrack_limit:
                # this backtrack would exceed the budget: the restart replaces it
                raise BacktrackLimitReached(f"more than {self.backtrack_limit} inter-level backtracks")
            self.stats.interlevel_backtracks += 1
            self.epoch_backtracks += 1
            up = regress(result.conflict, selection)
            if tr:
                tr.emit("regress", level=k, **{"from": tr.fmt_set(result.conflict)}, to=tr.fmt_set(up))
            return Failure(up)
        result.append(selection)
        if tr and k == len(result):
            tr.emit("success", level=k)
        return result


def build_plan(pg: PlanningGraph, selections: list) -> Plan:
    steps = []
    supports = []
    name = pg.problem.name_of
    for sel in selections:
        if sel is None:
            steps.append(())
            supports.append({})
            continue
        acts = {a.name: a.action for a in sel.values() if not a.is_persist}
        steps.append(tuple(acts[n] for n in sorted(acts)))
        supports.append({name(g): a.name for g, a in sorted(sel.items())})
    return Plan(steps, supports)


# ---------------------------------------------------------------------------
# systematic driver


@dataclass
class SearchResult:
    solved: bool
    plan: Plan | None
    stats: SearchStats
    memo: MemoTable
    graph: PlanningGraph
    reason: str = ""

    @property
    def steps(self) -> int:
        return self.plan.length if self.plan else 0


def solve(problem: Problem | PlanningGraph, config: SearchConfig, max_levels: int = 50,
          trace: Trace | None = None, timeout: float | None = None) -> SearchResult:
    """Graphplan's outer loop: grow the graph and search each goal-feasible depth.

    Stops with a plan, at ``max_levels``, on ``timeout`` seconds, or when the
    graph has leveled off and either the goals are infeasible there or the
    number of memos at the level-off depth did not change over a stage.
    A prebuilt graph that cannot be extended is searched up to its depth.
    """
    pg = problem if isinstance(problem, PlanningGraph) else PlanningGraph(problem)
    problem = pg.problem
    stats = SearchStats()
    start = time.perf_counter()
    deadline = start + timeout if timeout is not None else None
    engine = Engine(pg, config, stats=stats, trace=trace, deadline=deadline)
    goals = problem.goals

    def finish(solved, plan=None, reason=""):
        stats.total_time = time.perf_counter() - start
        return SearchResult(solved, plan, stats, engine.memo, pg, reason)

    if trace is not None and trace._names is None:
        trace._names = problem.name_of
    last_count = None
    k = 0
    while k <= max_levels:
        if k > pg.depth:
            if not pg.extensible:
                return finish(False, reason="graph exhausted")
            pg.extend()
        if pg.goals_feasible(k, goals):
            if k == 0:
                return finish(True, Plan([]))
            stats.levels_searched += 1
            log.info("searching level %d (%d backtracks so far)", k, stats.backtracks)
            try:
                result = engine.find_plan(goals, k)
            except SearchTimeout:
                return finish(False, reason="timeout")
            if not isinstance(result, Failure):
                return finish(True, build_plan(pg, result))
            if pg.leveled_off:
                count = engine.memo.count_at(pg.level_off_depth)
                if last_count is not None and count == last_count and config.memo_lookup != "off":
                    return finish(False, reason="unsolvable (memos stable after level-off)")
                last_count = count
        elif pg.leveled_off:
            return finish(False, reason="unsolvable (goals infeasible after level-off)")
        k += 1
    return finish(False, reason="level limit")
