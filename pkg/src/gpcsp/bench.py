"""Plan validation, brute-force oracles and the benchmark suite runner."""

from __future__ import annotations

import csv
import io
import itertools
from collections import deque
from dataclasses import asdict, dataclass, fields
from typing import Iterable, Sequence

from .graph import PlanningGraph, fig1_graph
from .model import FAMILIES, GroundAction, Problem, PropId, load_instance
from .restart import RestartPolicy, run_with_restarts
from .search import Plan, SearchConfig, solve

ORACLE_LIMIT = 10 ** 7


class OracleTooLarge(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# validation


def _interferes(x: GroundAction, y: GroundAction) -> bool:
    return bool(x.dele & (y.pre | y.add) or y.dele & (x.pre | x.add))


def validate_plan(problem: Problem, plan: Plan | Sequence[Iterable[GroundAction]]) -> str | None:
    """None if ``plan`` is executable and reaches the goals, else the first violation."""
    steps = plan.steps if isinstance(plan, Plan) else plan
    state = set(problem.init)
    name = problem.name_of
    for i, step in enumerate(steps, 1):
        step = list(step)
        for a in step:
            missing = a.pre - state
            if missing:
                return f"step {i}: {a.name} lacks {', '.join(sorted(map(name, missing)))}"
        for a, b in itertools.combinations(step, 2):
            if _interferes(a, b):
                return f"step {i}: {a.name} interferes with {b.name}"
        dele = set().union(*(a.dele for a in step)) if step else set()
        add = set().union(*(a.add for a in step)) if step else set()
        state = (state - dele) | add
    unmet = set(problem.goals) - state
    if unmet:
        return f"goals not reached: {', '.join(sorted(map(name, unmet)))}"
    return None


# ---------------------------------------------------------------------------
# oracles


def exhaustive_level_oracle(pg: PlanningGraph, k: int, goals: Iterable[PropId]) -> bool:
    """Is there any mutex-free selection of supporters achieving ``goals`` at level ``k``?

    Enumerates every combination of supporters level by level. Raises
    :class:`OracleTooLarge` when a level's combination count exceeds 10^7.
    """
    cache: dict[tuple[int, frozenset], bool] = {}

    def solvable(k: int, goals: frozenset) -> bool:
        if not goals:
            return True
        if k == 0:
            return goals <= pg.levels[0].prop_pos.keys()
        key = (k, goals)
        if key in cache:
            return cache[key]
        level = pg.levels[k]
        if any(g not in level.prop_pos for g in goals):
            cache[key] = False
            return False
        ordered = sorted(goals)
        domains = [level.supporters[g] for g in ordered]
        size = 1
        for d in domains:
            size *= len(d)
        if size > ORACLE_LIMIT:
            raise OracleTooLarge(f"{size} combinations at level {k}")
        ok = False
        for combo in itertools.product(*domains):
            chosen = set(combo)
            if any(level.is_action_mutex(i, j) for i, j in itertools.combinations(chosen, 2)):
                continue
            sub = frozenset(p for i in chosen for p in level.actions[i].pre_props)
            if solvable(k - 1, sub):
                ok = True
                break
        cache[key] = ok
        return ok

    return solvable(k, frozenset(goals))


def parallel_bfs_oracle(problem: Problem, max_steps: int = 20, max_states: int = 200_000) -> int | None:
    """Fewest parallel steps reaching the goals by breadth-first search over states.

    Each step applies any nonempty set of applicable, pairwise non-interfering
    actions. Returns None when no plan of at most ``max_steps`` exists.
    """
    goals = frozenset(problem.goals)
    start = frozenset(problem.init)
    if goals <= start:
        return 0
    seen = {start}
    frontier = deque([(start, 0)])
    while frontier:
        state, depth = frontier.popleft()
        if depth >= max_steps:
            continue
        applicable = [a for a in problem.actions if a.pre <= state]
        for step in _independent_sets(applicable):
            dele = set().union(*(a.dele for a in step))
            add = set().union(*(a.add for a in step))
            nxt = frozenset((state - dele) | add)
            if nxt in seen:
                continue
            if goals <= nxt:
                return depth + 1
            seen.add(nxt)
            if len(seen) > max_states:
                raise OracleTooLarge(f"more than {max_states} states")
            frontier.append((nxt, depth + 1))
    return None


def _independent_sets(actions: list[GroundAction]):
    def grow(i: int, chosen: list[GroundAction]):
        for j in range(i, len(actions)):
            a = actions[j]
            if any(_interferes(a, b) for b in chosen):
                continue
            chosen.append(a)
            yield list(chosen)
            yield from grow(j + 1, chosen)
            chosen.pop()

    yield from grow(0, [])


# ---------------------------------------------------------------------------
# suite


CSV_COLUMNS = ("problem", "strategy", "solved", "steps", "actions", "backtracks", "memos_stored",
               "memo_hits", "avln", "avfm", "mfsl", "time_ms", "memo_time_ms", "seed")


@dataclass
class RunRecord:
    problem: str
    strategy: str
    solved: bool
    steps: int
    actions: int
    backtracks: int
    memos_stored: int
    memo_hits: int
    avln: float
    avfm: float
    mfsl: float
    time_ms: float
    memo_time_ms: float
    seed: int
    reason: str = ""

    def row(self, timing: bool = True) -> list[str]:
        d = asdict(self)
        if not timing:
            d["time_ms"] = d["memo_time_ms"] = 0.0
        out = []
        for col in CSV_COLUMNS:
            v = d[col]
            if isinstance(v, bool):
                out.append("1" if v else "0")
            elif isinstance(v, float):
                out.append(f"{v:.3f}")
            else:
                out.append(str(v))
        return out


def parse_corpus(spec: str | Iterable[str]) -> list[str]:
    """``"gripper-2..4,ferry-3,fig1"`` -> ``["gripper-2", "gripper-3", "gripper-4", "ferry-3", "fig1"]``."""
    items = spec.split(",") if isinstance(spec, str) else list(spec)
    out = []
    for item in (s.strip() for s in items):
        if not item:
            continue
        if item == "fig1":
            out.append(item)
            continue
        family, _, size = item.rpartition("-")
        if family not in FAMILIES:
            raise ValueError(f"unknown family in {item!r}")
        lo, _, hi = size.partition("..")
        for n in range(int(lo), int(hi or lo) + 1):
            out.append(f"{family}-{n}")
    return out


def load_corpus_item(pid: str) -> Problem | PlanningGraph:
    """Problems by id; ``fig1`` is the fixed two-level graph."""
    if pid == "fig1":
        return fig1_graph()
    family, _, n = pid.rpartition("-")
    return load_instance(family, int(n))


def record_for(pid: str, label: str, solved: bool, plan: Plan | None, stats, mfsl: float,
               seed: int, reason: str = "") -> RunRecord:
    return RunRecord(
        problem=pid, strategy=label, solved=solved,
        steps=plan.length if plan else 0,
        actions=plan.action_count if plan else 0,
        backtracks=stats.backtracks, memos_stored=stats.memos_stored, memo_hits=stats.memo_hits,
        avln=stats.avln, avfm=stats.avfm, mfsl=mfsl,
        time_ms=stats.total_time * 1000, memo_time_ms=stats.memo_time * 1000,
        seed=seed, reason=reason,
    )


def run_one(pid: str, instance, config: SearchConfig, policy: RestartPolicy | None = None,
            max_levels: int = 50, timeout: float | None = None) -> RunRecord:
    if policy is None:
        res = solve(instance, config, max_levels=max_levels, timeout=timeout)
        mfsl = res.stats.memo_hits / res.stats.levels_searched if res.stats.levels_searched else 0.0
        return record_for(pid, config.label, res.solved, res.plan, res.stats, mfsl, config.seed, res.reason)
    if isinstance(instance, PlanningGraph):
        raise ValueError("restart search needs a STRIPS problem, not a fixed graph")
    out = run_with_restarts(instance, config, policy, timeout=timeout)
    return record_for(pid, config.label, out.solved, out.plan, out.stats, out.mfsl, policy.seed, out.reason)


def run_suite(corpus: Iterable[str], configs: Sequence[SearchConfig], policy: RestartPolicy | None = None,
              max_levels: int = 50, timeout: float | None = None) -> list[RunRecord]:
    """One record per (problem, strategy), in corpus-major order."""
    records = []
    for pid in corpus:
        for config in configs:
            instance = load_corpus_item(pid)
            records.append(run_one(pid, instance, config, policy, max_levels, timeout))
    return records


def write_csv(records: Iterable[RunRecord], fh=None, timing: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow(r.row(timing))
    text = buf.getvalue()
    if fh is not None:
        fh.write(text)
    return text
