"""Random-restart search with restart, backtrack and level limits.

An *epoch* is the search between two restarts. Inside an epoch the engine
counts inter-level backtracks; once more than ``backtrack_limit`` happen the
epoch is abandoned and a new one starts from the top level with a freshly
shuffled value order. Memos survive restarts; sticky values do not.
"""

from __future__ import annotations

import random
import statistics
import time
from dataclasses import dataclass, field, replace

from .graph import PlanningGraph
from .memostore import MemoTable
from .model import Problem
from .search import (BacktrackLimitReached, Engine, Failure, Plan, SearchConfig, SearchStats,
                     SearchTimeout, Trace, build_plan)


@dataclass(frozen=True)
class RestartPolicy:
    """``backtrack_limit=None`` means unlimited."""

    restarts: int = 0
    backtrack_limit: int | None = None
    max_levels: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 0:
            raise ValueError("restarts must be >= 0")
        if self.backtrack_limit is not None and self.backtrack_limit < 1:
            raise ValueError("backtrack limit must be >= 1")
        if self.max_levels < 1:
            raise ValueError("max_levels must be >= 1")


@dataclass
class EpochRecord:
    depth: int
    outcome: str  # "solved", "limit", "failed"
    interlevel_backtracks: int
    backtracks: int
    memo_hits: int


@dataclass
class EpochOutcome:
    solved: bool
    plan: Plan | None
    epochs_used: int
    interlevel_backtracks: int
    levels_expanded: int
    levels_searched: int
    stats: SearchStats
    memo: MemoTable
    epochs: list[EpochRecord] = field(default_factory=list)
    reason: str = ""

    @property
    def mfsl(self) -> float:
        """Memo-based failures per searched level."""
        return self.stats.memo_hits / self.levels_searched if self.levels_searched else 0.0


def run_with_restarts(problem: Problem, config: SearchConfig, policy: RestartPolicy,
                      timeout: float | None = None, trace: Trace | None = None) -> EpochOutcome:
    if config.value_order != "random":
        config = replace(config, value_order="random")
    pg = PlanningGraph(problem)
    rng = random.Random(policy.seed)
    stats = SearchStats()
    start = time.perf_counter()
    deadline = start + timeout if timeout is not None else None
    if trace is not None and trace._names is None:
        trace._names = problem.name_of
    engine = Engine(pg, config, stats=stats, rng=rng, trace=trace, deadline=deadline,
                    backtrack_limit=policy.backtrack_limit)
    epochs: list[EpochRecord] = []
    searched: set[int] = set()
    goals = problem.goals

    def finish(solved, plan=None, reason=""):
        stats.total_time = time.perf_counter() - start
        return EpochOutcome(solved, plan, len(epochs), stats.interlevel_backtracks, pg.depth,
                            len(searched), stats, engine.memo, epochs, reason)

    for k in range(0, policy.max_levels + 1):
        if k > pg.depth:
            pg.extend()
        if not pg.goals_feasible(k, goals):
            continue
        if k == 0:
            return finish(True, Plan([]))
        searched.add(k)
        stats.levels_searched = len(searched)
        for _ in range(policy.restarts + 1):
            engine.reset_epoch()
            if trace is not None:
                trace.emit("epoch", depth=k, n=len(epochs) + 1)
            before = stats.copy()
            try:
                result = engine.find_plan(goals, k)
                outcome = "failed" if isinstance(result, Failure) else "solved"
            except BacktrackLimitReached:
                result, outcome = None, "limit"
                if trace is not None:
                    trace.emit("restart", depth=k, backtracks=stats.interlevel_backtracks - before.interlevel_backtracks)
            except SearchTimeout:
                return finish(False, reason="timeout")
            epochs.append(EpochRecord(k, outcome,
                                      stats.interlevel_backtracks - before.interlevel_backtracks,
                                      stats.backtracks - before.backtracks,
                                      stats.memo_hits - before.memo_hits))
            if outcome == "solved":
                return finish(True, build_plan(pg, result))
            if outcome == "failed":
                break  # exhaustively refuted at this depth: extend right away
    return finish(False, reason="limits exhausted")


@dataclass
class ExperimentSummary:
    runs: int
    solved: int
    percent_solved: float
    mean_steps: float | None
    mean_actions: float | None
    mean_mfsl: float
    outcomes: list[EpochOutcome] = field(default_factory=list, repr=False)


def solvability_experiment(problem: Problem, config: SearchConfig, policy: RestartPolicy,
                           runs: int, timeout: float | None = None,
                           trace: Trace | None = None) -> ExperimentSummary:
    """``runs`` independent trials with seeds ``policy.seed + i``, each with a fresh memo table."""
    if runs < 1:
        raise ValueError("runs must be >= 1")
    outcomes = []
    for i in range(runs):
        if trace is not None:
            trace.emit("run", n=i + 1, seed=policy.seed + i)
        outcomes.append(run_with_restarts(problem, config, replace(policy, seed=policy.seed + i), timeout, trace))
    ok = [o for o in outcomes if o.solved]
    return ExperimentSummary(
        runs=runs,
        solved=len(ok),
        percent_solved=100.0 * len(ok) / runs,
        mean_steps=statistics.fmean(o.plan.length for o in ok) if ok else None,
        mean_actions=statistics.fmean(o.plan.action_count for o in ok) if ok else None,
        mean_mfsl=statistics.fmean(o.mfsl for o in outcomes),
        outcomes=outcomes,
    )
