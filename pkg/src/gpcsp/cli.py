"""Command-line entry points.

``plan DOMAIN PROBLEM``  solve one PDDL problem and print the plan.
``plan-bench``           run strategies over generated benchmark instances.
``plan-gen``             write a generated instance as PDDL files.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .bench import (CSV_COLUMNS, parse_corpus, record_for, run_suite, write_csv)
from .dcsp import compile_to_csp, formulate
from .model import FAMILIES, GroundingError, PddlError, ground, instance_text, parse_domain, parse_problem
from .restart import RestartPolicy, solvability_experiment
from .search import ConfigError, SearchConfig, Trace, solve

log = logging.getLogger("gpcsp")


def _strategy_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--strategy", choices=("plain", "ddb", "ebl"), default="ebl", help="default: ebl")
    p.add_argument("--memo", choices=("off", "exact", "subset", "partial"),
                   help="memo lookup mode (default: exact for plain/ddb, subset for ebl)")
    p.add_argument("--fc", action="store_true", help="forward checking")
    p.add_argument("--dvo", action="store_true", help="dynamic variable ordering")
    p.add_argument("--sticky", choices=("simple", "fold"), help="reuse values from earlier backjumps (needs ddb/ebl)")
    p.add_argument("--noop-first", action="store_true", help="try persist actions first")
    p.add_argument("--min-action-set", action="store_true", help="prefer actions already chosen at the level")
    p.add_argument("--seed", type=int, default=0, help="RNG seed for random value order and restarts")
    p.add_argument("--max-levels", type=int, default=50, metavar="L", help="graph depth limit")
    p.add_argument("--timeout", type=float, help="seconds per run")
    p.add_argument("--no-timing", action="store_true", help="write zeros in the time columns")
    p.add_argument("-v", "--verbose", action="store_true", help="log search progress and statistics")


def _config(args, parser, random_order: bool) -> SearchConfig:
    overrides = dict(fc=args.fc, dvo=args.dvo, sticky=args.sticky or "off",
                     minimal_action_set=args.min_action_set, seed=args.seed)
    if args.memo:
        overrides["memo_lookup"] = args.memo
    if random_order:
        overrides["value_order"] = "random"
    elif args.noop_first:
        overrides["value_order"] = "noop_first"
    try:
        return SearchConfig.preset(args.strategy, **overrides)
    except ConfigError as e:
        parser.error(str(e))


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="plan", description="Planning-graph search with EBL, DDB and restarts.")
    p.add_argument("domain", help="PDDL domain file")
    p.add_argument("problem", help="PDDL problem file")
    _strategy_args(p)
    p.add_argument("--restarts", type=int, metavar="R", help="restarts per graph depth")
    p.add_argument("--btk-limit", type=int, metavar="B", help="inter-level backtracks per epoch")
    p.add_argument("--runs", type=int, metavar="N", help="independent trials with seeds seed..seed+N-1")
    p.add_argument("--stats", metavar="FILE.csv", help="write one CSV row per run")
    p.add_argument("--trace", metavar="FILE", help="write the search event log")
    p.add_argument("--export-csp", metavar="FILE", help="write the level CSP (plan length, else deepest goal-feasible level) as JSON lines")
    p.add_argument("--dump-graph", nargs="?", const="-", metavar="FILE", help="write the planning graph as JSON (stdout if no FILE)")
    p.add_argument("--dump-memos", metavar="FILE", help="write stored memos, one 'level: props' line each")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    restart_mode = args.restarts is not None or args.btk_limit is not None or args.runs is not None
    config = _config(args, parser, random_order=restart_mode)
    for flag in ("restarts", "runs", "max_levels"):
        v = getattr(args, flag)
        if v is not None and v < (0 if flag == "restarts" else 1):
            parser.error(f"--{flag.replace('_', '-')} out of range")

    try:
        domain = parse_domain(Path(args.domain).read_text(encoding="utf-8"))
        problem = ground(domain, parse_problem(Path(args.problem).read_text(encoding="utf-8"), domain))
    except (OSError, PddlError, GroundingError) as e:
        print(f"plan: {e}", file=sys.stderr)
        return 2

    trace = Trace(problem.name_of) if args.trace else None
    timing = not args.no_timing
    if restart_mode:
        try:
            policy = RestartPolicy(args.restarts or 0, args.btk_limit, args.max_levels, args.seed)
        except ValueError as e:
            parser.error(str(e))
        summary = solvability_experiment(problem, config, policy, args.runs or 1, args.timeout, trace)
        records = [record_for(problem.name, config.label, o.solved, o.plan, o.stats, o.mfsl, args.seed + i, o.reason)
                   for i, o in enumerate(summary.outcomes)]
        solved = summary.solved > 0
        best = next((o for o in summary.outcomes if o.solved), summary.outcomes[0])
        plan, memo, graph = best.plan, best.memo, None
        print(f"solved {summary.solved}/{summary.runs} ({summary.percent_solved:.1f}%), "
              f"mean MFSL {summary.mean_mfsl:.2f}")
    else:
        res = solve(problem, config, max_levels=args.max_levels, trace=trace, timeout=args.timeout)
        mfsl = res.stats.memo_hits / res.stats.levels_searched if res.stats.levels_searched else 0.0
        records = [record_for(problem.name, config.label, res.solved, res.plan, res.stats, mfsl, args.seed, res.reason)]
        solved, plan, memo, graph = res.solved, res.plan, res.memo, res.graph

    if solved and plan is not None:
        print(f"plan: {plan.length} steps, {plan.action_count} actions")
        sys.stdout.write(plan.describe())
    else:
        print(f"no plan ({records[0].reason})")

    for r in records:
        log.info("%s seed=%d: backtracks=%d memos=%d hits=%d avln=%.2f mfsl=%.2f", r.strategy, r.seed,
                 r.backtracks, r.memos_stored, r.memo_hits, r.avln, r.mfsl)
    if args.stats:
        _write(args.stats, write_csv(records, timing=timing))
    if trace is not None:
        _write(args.trace, trace.text())
    if args.dump_memos:
        _write(args.dump_memos, memo.dump(problem.name_of))
    if graph is None and (args.dump_graph or args.export_csp):
        from .graph import PlanningGraph
        graph = PlanningGraph(problem)
        graph.extend_to(plan.length if plan else args.max_levels)
    if args.dump_graph:
        _write(args.dump_graph, json.dumps(graph.dump(), indent=1) + "\n")
    if args.export_csp:
        k = plan.length if plan else max((j for j in range(graph.depth + 1)
                                          if graph.goals_feasible(j, problem.goals)), default=0)
        text = compile_to_csp(formulate(graph, k, problem.goals)).to_jsonl() if k else ""
        _write(args.export_csp, text)
    return 0 if solved else 1


def bench_main(argv=None) -> int:
    p = argparse.ArgumentParser(prog="plan-bench", description="Run strategies over generated instances.")
    p.add_argument("--corpus", default="fig1,gripper-2..4,ferry-2..3,hanoi-3..4,tsp-4..5",
                   help="comma list such as gripper-2..4,ferry-3,fig1")
    p.add_argument("--strategies", default="plain,ddb,ebl", help="comma list of strategies")
    _strategy_args(p)
    p.add_argument("--restarts", type=int, metavar="R", help="restarts per graph depth")
    p.add_argument("--btk-limit", type=int, metavar="B", help="inter-level backtracks per epoch")
    p.add_argument("--out", default="-", metavar="FILE.csv", help="default: stdout")
    args = p.parse_args(argv)
    restart_mode = args.restarts is not None or args.btk_limit is not None
    configs = []
    for name in args.strategies.split(","):
        args.strategy = name.strip()
        if args.strategy not in ("plain", "ddb", "ebl"):
            p.error(f"unknown strategy {name!r}")
        configs.append(_config(args, p, random_order=restart_mode))
    try:
        corpus = parse_corpus(args.corpus)
    except ValueError as e:
        p.error(str(e))
    policy = RestartPolicy(args.restarts or 0, args.btk_limit, args.max_levels, args.seed) if restart_mode else None
    records = run_suite(corpus, configs, policy, max_levels=args.max_levels, timeout=args.timeout)
    _write(args.out, write_csv(records, timing=not args.no_timing))
    return 0


def gen_main(argv=None) -> int:
    p = argparse.ArgumentParser(prog="plan-gen", description="Write a generated instance as PDDL.")
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("n", type=int, nargs="?", default=1, help="instance size")
    p.add_argument("--outdir", default=".")
    args = p.parse_args(argv)
    try:
        dtext, ptext = instance_text(args.family, args.n)
    except ValueError as e:
        p.error(str(e))
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    stem = args.family if args.family == "fig1" else f"{args.family}-{args.n}"
    (out / f"{args.family}-domain.pddl").write_text(dtext, encoding="utf-8")
    (out / f"{stem}.pddl").write_text(ptext, encoding="utf-8")
    print(out / f"{args.family}-domain.pddl")
    print(out / f"{stem}.pddl")
    return 0


if __name__ == "__main__":
    sys.exit(main())
