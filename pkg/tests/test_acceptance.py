"""End-to-end acceptance checks.

Every check prints one ``PASS criterion N: ...`` or ``FAIL criterion N: ...``
line (collected again in the terminal summary) and then asserts.  Run the file
directly with ``python3 tests/test_acceptance.py`` to get just those lines.
"""

import contextlib
import csv
import io
import random
import time

from gpcsp.bench import exhaustive_level_oracle, parallel_bfs_oracle, parse_corpus, validate_plan
from gpcsp.cli import main as plan_main
from gpcsp.cli import gen_main
from gpcsp.dcsp import memo_capacity_bounds
from gpcsp.graph import fig1_graph
from gpcsp.memostore import Memo, MemoTable, naive_subset_scan
from gpcsp.model import load_instance
from gpcsp.restart import RestartPolicy, solvability_experiment
from gpcsp.search import Engine, SearchConfig, Trace, regress, solve

from golden import FIG1_EBL_TRACE
from helpers import random_problem

RESULTS = []


def report(n, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def config_matrix():
    out = []
    for strategy in ("plain", "ddb", "ebl"):
        for fc in (False, True):
            for dvo in (False, True):
                stickies = ("off",) if strategy == "plain" else ("off", "simple", "fold")
                for sticky in stickies:
                    out.append(SearchConfig.preset(strategy, fc=fc, dvo=dvo, sticky=sticky))
    return out


def _fig1(config):
    pg = fig1_graph()
    trace = Trace(pg.problem.name_of)
    engine = Engine(pg, config, trace=trace)
    engine.find_plan(pg.problem.goals, 2)
    memos = {(m.level, tuple(pg.problem.names(m.props))) for m in engine.memo.memos()}
    return engine, memos, trace


def test_criterion_1_fig1_ebl_trace():
    t0 = time.perf_counter()
    _, memos, trace = _fig1(SearchConfig.preset("ebl"))
    elapsed = time.perf_counter() - t0
    ok = (trace.text() == FIG1_EBL_TRACE
          and memos == {(1, ("P1", "P2", "P3", "P4")), (2, ("G1", "G2"))}
          and elapsed < 1.0)
    report(1, ok, f"fig1 ebl trace matches, memos {sorted(memos)}, {elapsed * 1000:.1f} ms")


def test_criterion_2_fig1_plain():
    plain, memos, _ = _fig1(SearchConfig.preset("plain"))
    ebl, _, _ = _fig1(SearchConfig.preset("ebl"))
    ok = (memos == {(1, ("P1", "P2", "P3", "P4", "P5", "P6")), (2, ("G1", "G2", "G3", "G4"))}
          and plain.stats.backtracks > ebl.stats.backtracks)
    report(2, ok, f"fig1 plain memos {sorted(memos)}, backtracks {plain.stats.backtracks} > {ebl.stats.backtracks}")


def test_criterion_3_regression():
    pg = fig1_graph()
    p = pg.problem.prop
    by_name = {a.name: a for a in pg.levels[2].actions}
    selection = {p(f"G{i}"): by_name[f"A{i}"] for i in range(1, 5)}
    cs = {p(n) for n in ("P1", "P2", "P3", "P4")}
    t0 = time.perf_counter()
    results = {frozenset(regress(cs, selection)) for _ in range(10)}
    elapsed = (time.perf_counter() - t0) / 10
    ok = results == {frozenset({p("G1"), p("G2")})} and elapsed < 1e-3
    report(3, ok, f"regress({{P1..P4}}) = {pg.problem.names(next(iter(results)))}, {elapsed * 1e6:.0f} us")


MATRIX_CORPUS = parse_corpus("gripper-2..4,ferry-2..3,hanoi-3..4,tsp-4..5")


def test_criterion_4_config_matrix():
    t0 = time.perf_counter()
    configs = config_matrix()
    problems = []
    for item in MATRIX_CORPUS:
        family, n = item.rsplit("-", 1)
        problems.append((item, load_instance(family, int(n))))
    disagreements, invalid = [], []
    steps = {}
    for name, problem in problems:
        outcomes = set()
        for config in configs:
            result = solve(problem, config)
            outcomes.add((result.solved, result.steps))
            if result.solved:
                err = validate_plan(problem, result.plan)
                if err:
                    invalid.append((name, config.label, err))
        if len(outcomes) != 1:
            disagreements.append((name, outcomes))
        steps[name] = next(iter(outcomes))[1]
    bfs = parallel_bfs_oracle(load_instance("gripper", 2))
    elapsed = time.perf_counter() - t0
    ok = (not disagreements and not invalid and steps["hanoi-3"] == 7 and steps["gripper-2"] == bfs == 3
          and elapsed < 120)
    report(4, ok, f"{len(configs)} configs x {len(problems)} problems agree; steps {steps}; "
                  f"{len(disagreements)} disagreements, {len(invalid)} invalid plans, {elapsed:.1f} s")


def test_criterion_5_memo_soundness():
    t0 = time.perf_counter()
    configs = config_matrix()
    checked = violations = 0
    with_memos = set()
    for seed in range(100):
        # six propositions bound every level; preconditions and deletes force some failed searches
        problem = random_problem(seed, n_props=6, n_actions=10, n_goals=4, min_pre=1, min_del=1)
        for config in configs:
            result = solve(problem, config, max_levels=4)
            for memo in result.memo.memos():
                checked += 1
                with_memos.add(seed)
                if exhaustive_level_oracle(result.graph, memo.level, memo.props):
                    violations += 1
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and checked > 0 and elapsed < 300
    report(5, ok, f"{checked} stored memos from {len(with_memos)} of 100 random instances checked, "
                  f"{violations} violations, {elapsed:.1f} s")


def test_criterion_6_ubtree():
    rng = random.Random(2024)
    table = MemoTable("subset")
    stored = []
    mismatches = queries = 0
    for _ in range(10_000):
        level = rng.randrange(4)
        props = tuple(sorted(rng.sample(range(24), rng.randint(1, 8))))
        if rng.random() < 0.4:
            table.insert(Memo(level, props))
            stored.append(Memo(level, props))
        else:
            queries += 1
            if (table.lookup(level, props) is None) != (naive_subset_scan(stored, level, props) is None):
                mismatches += 1
    report(6, mismatches == 0, f"10000 operations ({queries} queries), {mismatches} mismatches")


def test_criterion_7_table1_trend():
    rows = []
    ok = True
    for item in ("gripper-4", "ferry-3"):
        family, n = item.rsplit("-", 1)
        problem = load_instance(family, int(n))
        plain = solve(problem, SearchConfig.preset("plain")).stats
        ebl = solve(problem, SearchConfig.preset("ebl")).stats
        ratio = ebl.backtracks / plain.backtracks
        ok &= ebl.avln <= plain.avln and ebl.backtracks <= 0.5 * plain.backtracks
        rows.append(f"{item} AvLn {ebl.avln:.2f}/{plain.avln:.2f} backtracks {ebl.backtracks}/{plain.backtracks}"
                    f" (ratio {ratio:.2f})")
    report(7, ok, "ebl/plain " + "; ".join(rows))


def test_criterion_8_table2_trend():
    failures = []
    for item in MATRIX_CORPUS + ["logistics-2"]:
        family, n = item.rsplit("-", 1)
        problem = load_instance(family, int(n))
        ebl = solve(problem, SearchConfig.preset("ebl"))
        ddb = solve(problem, SearchConfig.preset("ddb"))
        if ebl.solved and not (ddb.solved and ebl.stats.backtracks <= ddb.stats.backtracks):
            failures.append(item)
    report(8, not failures, f"ddb-only solves all ebl-solved problems with ebl backtracks <= ddb; failures {failures}")


def test_criterion_9_table6_trend():
    t0 = time.perf_counter()
    problem = load_instance("logistics", 2)
    policy = RestartPolicy(restarts=5, backtrack_limit=50, max_levels=20, seed=0)
    plain = solvability_experiment(problem, SearchConfig.preset("plain", value_order="random"), policy, runs=50)
    ebl = solvability_experiment(problem, SearchConfig.preset("ebl", value_order="random"), policy, runs=50)
    elapsed = time.perf_counter() - t0
    ok = (ebl.percent_solved >= plain.percent_solved and ebl.mean_mfsl >= plain.mean_mfsl and elapsed < 600)
    report(9, ok, f"logistics-2 R/B/L 5/50/20, 50 trials: solved {ebl.percent_solved:.0f}% vs "
                  f"{plain.percent_solved:.0f}%, MFSL {ebl.mean_mfsl:.2f} vs {plain.mean_mfsl:.2f}, {elapsed:.1f} s")


def test_criterion_10_cli_determinism(tmp_path):
    gen_main(["gripper", "3", "--outdir", str(tmp_path)])
    dom, prob = tmp_path / "gripper-domain.pddl", tmp_path / "gripper-3.pddl"
    invocations = [
        ["--strategy", "ebl", "--fc", "--dvo", "--sticky", "fold"],
        ["--strategy", "plain", "--restarts", "2", "--btk-limit", "5", "--runs", "3", "--seed", "17"],
    ]
    same = True
    for i, extra in enumerate(invocations):
        outputs = []
        for j in range(2):
            trace, stats = tmp_path / f"t{i}{j}.log", tmp_path / f"s{i}{j}.csv"
            with contextlib.redirect_stdout(io.StringIO()):
                plan_main([str(dom), str(prob), *extra, "--trace", str(trace), "--stats", str(stats), "--no-timing"])
            outputs.append((trace.read_bytes(), stats.read_bytes()))
        same &= outputs[0] == outputs[1] and len(outputs[0][0]) > 0
        same &= len(list(csv.DictReader(io.StringIO(outputs[0][1].decode())))) >= 1
    report(10, same, f"{len(invocations)} CLI invocations produce byte-identical CSV and trace twice in a row")


def test_criterion_11_capacity():
    got = memo_capacity_bounds(12, 3, 4, 2).as_tuple()
    report(11, got == (48, 16_777_216, 48, 432), f"memo_capacity_bounds(12,3,4,2) = {got}")


if __name__ == "__main__":
    import sys
    import tempfile
    from pathlib import Path

    checks = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    checks.sort(key=lambda f: int(f.__name__.split("_")[2]))
    failed = 0
    for check in checks:
        try:
            if "tmp_path" in check.__code__.co_varnames[:check.__code__.co_argcount]:
                with tempfile.TemporaryDirectory() as d:
                    check(Path(d))
            else:
                check()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
