"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest -v tests/test_acceptance.py`` (the lines are printed even
under output capture) or directly with ``python3 tests/test_acceptance.py``.
``ACCEPT_PAPER_BUDGET`` sets the per-paradigm budget in seconds for the
paper-shaped schedule (default 60, at most 600).
"""
import os
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, os.path.dirname(__file__))

from cspbench.bench import (  # noqa: E402
    COLUMNS, PARADIGMS, Coloring, Queens, Schedule, brute_force, gen_graph, gen_schedule, read_csv,
    run_suite, solve_problem, supports,
)
from cspbench.bench.oracle import min_reserve, queens_by_columns, queens_by_rows, schedule_violations  # noqa: E402
from cspbench.bench.rng import SplitMix64  # noqa: E402
from cspbench.bench.encode import lp_queens  # noqa: E402
from cspbench.fd import (  # noqa: E402
    AllDifferent, CspProblem, Linear, MinOf, NotEqual, NotEqualOffset, OccupancyChannel, propagate,
)
from cspbench.grounder import GChoice, GConstraint, ground, naive_ground  # noqa: E402
from cspbench.lp import parse_program  # noqa: E402
from cspbench.stable import solve_stable  # noqa: E402

from gen import random_ground_program, random_rule_program  # noqa: E402
from oracles import brute_force_solutions  # noqa: E402
from test_grounder import diagonal_count  # noqa: E402

PAPER_BUDGET = min(600.0, float(os.environ.get("ACCEPT_PAPER_BUDGET", "60")))


def line(n, ok, text):
    return f"{'PASS' if ok else 'FAIL'} criterion {n}: {text}"


# --- 1: n-queens counts -----------------------------------------------------------

def criterion_1():
    t0 = time.perf_counter()
    bad = []
    counts = {}
    for n in range(4, 9):
        rows, cols = queens_by_rows(n), queens_by_columns(n)
        if sorted(rows) != sorted(cols):
            bad.append(f"n={n}: enumeration orders disagree")
        want = brute_force(Queens(n)).count
        counts[n] = want
        for p in PARADIGMS:
            out = solve_problem(Queens(n), p, "all")
            if out.count != want:
                bad.append(f"n={n} {p}: {out.count} != {want}")
    dt = time.perf_counter() - t0
    ok = not bad and dt < 60
    detail = ", ".join(f"{n}:{c}" for n, c in counts.items())
    return ok, f"queens counts {detail} agree across 4 paradigms and oracle in {dt:.1f}s (< 60s)" + \
        (f"; {bad[:3]}" if bad else "")


# --- 2: stable models against the reduct oracle -----------------------------------

def criterion_2():
    from oracles import stable_models_bruteforce
    t0 = time.perf_counter()
    bad = []
    total = consistent = 0
    # half with the default rule mix, half without integrity constraints so more have models
    cases = [(s, {}) for s in range(5000, 5150)]
    cases += [(s, {"weights": (6, 3, 0, 2), "headless": False}) for s in range(6000, 6150)]
    for seed, kw in cases:
        gp = random_ground_program(seed, max_atoms=12, max_rules=25, **kw)
        got = set(solve_stable(gp))
        want = stable_models_bruteforce(gp)
        total += len(want)
        consistent += bool(want)
        if got != want:
            bad.append(seed)
    dt = time.perf_counter() - t0
    ok = not bad and dt < 120
    return ok, (f"{len(cases)} random ground programs ({consistent} with models, {total} models), "
                f"solver = 2^n reduct oracle in {dt:.1f}s (< 120s)"
                + (f"; mismatching seeds {bad[:5]}" if bad else ""))


# --- 3: grounder fidelity -----------------------------------------------------------

def criterion_3():
    bad = []
    for seed in range(7000, 7100):
        p = parse_program(random_rule_program(seed, max_dom=5))
        a, b = ground(p), naive_ground(p)
        ma = {frozenset(a.model_names(m)) for m in solve_stable(a)}
        mb = {frozenset(b.model_names(m)) for m in solve_stable(b)}
        if ma != mb:
            bad.append(seed)
    gp = ground(parse_program(lp_queens(4)))
    diag = sum(isinstance(r, GConstraint) for r in gp.rules)
    choices = sum(isinstance(r, GChoice) for r in gp.rules)
    want = diagonal_count(4)
    ok = not bad and diag == want and choices == 8
    return ok, (f"100 programs naive = production grounder; queens n=4 grounds to {diag} diagonal "
                f"constraints (enumeration: {want}) and {choices} choice rules"
                + (f"; mismatching seeds {bad[:5]}" if bad else ""))


# --- 4: coloring agreement ----------------------------------------------------------

COLORING_SIZES = range(4, 9)


def criterion_4():
    t0 = time.perf_counter()
    rng = SplitMix64(20240604)
    bad = []
    sat = 0
    for i in range(50):
        n = COLORING_SIZES[i % len(COLORING_SIZES)]
        g = gen_graph(n, 0.2, rng.next_u64(), k=4)
        problem = Coloring(g)
        want = brute_force(problem).count
        sat += want > 0
        for p in PARADIGMS:
            out = solve_problem(problem, p, "all")
            first = solve_problem(problem, p, "first")
            if out.count != want or (first.outcome == "sat") != (want > 0):
                bad.append(f"{g.name} {p}: {out.count} != {want}")
    dt = time.perf_counter() - t0
    ok = not bad and dt < 300
    return ok, (f"50 G(n,0.2) graphs, n in {COLORING_SIZES.start}..{COLORING_SIZES.stop - 1}, k=4: "
                f"counts and sat/unsat ({sat} sat) agree across 4 paradigms and oracle in {dt:.1f}s (< 300s)"
                + (f"; {bad[:3]}" if bad else ""))


# --- 5: scheduling optimality ---------------------------------------------------------

def criterion_5_scaled():
    rng = SplitMix64(1999)
    bad = []
    values = []
    for _ in range(20):
        inst = gen_schedule("scaled", rng.next_u64())
        problem = Schedule(inst)
        want = brute_force(problem, "optimize").value
        got = {p: solve_problem(problem, p, "optimize").value for p in ("fd", "stable", "abductive")}
        values.append(want)
        if set(got.values()) != {want}:
            bad.append(f"{problem.name}: {got} oracle {want}")
    return not bad, ("20 scaled instances: fd = stable (iterated bound) = abductive = oracle optimum"
                     + (f"; {bad[:2]}" if bad else f" (optima {min(values)}..{max(values)})"))


def criterion_5_paper():
    inst = gen_schedule("paper", 1)
    problem = Schedule(inst)
    parts, ok = [], len(inst.maintenances) == 56 and inst.horizon == 52
    for p in PARADIGMS:
        if not supports(problem, p):
            continue
        out = solve_problem(problem, p, "optimize", budget=PAPER_BUDGET)
        vals = [v for _, v in out.incumbents]
        feasible = bool(out.solutions) and not schedule_violations(inst, out.solutions[-1])
        verified = feasible and min_reserve(inst, out.solutions[-1]) == out.value
        monotone = all(a < b for a, b in zip(vals, vals[1:]))
        total = out.setup_s + out.solve_s
        good = verified and monotone and total <= 600 + 5
        ok &= good
        first = out.incumbents[0][0] if out.incumbents else float("nan")
        parts.append(f"{p}: {len(vals)} incumbents {vals[0] if vals else '-'}->{out.value}, "
                     f"first after {first:.1f}s, {out.outcome}"
                     + ("" if good else " [not verified/monotone]"))
    return ok, (f"paper-shaped 56 maintenances / 52 weeks, budget {PAPER_BUDGET:.0f}s each: "
                + "; ".join(parts))


def criterion_5():
    ok1, t1 = criterion_5_scaled()
    ok2, t2 = criterion_5_paper()
    return ok1 and ok2, f"{t1} | {t2}"


# --- 6: propagation properties -----------------------------------------------------------

def _domain(rng, lo=-3, hi=6, size=5):
    vals = sorted(rng.sample(range(lo, hi + 1), rng.randint(1, size)))
    return vals


def _case(variant, rng):
    p = CspProblem()
    if variant in ("NotEqual", "NotEqualOffset"):
        x, y = p.new_var(_domain(rng)), p.new_var(_domain(rng))
        p.add(NotEqual(x, y) if variant == "NotEqual" else NotEqualOffset(x, y, rng.randint(0, 4)))
    elif variant.startswith("Linear"):
        rel = {"le": "<=", "eq": "=", "ne": "!="}[variant.split("-")[1]]
        k = 2 if variant.endswith("binary") else rng.randint(3, 4)
        vs = [p.new_var(_domain(rng)) for _ in range(k)]
        terms = tuple((rng.choice([-3, -2, -1, 1, 2, 3]), v) for v in vs)
        p.add(Linear(terms, rel, rng.randint(-6, 10)))
    elif variant == "AllDifferent":
        vs = [p.new_var(_domain(rng, 1, 5, 4)) for _ in range(rng.randint(2, 5))]
        p.add(AllDifferent(tuple(vs)))
    elif variant == "OccupancyChannel":
        s = p.new_var(_domain(rng, 0, 6, 4))
        occ = [p.new_var(rng.choice([[0], [1], [0, 1], [0, 1]])) for _ in range(rng.randint(1, 4))]
        p.add(OccupancyChannel(s, rng.randint(1, 3), tuple(occ), rng.randint(0, 2)))
    elif variant == "MinOf":
        r = p.new_var(_domain(rng))
        args = [p.new_var(_domain(rng)) for _ in range(rng.randint(1, 3))]
        p.add(MinOf(r, tuple(args)))
    else:
        raise ValueError(variant)
    return p


VARIANTS = ("NotEqual", "NotEqualOffset", "Linear-le-binary", "Linear-eq-binary", "Linear-ne-binary",
            "Linear-le-nary", "Linear-eq-nary", "Linear-ne-nary", "AllDifferent", "OccupancyChannel",
            "MinOf")


def check_propagation(p):
    """(sound, complete) of one propagation call against exhaustive enumeration."""
    doms = [list(v.domain.values) for v in p.vars]
    sols = brute_force_solutions(doms, p.constraints)
    supported = [{s[i] for s in sols} for i in range(len(doms))]
    out = propagate(p)
    if out.failure:
        return not sols, not sols
    kept = [set(d.values) for d in out.domains]
    sound = all(supported[i] <= kept[i] for i in range(len(doms)))
    complete = all(kept[i] <= supported[i] for i in range(len(doms)))
    return sound, complete


def criterion_6():
    rng = random.Random(6006)
    bad = []
    binary_checked = 0
    for variant in VARIANTS:
        for _ in range(1000):
            p = _case(variant, rng)
            sound, complete = check_propagation(p)
            binary = len(p.vars) == 2
            binary_checked += binary
            if not sound or (binary and not complete):
                bad.append(variant)
    ok = not bad
    return ok, (f"{len(VARIANTS)} variants x 1000 cases: no supported value removed; "
                f"{binary_checked} binary cases keep only supported values"
                + (f"; failures in {sorted(set(bad))}" if bad else ""))


# --- 7: harness reproducibility ------------------------------------------------------------

SUITE = """\
[suite]
seed = 77
budget = 60
paradigms = fd, stable, modelgen, abductive

[queens]
sizes = 4..7
modes = first, all

[coloring]
sizes = 5..7
per_size = 2
modes = first, all

[schedule]
profile = scaled
count = 2
modes = first, optimize
"""


def criterion_7(tmp):
    tmp = Path(tmp)
    cfg = tmp / "suite.cfg"
    cfg.write_text(SUITE)
    run_suite(cfg, tmp / "a.csv", tmp / "plot")
    run_suite(cfg, tmp / "b.csv")
    a, b = read_csv(tmp / "a.csv"), read_csv(tmp / "b.csv")
    keep = [c for c in COLUMNS if c not in ("setup_ms", "solve_ms")]
    same = [[getattr(r, c) for c in keep] for r in a] == [[getattr(r, c) for c in keep] for r in b]
    split = all(r.setup_ms is not None and r.solve_ms is not None and r.setup_ms >= 0 and r.solve_ms >= 0
                for r in a + b)
    header = (tmp / "a.csv").read_text().splitlines()[0] == ",".join(COLUMNS)
    plots = sorted(p.name for p in (tmp / "plot").glob("*.dat"))
    ok = same and split and header and len(a) > 0
    return ok, (f"{len(a)} rows identical across reruns except timing columns; setup/solve split on "
                f"every row; plot data {', '.join(plots)}")


# --- pytest wrappers -----------------------------------------------------------------------

def _report(capsys, n, result):
    ok, text = result
    with capsys.disabled():
        print("\n" + line(n, ok, text), flush=True)
    assert ok, text


def test_criterion_1_queens_counts(capsys):
    _report(capsys, 1, criterion_1())


def test_criterion_2_stable_oracle(capsys):
    _report(capsys, 2, criterion_2())


def test_criterion_3_grounder_fidelity(capsys):
    _report(capsys, 3, criterion_3())


def test_criterion_4_coloring_agreement(capsys):
    _report(capsys, 4, criterion_4())


def test_criterion_5_scheduling(capsys):
    _report(capsys, 5, criterion_5())


def test_criterion_6_propagation(capsys):
    _report(capsys, 6, criterion_6())


def test_criterion_7_reproducibility(capsys, tmp_path):
    _report(capsys, 7, criterion_7(tmp_path))


if __name__ == "__main__":
    import tempfile
    results = []
    for n, fn in enumerate((criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6), 1):
        ok, text = fn()
        print(line(n, ok, text), flush=True)
        results.append(ok)
    with tempfile.TemporaryDirectory() as d:
        ok, text = criterion_7(d)
        print(line(7, ok, text), flush=True)
        results.append(ok)
    sys.exit(0 if all(results) else 1)
