import itertools
from pathlib import Path

import pytest

from cspbench.declar import (
    Interpretation, SpecError, check_interpretation, compile_spec, defined_extensions,
    eval_defined, objective_value, parse_spec,
)
from cspbench.errors import StructuralError
from cspbench.fd import Linear, OccupancyChannel, maximize, solve_all

from oracles import queens_count_product

SPECS = Path(__file__).resolve().parent.parent / "specs"

MODELGEN = "sort d = 1..{n}; func pos: d -> d bijective; con abs(pos(X1) - pos(X2)) != X2 - X1 <- X1 < X2;"
ONE_SIDED = ("sort d = 1..{n}; func pos: d -> d bijective;"
             " con pos(X1) != pos(X2) + (X2 - X1), pos(X1) != pos(X2) - (X2 - X1) <- X1 < X2;")
ABDUCTIVE = ("sort d = 1..{n}; openfunc pos: d -> d;"
             " con Y1 != Y2, X2 - X1 != Y2 - Y1, X2 - X1 != Y1 - Y2 <- pos(X1,Y1), pos(X2,Y2), X1 < X2;")
ATTACK = (SPECS / "queens_attack.dl").read_text().replace("1..8", "1..{n}")


def tables(spec, scheme="cells"):
    c = compile_spec(spec, scheme)
    out = set()
    for a in solve_all(c.problem):
        interp = c.decompile(a)
        assert check_interpretation(spec, interp) == []
        out.add(tuple(interp.functions["pos"][(i,)] for i in range(1, len(interp.functions["pos"]) + 1)))
    return out


def kinds(c):
    return [type(x).__name__ for x in c.problem.constraints]


def test_modelgen_queens_n4():
    c = compile_spec(parse_spec(MODELGEN.format(n=4)))
    assert len(c.problem.vars) == 4
    assert all(v.domain.values == (1, 2, 3, 4) for v in c.problem.vars)
    assert kinds(c).count("AllDifferent") == 1
    assert kinds(c).count("NotEqualOffset") == 6
    assert len(solve_all(c.problem)) == 2


def test_one_sided_diagonals_give_twelve_instances():
    c = compile_spec(parse_spec(ONE_SIDED.format(n=4)))
    diag = [x for x in c.problem.constraints if isinstance(x, Linear)]
    assert len(diag) == 12 and all(x.rel == "!=" for x in diag)
    assert len(solve_all(c.problem)) == 2


@pytest.mark.parametrize("form", [MODELGEN, ONE_SIDED, ABDUCTIVE, ATTACK])
def test_queens_counts_match_oracle(form):
    for n in range(4, 8):
        assert len(tables(parse_spec(form.format(n=n)))) == queens_count_product(n)


@pytest.mark.parametrize("form", [MODELGEN, ABDUCTIVE, ATTACK])
def test_cells_and_atoms_schemes_agree(form):
    for n in range(4, 7):
        spec = parse_spec(form.format(n=n))
        assert tables(spec, "cells") == tables(spec, "atoms")


def test_bijective_size_mismatch():
    spec = parse_spec("sort a = 1..2; sort b = 1..3; func f: a -> b bijective;")
    with pytest.raises(SpecError, match="bijective"):
        compile_spec(spec)


def test_injective_models_have_distinct_values():
    spec = parse_spec("sort a = 1..3; sort b = 1..4; func f: a -> b injective;")
    c = compile_spec(spec)
    sols = solve_all(c.problem)
    assert len(sols) == 4 * 3 * 2
    for s in sols:
        vals = list(c.decompile(s).functions["f"].values())
        assert len(set(vals)) == 3


def test_count_aggregate_becomes_linear_over_indicators():
    spec = parse_spec("""
        sort unit = 1..3; sort week = 1..4;
        func start: unit -> week;
        open maint: unit * week;
        occupy maint(U,W) : start(U) for 1;
        con #count{U : maint(U,W)} <= 2 <- W = 2;
    """)
    c = compile_spec(spec)
    occ = {c.atom_vars[("maint", (u, 2))] for u in (1, 2, 3)}
    lin = [x for x in c.problem.constraints if isinstance(x, Linear)]
    assert len(lin) == 1
    assert lin[0].rel == "<=" and lin[0].bound == 2
    assert {v for _, v in lin[0].terms} == occ and all(k == 1 for k, _ in lin[0].terms)
    assert sum(isinstance(x, OccupancyChannel) for x in c.problem.constraints) == 3
    sols = solve_all(c.problem)
    assert len(sols) == 4 ** 3 - 1


def test_attack_predicate():
    spec = parse_spec(ATTACK.format(n=4))
    assert eval_defined(spec, "attack", (1, 1, 2, 2))
    assert not eval_defined(spec, "attack", (1, 1, 2, 3))
    assert eval_defined(spec, "attack", (1, 2, 3, 2))
    ext = defined_extensions(spec)["attack"]
    for x1, y1, x2, y2 in itertools.product(range(1, 5), repeat=4):
        expected = y1 == y2 or y1 + x1 == y2 + x2 or y1 - x1 == y2 - x2
        assert ((x1, y1, x2, y2) in ext) == expected
    with pytest.raises(SpecError):
        eval_defined(spec, "pos", (1, 1))


def test_decompile():
    c = compile_spec(parse_spec(MODELGEN.format(n=4)))
    interp = c.decompile([2, 4, 1, 3])
    assert [interp.functions["pos"][(i,)] for i in range(1, 5)] == [2, 4, 1, 3]
    assert c.decompile([1, 2, 3, 4]).functions["pos"] == {(i,): i for i in range(1, 5)}
    with pytest.raises(StructuralError):
        c.decompile([2, 4, 1])
    with pytest.raises(StructuralError):
        c.decompile([2, 4, 1, None])


def test_decompile_open_atoms_all_zero():
    spec = parse_spec((SPECS / "coloring.dl").read_text())
    c = compile_spec(spec)
    assert c.decompile([0] * len(c.problem.vars)).delta() == []


def test_coloring_spec():
    spec = parse_spec((SPECS / "coloring.dl").read_text())
    c = compile_spec(spec)
    sols = solve_all(c.problem)
    edges = [(1, 2), (2, 3), (3, 4), (4, 1), (1, 3)]
    expected = sum(all(col[u - 1] != col[v - 1] for u, v in edges)
                   for col in itertools.product(range(1, 4), repeat=4))
    assert len(sols) == expected == 6
    for s in sols:
        assert check_interpretation(spec, c.decompile(s)) == []


def test_maintenance_objective_matches_enumeration():
    spec = parse_spec((SPECS / "maintenance.dl").read_text())
    c = compile_spec(spec)
    assignment, value = maximize(c.problem)
    dur, cap = {1: 2, 2: 3, 3: 1}, {1: 10, 2: 20, 3: 5}
    best = None
    for starts in itertools.product(range(1, 7), repeat=3):
        if any(s + dur[u] > 7 for u, s in zip((1, 2, 3), starts)):
            continue
        down = [[u for u, s in zip((1, 2, 3), starts) if s <= w < s + dur[u]] for w in range(1, 7)]
        if any(len(d) > 2 for d in down):
            continue
        v = min(35 - sum(cap[u] for u in d) for d in down)
        best = v if best is None else max(best, v)
    assert value == best
    interp = c.decompile(assignment)
    assert check_interpretation(spec, interp) == []
    assert objective_value(spec, interp) == best


def test_checker_reports_violations():
    spec = parse_spec(MODELGEN.format(n=4))
    ok = Interpretation({"pos": {(1,): 2, (2,): 4, (3,): 1, (4,): 3}}, {})
    assert check_interpretation(spec, ok) == []
    diag = Interpretation({"pos": {(1,): 1, (2,): 2, (3,): 3, (4,): 4}}, {})
    assert any("fails" in v for v in check_interpretation(spec, diag))
    dup = Interpretation({"pos": {(1,): 2, (2,): 4, (3,): 2, (4,): 3}}, {})
    assert any("injective" in v for v in check_interpretation(spec, dup))
    missing = Interpretation({"pos": {(1,): 2}}, {})
    assert any("undefined" in v for v in check_interpretation(spec, missing))


@pytest.mark.parametrize("text, pattern", [
    ("sort d = 1..3; pred p: d; pred q: d; def p(X) <- d(X), not q(X); def q(X) <- d(X), not p(X);",
     "stratif|negative"),
    ("sort d = 1..3; func f: d -> d; con f(X) != Y;", "sort|typed"),
    ("sort d = 1..3; con g(X) != 1 <- d(X);", "declared|unknown"),
    ("sort d = 3..1;", "empty"),
    ("sort d = 1..3; open o: d; pred p: d; def p(X) <- o(X);", "open"),
    ("sort d = 1..3; open o: d; con #count{X : o(X)} <= 1 <- d(X);", "shadow"),
    ("sort d = 1..3; func f: d -> d; con f(X) = 1 f(X) = 2;", "expected"),
    ("sort d = 1..3; func f: d -> d; sort f = 1..2;", "declared|twice|already"),
])
def test_spec_errors(text, pattern):
    with pytest.raises(SpecError, match=pattern):
        parse_spec(text)


def test_defined_head_outside_sort():
    with pytest.raises(SpecError, match="outside"):
        compile_spec(parse_spec("sort d = 1..3; pred p: d; def p(X + 1) <- d(X);"))


def test_shipped_specs_compile():
    counts = {"queens_modelgen.dl": 92, "queens_abductive.dl": 92, "queens_attack.dl": 92}
    for path in sorted(SPECS.glob("*.dl")):
        c = compile_spec(parse_spec(path.read_text()))
        if path.name in counts:
            assert len(solve_all(c.problem)) == counts[path.name]
