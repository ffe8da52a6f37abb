import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from cspbench.errors import SearchTimeout, StructuralError
from cspbench.fd import (
    AllDifferent, CspProblem, FdDomain, FdSolver, Linear, MinOf, NotEqual, NotEqualOffset,
    OccupancyChannel, maximize, propagate, solve_all, solve_first,
)
from oracles import brute_force_solutions, describe, fd_holds


def queens(n):
    p = CspProblem()
    xs = p.new_vars(n, FdDomain.interval(1, n), "q")
    for i in range(n):
        for j in range(i + 1, n):
            p.add(NotEqual(xs[i], xs[j]))
            p.add(NotEqualOffset(xs[i], xs[j], j - i))
    return p


# --- propagate -------------------------------------------------------------

def test_propagate_not_equal_fixed():
    p = CspProblem()
    x = p.new_var([1, 2])
    y = p.new_var([1, 2])
    p.add(NotEqual(x, y))
    out = propagate(p, [FdDomain((1,)), FdDomain((1, 2))])
    assert out.fixpoint
    assert out.domains[y].values == (2,)


def test_propagate_offset_removes_both_diagonals():
    p = CspProblem()
    x = p.new_var([3])
    y = p.new_var(range(1, 6))
    p.add(NotEqualOffset(x, y, 2))
    out = propagate(p)
    # enumerate y: |3 - y| == 2 excludes 1 and 5
    expected = tuple(v for v in range(1, 6) if abs(3 - v) != 2)
    assert out.domains[y].values == expected == (2, 3, 4)


def test_propagate_alldifferent_pigeonhole_fails():
    p = CspProblem()
    xs = p.new_vars(3, [1, 2])
    p.add(AllDifferent(tuple(xs)))
    assert brute_force_solutions([(1, 2)] * 3, p.constraints) == []
    assert propagate(p).failure


def test_dangling_variable_is_structural():
    p = CspProblem()
    p.new_var([1])
    p.constraints.append(NotEqual(0, 5))
    with pytest.raises(StructuralError):
        propagate(p)
    with pytest.raises(StructuralError):
        p.add(NotEqual(0, 7))


def test_linear_overflow_is_structural():
    p = CspProblem()
    x = p.new_var([0, 2**62])
    p.add(Linear(((4, x),), "<=", 1))
    with pytest.raises(StructuralError):
        propagate(p)


def test_occupancy_domain_checked():
    p = CspProblem()
    s = p.new_var([0, 1])
    o = p.new_var([0, 1, 2])
    p.add(OccupancyChannel(s, 1, (o,)))
    with pytest.raises(StructuralError):
        propagate(p)


def test_propagation_is_deterministic():
    p = queens(7)
    a, b = propagate(p, [FdDomain((1,))] + [v.domain for v in p.vars[1:]]), None
    b = propagate(p, [FdDomain((1,))] + [v.domain for v in p.vars[1:]])
    assert a == b


# --- search ------------------------------------------------------------------

def test_solve_first_four_queens():
    oracle = brute_force_solutions([range(1, 5)] * 4, queens(4).constraints)
    assert sorted(oracle) == [(2, 4, 1, 3), (3, 1, 4, 2)]
    assert solve_first(queens(4)) in oracle


def test_solve_first_trivial():
    p = CspProblem()
    p.new_var([5])
    solver = FdSolver(p)
    assert solver.solve_first() == (5,)
    assert solver.stats.nodes >= 1 and solver.stats.backtracks == 0


def test_solve_first_unsat():
    p = CspProblem()
    x, y = p.new_var([1]), p.new_var([1])
    p.add(NotEqual(x, y))
    solver = FdSolver(p)
    assert solver.solve_first() is None
    assert solver.stats.backtracks == 0 and solver.stats.outcome == "unsat"


@pytest.mark.parametrize("n,count", [(4, 2), (6, 4)])
def test_solve_all_queens(n, count):
    oracle = brute_force_solutions([range(1, n + 1)] * n, queens(n).constraints)
    assert len(oracle) == count
    solver = FdSolver(queens(n))
    sols = solver.solve_all()
    assert sorted(sols) == sorted(oracle)
    assert solver.stats.nodes >= 2


def test_solve_all_unconstrained_product():
    p = CspProblem()
    p.new_var([1, 2])
    p.new_var([1, 2])
    assert sorted(solve_all(p)) == list(product((1, 2), (1, 2)))
    assert len(solve_all(p, limit=3)) == 3


def test_maximize_simple():
    p = CspProblem()
    x = p.new_var(range(1, 6))
    p.add(Linear(((1, x),), "!=", 5))
    p.objective = x
    assert maximize(p) == ((4,), 4)


def test_maximize_toy_schedule():
    # unit 1 (cap 10) maintained exactly one of 2 weeks, unit 2 (cap 20) never;
    # peak 5 each week. Reserve week w = 30 - 10*occ_w - 5.
    p = CspProblem()
    start = p.new_var([1, 2])
    occ = [p.new_var([0, 1]) for _ in range(2)]
    p.add(OccupancyChannel(start, 1, tuple(occ), offset=1))
    reserves = []
    for w in range(2):
        r = p.new_var(range(0, 31))
        p.add(Linear(((1, r), (10, occ[w])), "=", 30 - 5))
        reserves.append(r)
    z = p.new_var(range(0, 31))
    p.add(MinOf(z, tuple(reserves)))
    p.objective = z
    # both placements give weekly reserves {15, 25}... computed below
    best = max(min(30 - 10 * (w == s) - 5 for w in (1, 2)) for s in (1, 2))
    assert best == 15
    assert maximize(p)[1] == best


def test_maximize_infeasible_and_missing_objective():
    p = CspProblem()
    x, y = p.new_var([1]), p.new_var([1])
    p.add(NotEqual(x, y))
    p.objective = x
    assert maximize(p) is None
    p.objective = None
    with pytest.raises(StructuralError):
        maximize(p)


def test_timeout_raises_with_partial():
    solver = FdSolver(queens(12), budget=0.0, node_quantum=1)
    with pytest.raises(SearchTimeout) as exc:
        solver.solve_all()
    assert isinstance(exc.value.partial, list)
    assert solver.stats.outcome == "timeout"


def test_search_determinism():
    a, b = FdSolver(queens(8)), FdSolver(queens(8))
    assert a.solve_all() == b.solve_all()
    assert a.stats.nodes == b.stats.nodes


def test_first_fail_prefers_degree_then_id():
    p = CspProblem()
    a = p.new_var([1, 2, 3])
    b = p.new_var([1, 2])
    c = p.new_var([1, 2])
    d = p.new_var([1, 2, 3])
    p.add(NotEqual(c, d))
    solver = FdSolver(p)
    doms = p.domains()
    assert solver._select(doms) == c
    p2 = CspProblem()
    p2.new_var([1, 2])
    p2.new_var([1, 2])
    assert FdSolver(p2)._select(p2.domains()) == 0


# --- random problems against brute force ---------------------------------------

def random_problem(rng):
    p = CspProblem()
    n = rng.randint(1, 4)
    for _ in range(n):
        lo = rng.randint(-2, 2)
        vals = [v for v in range(lo, lo + rng.randint(1, 4)) if rng.random() < 0.85] or [lo]
        p.new_var(vals)
    for _ in range(rng.randint(0, 4)):
        kind = rng.choice(["ne", "off", "lin", "alldiff", "min"])
        ids = list(range(n))
        rng.shuffle(ids)
        if kind in ("ne", "off") and n >= 2:
            c = NotEqual(ids[0], ids[1]) if kind == "ne" else NotEqualOffset(ids[0], ids[1], rng.randint(0, 3))
        elif kind == "lin":
            k = rng.randint(1, n)
            c = Linear(tuple((rng.choice([-2, -1, 1, 2, 3]), v) for v in ids[:k]),
                       rng.choice(["<=", "=", "!="]), rng.randint(-4, 6))
        elif kind == "alldiff" and n >= 2:
            c = AllDifferent(tuple(ids[:rng.randint(2, n)]))
        elif kind == "min" and n >= 2:
            c = MinOf(ids[0], tuple(ids[1:rng.randint(2, n)]))
        else:
            continue
        p.add(c)
    return p


def test_random_problems_match_brute_force():
    rng = random.Random(7)
    for _ in range(300):
        p = random_problem(rng)
        oracle = brute_force_solutions([v.domain.values for v in p.vars], p.constraints)
        got = solve_all(p)
        assert sorted(got) == sorted(oracle)
        assert len(set(got)) == len(got)
        for a in got:
            assert all(fd_holds(*describe(c), a) for c in p.constraints)


def test_maximize_matches_brute_force():
    rng = random.Random(11)
    for _ in range(150):
        p = random_problem(rng)
        p.objective = rng.randrange(len(p.vars))
        oracle = brute_force_solutions([v.domain.values for v in p.vars], p.constraints)
        got = maximize(p)
        if not oracle:
            assert got is None
        else:
            assert got[1] == max(a[p.objective] for a in oracle)
            assert p.is_solution(got[0])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 6), min_size=2, max_size=5, unique=True),
       st.lists(st.integers(1, 6), min_size=1, max_size=5, unique=True),
       st.integers(0, 4))
def test_offset_propagation_keeps_only_supported(dx, dy, c):
    p = CspProblem()
    x, y = p.new_var(dx), p.new_var(dy)
    p.add(NotEqualOffset(x, y, c))
    out = propagate(p)
    sols = brute_force_solutions([sorted(dx), sorted(dy)], p.constraints)
    if not sols:
        assert out.failure
    else:
        assert out.domains[x].values == tuple(sorted({a for a, _ in sols}))
        assert out.domains[y].values == tuple(sorted({b for _, b in sols}))
