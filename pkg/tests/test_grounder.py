import itertools

import pytest

from cspbench.errors import StructuralError
from cspbench.grounder import (
    GChoice, GConstraint, GroundAtom, GWeight, eval_builtin, ground, naive_ground, read_ground,
    write_ground,
)
from cspbench.lp import Arith, Const, parse_program
from cspbench.stable import solve_stable

from gen import random_rule_program

QUEENS = """d(1..{n}).
1 {{pos(X,Y):d(Y)}} 1 :- d(X).
1 {{pos(X,Y):d(X)}} 1 :- d(Y).
:- d(X1), d(Y1), d(X2), d(Y2), pos(X1,Y1), pos(X2,Y2), X1 < X2, X2 - X1 = abs(Y1 - Y2).
"""


def diagonal_count(n):
    """Quadruples (X1,Y1,X2,Y2) surviving X1 < X2 and X2 - X1 = |Y1 - Y2|."""
    r = range(1, n + 1)
    return sum(1 for x1, y1, x2, y2 in itertools.product(r, r, r, r)
               if x1 < x2 and x2 - x1 == abs(y1 - y2))


def names(gp, ids):
    return {gp.name(i) for i in ids}


def test_domain_rule_becomes_facts():
    gp = ground(parse_program("d(1..2). q(X) :- d(X)."))
    assert names(gp, gp.facts) == {"d(1)", "d(2)", "q(1)", "q(2)"}
    assert gp.rules == ()


def test_choice_expansion():
    gp = ground(parse_program("d(1..2). 1 {pos(1,Y):d(Y)} 1."))
    (r,) = gp.rules
    assert isinstance(r, GChoice) and (r.lower, r.upper) == (1, 1)
    assert names(gp, r.heads) == {"pos(1,1)", "pos(1,2)"}


@pytest.mark.parametrize("n", [4, 5, 6])
def test_queens_instance_counts(n):
    gp = ground(parse_program(QUEENS.format(n=n)))
    cons = [r for r in gp.rules if isinstance(r, GConstraint)]
    assert len(cons) == diagonal_count(n)
    assert sum(isinstance(r, GChoice) for r in gp.rules) == 2 * n
    if n == 4:
        assert len(cons) == 28


def test_eval_builtin():
    two_minus_one = Arith("-", (Const(2), Const(1)))
    assert eval_builtin("=", two_minus_one, Arith("abs", (Arith("-", (Const(1), Const(2))),)))
    assert not eval_builtin("<", Const(3), Const(3))
    assert not eval_builtin("!=", Arith("abs", (Arith("-", (Const(1), Const(4))),)), Const(3))


def test_unbound_and_overflow():
    from cspbench.lp import Var
    with pytest.raises(StructuralError):
        eval_builtin("<", Var("X"), Const(1))
    big = 2**62
    with pytest.raises(StructuralError):
        ground(parse_program(f"d({big}..{big}). p(X + X) :- d(X)."))


def test_empty_extension_warns():
    p = parse_program("e(1) :- e(2). p(X) :- e(X), not q.")
    gp = ground(p)
    assert gp.rules == ()
    assert any("empty extension" in w for w in gp.stats["warnings"])


def test_fact_absorption():
    gp = ground(parse_program("d(1..3). b(2). p(X) :- d(X), not b(X), not c(X). c(3)."))
    rules = {(gp.name(r.head), tuple(gp.name(a) for a in r.neg)) for r in gp.rules}
    # b and c are domain predicates, so both negations are decided at grounding time
    assert rules == {("p(1)", ())}
    gp = ground(parse_program("d(1..3). {c(X)} :- d(X), X > 2. p(X) :- d(X), not c(X)."))
    rules = {(gp.name(r.head), tuple(gp.name(a) for a in r.neg)) for r in gp.rules if hasattr(r, "head")}
    assert ("p(3)", ("c(3)",)) in rules and ("p(1)", ("c(1)",)) in rules


def test_aggregate_absorbs_domain_elements():
    gp = ground(parse_program("u(1..3). {m(U)} :- u(U). ok :- 3 #sum {m(U) = U : u(U); u(1) = 1}."))
    (w,) = [r for r in gp.rules if isinstance(r, GWeight)]
    assert w.lower == 2 and len(w.elements) == 3


def test_negative_weight_rejected():
    with pytest.raises(StructuralError):
        ground(parse_program("u(1..2). {m(U)} :- u(U). ok :- 1 #sum {m(U) = U - 2 : u(U)}."))


def test_text_format_round_trip():
    gp = ground(parse_program(QUEENS.format(n=5) + "\nok :- 2 #count{pos(1,Y) : d(Y)}.\nx :- not ok, d(1)."))
    text = write_ground(gp)
    assert read_ground(text) == gp
    assert text.startswith("#atoms\n1 d(1)\n")


def test_deterministic():
    src = QUEENS.format(n=5)
    assert write_ground(ground(parse_program(src))) == write_ground(ground(parse_program(src)))


def test_naive_keeps_domain_atoms_in_bodies():
    p = parse_program("d(1..2). {p(X)} :- d(X).")
    gp = naive_ground(p)
    heads = [r for r in gp.rules if isinstance(r, GChoice)]
    assert all(len(r.pos) == 1 for r in heads)
    assert gp.atoms.get(GroundAtom("d", (1,)))


@pytest.mark.parametrize("seed", range(40))
def test_naive_and_production_agree(seed):
    p = parse_program(random_rule_program(seed))
    a, b = ground(p), naive_ground(p)
    ma = {frozenset(a.model_names(m)) for m in solve_stable(a)}
    mb = {frozenset(b.model_names(m)) for m in solve_stable(b)}
    assert ma == mb
