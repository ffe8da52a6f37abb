import pytest
from hypothesis import given, settings, strategies as st

from cspbench.lp import (
    AggregateBody, Arith, ArityError, Atom, Builtin, Choice, ChoiceElement, Const, DomainDecl,
    Fact, IntegrityConstraint, Lit, Normal, ParseError, ProgramError, RangeRestrictionError,
    Var, WeightedLiteral, parse_program, render, validate,
)

QUEENS = """\
d(1..8).
1 {pos(X,Y):d(Y)} 1 :- d(X).
1 {pos(X,Y):d(X)} 1 :- d(Y).
:- d(X1), d(Y1), d(X2), d(Y2), pos(X1,Y1), pos(X2,Y2),
   X1 < X2, X2 - X1 = abs(Y1 - Y2).
"""


def test_domain_decl():
    p = parse_program("d(1..8).")
    assert p.rules == (DomainDecl("d", 1, 8),)


def test_choice_rule_with_expansion():
    p = parse_program("d(1..3).\n1 {pos(X,Y):d(Y)} 1 :- d(X).")
    X, Y = Var("X"), Var("Y")
    assert p.rules[1] == Choice(1, (ChoiceElement(Atom("pos", (X, Y)), (Atom("d", (Y,)),)),), 1,
                                (Lit(Atom("d", (X,))),))


def test_queens_program_shape():
    p = parse_program(QUEENS)
    kinds = [type(r).__name__ for r in p.rules]
    assert kinds == ["DomainDecl", "Choice", "Choice", "IntegrityConstraint"]
    assert p.predicates == {"d": 1, "pos": 2}
    assert p.domain_predicates == {"d"}


def test_range_restriction_names_variable():
    with pytest.raises(RangeRestrictionError) as exc:
        parse_program(":- p(X).")
    assert exc.value.variable == "X"
    assert (exc.value.line, exc.value.col) == (1, 6)


def test_range_restriction_in_element():
    with pytest.raises(RangeRestrictionError) as exc:
        parse_program("d(1..2).\n{p(X,Y)} :- d(X).")
    assert exc.value.variable == "Y"


def test_guard_must_be_domain():
    with pytest.raises(ProgramError):
        parse_program("d(1..2). q(1) :- not r.\n{p(X):q(X)} :- d(X).")


def test_arity_clash():
    with pytest.raises(ArityError):
        parse_program("d(1..2). p(1). p(1,2).")


def test_syntax_error_position_and_expected():
    with pytest.raises(ParseError) as exc:
        parse_program("d(1..2).\np(X) :- d(X")
    assert exc.value.line == 2
    assert ")" in exc.value.expected


def test_function_symbols_rejected():
    with pytest.raises(ParseError):
        parse_program("p(f(1)).")


def test_bytes_input_and_bad_utf8():
    assert parse_program(b"a.").rules == (Fact(Atom("a")),)
    with pytest.raises(ParseError):
        parse_program(b"\xff\xfe")


def test_comments_and_crlf():
    p = parse_program("% header\r\na. % trailing\r\nb :- a.\r\n")
    assert len(p.rules) == 2


def test_greater_than_is_normalized():
    p = parse_program("d(1..3). p(X) :- d(X), d(Y), X > Y.")
    assert p.rules[1].body[2] == Builtin("<", Var("Y"), Var("X"))


def test_aggregate_rules():
    p = parse_program("""
        u(1..3). week(1..2).
        {maint(U,W)} :- u(U), week(W).
        :- 3 #count { maint(U,W) : u(U) }, week(W).
        ok :- 5 #sum { maint(U,1) = U : u(U); not maint(1,2) = 2 }.
    """)
    agg = p.rules[3]
    assert isinstance(agg, AggregateBody) and agg.head is None and agg.agg == "count"
    assert agg.bound == Const(3)
    s = p.rules[4]
    assert s.elements[1] == WeightedLiteral(Lit(Atom("maint", (Const(1), Const(2))), False), Const(2))


def test_two_aggregates_rejected():
    with pytest.raises(ParseError):
        parse_program("u(1..2). {m(U)} :- u(U). :- 1 #count{m(1)}, 1 #count{m(2)}.")


def test_sum_needs_weight():
    with pytest.raises(ParseError):
        parse_program("u(1..2). {m(U)} :- u(U). :- 1 #sum{m(1)}.")


@pytest.mark.parametrize("src", [
    "d(1..3).",
    "d(1..3).\n1 {pos(X,Y):d(Y)} 1 :- d(X).",
    "a :- not b.\nb :- not a.\n:- a, b.",
    "{a; b}.\n:- .",
    "d(-2..2). p(X - -1) :- d(X), X != 0.",
    QUEENS,
])
def test_round_trip(src):
    p = parse_program(src)
    again = parse_program(render(p))
    assert again == p
    assert parse_program(render(again)) == again


def test_choice_bounds_round_trip():
    p = parse_program("1 {a; b} 1.")
    r = parse_program(render(p)).rules[0]
    assert (r.lower, r.upper) == (1, 1)
    q = parse_program(":- a.")
    assert isinstance(parse_program(render(q)).rules[0], IntegrityConstraint)


def test_right_nested_arithmetic_keeps_parentheses():
    p = parse_program("d(1..3). p(X + (X - 1)) :- d(X).")
    head = p.rules[1].head.args[0]
    assert head == Arith("+", (Var("X"), Arith("-", (Var("X"), Const(1)))))
    assert parse_program(render(p)) == p


@settings(max_examples=300, deadline=None)
@given(st.text(alphabet=st.sampled_from(list("abdpqXY019(){}:-.,;<=!#%sumcount \n")), max_size=60))
def test_parser_is_total(text):
    try:
        parse_program(text)
    except ProgramError:
        pass


@settings(max_examples=100, deadline=None)
@given(st.binary(max_size=40))
def test_parser_is_total_on_bytes(data):
    try:
        parse_program(data)
    except ProgramError:
        pass


# --- random valid programs --------------------------------------------------

VARS = ["X", "Y", "Z"]


@st.composite
def terms(draw, names):
    base = st.builds(Const, st.integers(-3, 5))
    if names:
        base = st.one_of(base, st.sampled_from([Var(n) for n in names]))
    t = draw(base)
    for _ in range(draw(st.integers(0, 2))):
        op = draw(st.sampled_from(["+", "-", "abs"]))
        if op == "abs":
            t = Arith("abs", (t,))
        else:
            other = draw(base)
            t = Arith(op, (t, other) if draw(st.booleans()) else (other, t))
    return t


@st.composite
def programs(draw):
    rules = [DomainDecl("d", 1, draw(st.integers(1, 4))), Fact(Atom("e", (Const(draw(st.integers(0, 3))),)))]
    for _ in range(draw(st.integers(1, 5))):
        vs = VARS[:draw(st.integers(0, 2))]
        body = [Lit(Atom("d", (Var(v),))) for v in vs]
        if vs and draw(st.booleans()):
            body.append(Builtin(draw(st.sampled_from(["<", "<=", "=", "!="])),
                                draw(terms(vs)), draw(terms(vs))))
        if draw(st.booleans()):
            body.append(Lit(Atom("p", (draw(terms(vs)) if vs else Const(1),)), draw(st.booleans())))
        kind = draw(st.sampled_from(["normal", "choice", "constraint", "agg"]))
        if kind == "normal":
            rules.append(Normal(Atom("p", (draw(terms(vs)) if vs else Const(0),)), tuple(body)))
        elif kind == "constraint":
            rules.append(IntegrityConstraint(tuple(body)))
        elif kind == "choice":
            elem = ChoiceElement(Atom("p", (Var("W"),)), (Atom("d", (Var("W"),)),))
            lo = draw(st.none() | st.integers(0, 2))
            hi = draw(st.none() | st.integers(2, 3))
            rules.append(Choice(lo, (elem,), hi, tuple(body)))
        else:
            dom_body = tuple(b for b in body if not (isinstance(b, Lit) and b.atom.pred == "p"))
            elem = WeightedLiteral(Lit(Atom("p", (Var("W"),)), draw(st.booleans())),
                                   Var("W"), (Atom("d", (Var("W"),)),))
            rules.append(AggregateBody(draw(st.none() | st.just(Atom("q"))), "sum",
                                       draw(terms(vs)), (elem,), dom_body))
    return validate(rules)


@settings(max_examples=200, deadline=None)
@given(programs())
def test_render_parse_round_trip_property(prog):
    text = render(prog)
    assert parse_program(text) == prog
