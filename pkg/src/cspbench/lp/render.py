from __future__ import annotations

from cspbench.lp.ast import (
    AggregateBody, Arith, Atom, Builtin, Choice, Const, DomainDecl, Fact, IntegrityConstraint,
    Normal, RuleProgram, Var,
)


def render_term(t) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        return str(t.value)
    if t.op == "abs":
        return f"abs({render_term(t.args[0])})"
    left, right = t.args
    r = render_term(right)
    if isinstance(right, Arith) and right.op != "abs":
        r = f"({r})"
    return f"{render_term(left)} {t.op} {r}"


def render_atom(a: Atom) -> str:
    if not a.args:
        return a.pred
    return f"{a.pred}({','.join(render_term(t) for t in a.args)})"


def render_literal(lit) -> str:
    if isinstance(lit, Builtin):
        return f"{render_term(lit.lhs)} {lit.rel} {render_term(lit.rhs)}"
    return render_atom(lit.atom) if lit.positive else f"not {render_atom(lit.atom)}"


def _guards(gs):
    return f" : {', '.join(render_atom(g) for g in gs)}" if gs else ""


def render_rule(r) -> str:
    if isinstance(r, DomainDecl):
        return f"{r.pred}({r.low}..{r.high})."
    if isinstance(r, Fact):
        return f"{render_atom(r.atom)}."
    body = ", ".join(render_literal(x) for x in getattr(r, "body", ()))
    if isinstance(r, Normal):
        return f"{render_atom(r.head)} :- {body}." if body else f"{render_atom(r.head)} :- ."
    if isinstance(r, IntegrityConstraint):
        return f":- {body}."
    if isinstance(r, Choice):
        elems = "; ".join(render_atom(e.atom) + _guards(e.guards) for e in r.elements)
        text = "{" + elems + "}"
        if r.lower is not None:
            text = f"{r.lower} {text}"
        if r.upper is not None:
            text = f"{text} {r.upper}"
        return f"{text} :- {body}." if body else f"{text}."
    if isinstance(r, AggregateBody):
        elems = []
        for e in r.elements:
            s = render_literal(e.lit)
            if e.weight is not None:
                s += f" = {render_term(e.weight)}"
            elems.append(s + _guards(e.guards))
        agg = f"{render_term(r.bound)} #{r.agg} {{{'; '.join(elems)}}}"
        rest = f"{agg}, {body}" if body else agg
        head = f"{render_atom(r.head)} " if r.head is not None else ""
        return f"{head}:- {rest}."
    raise TypeError(f"not a rule: {r!r}")


def render(program: RuleProgram) -> str:
    return "".join(render_rule(r) + "\n" for r in program.rules)
