"""Reference grounder: every substitution, no pruning.

Each rule is instantiated for every assignment of its variables over the
integer universe of the domain extensions. Built-ins are evaluated, but
domain atoms stay in rule bodies as ordinary atoms, so a wrong instance
from the production grounder shows up as a different set of stable
models. Intended for small programs only (the work is exponential in the
number of rule variables).
"""
from __future__ import annotations

import itertools

from cspbench.errors import StructuralError
from cspbench.grounder.program import (
    AtomTable, GChoice, GConstraint, GroundAtom, GroundProgram, GWeight, make_normal,
)
from cspbench.lp import ast


def _val(t, env):
    if isinstance(t, ast.Const):
        return t.value
    if isinstance(t, ast.Var):
        if t.name not in env:
            raise StructuralError(f"unbound variable {t.name}")
        return env[t.name]
    vals = [_val(a, env) for a in t.args]
    r = {"+": lambda: vals[0] + vals[1], "-": lambda: vals[0] - vals[1], "abs": lambda: abs(vals[0])}[t.op]()
    if r.bit_length() > 63:
        raise StructuralError("integer overflow in grounding")
    return r


def _holds(b, env):
    x, y = _val(b.lhs, env), _val(b.rhs, env)
    return {"<": x < y, "<=": x <= y, "=": x == y, "!=": x != y}[b.rel]


def _inst(atom, env):
    return GroundAtom(atom.pred, tuple(_val(t, env) for t in atom.args))


def _vars(*things):
    out = []
    for th in things:
        if isinstance(th, ast.Atom):
            ast.atom_vars(th, out)
        elif isinstance(th, (ast.Lit, ast.Builtin)):
            ast.literal_vars(th, out)
        elif th is not None:
            ast.term_vars(th, out)
    return out


def _envs(names, universe, base=None):
    base = base or {}
    free = [n for n in names if n not in base]
    for combo in itertools.product(universe, repeat=len(free)):
        env = dict(base)
        env.update(zip(free, combo))
        yield env


def _extensions(program):
    dom = program.domain_predicates
    ext = {p: set() for p in dom}
    rules = []
    for r in program.rules:
        if isinstance(r, ast.DomainDecl):
            ext[r.pred].update((v,) for v in range(r.low, r.high + 1))
        elif isinstance(r, ast.Fact) and r.atom.pred in dom:
            ext[r.atom.pred].add(_inst(r.atom, {}).args)
        elif isinstance(r, ast.Normal) and r.head.pred in dom:
            rules.append(r)
    while True:
        universe = sorted({v for tuples in ext.values() for t in tuples for v in t})
        grew = False
        for r in rules:
            for env in _envs(_vars(r.head, *r.body), universe):
                ok = all(_holds(l, env) if isinstance(l, ast.Builtin) else _inst(l.atom, env).args in ext[l.atom.pred]
                         for l in r.body)
                if ok:
                    h = _inst(r.head, env)
                    if h.args not in ext[h.pred]:
                        ext[h.pred].add(h.args)
                        grew = True
        if not grew:
            return ext, universe


def naive_ground(program) -> GroundProgram:
    dom = program.domain_predicates
    ext, universe = _extensions(program)
    table = AtomTable()
    facts = set()
    for p in sorted(ext):
        for args in sorted(ext[p]):
            facts.add(table.add(GroundAtom(p, args)))
    for r in program.rules:
        if isinstance(r, ast.Fact) and r.atom.pred not in dom:
            facts.add(table.add(_inst(r.atom, {})))

    def guard_ok(guards, env):
        return all(_inst(g, env).args in ext[g.pred] for g in guards)

    rules = []
    for r in program.rules:
        if isinstance(r, (ast.DomainDecl, ast.Fact)):
            continue
        if isinstance(r, ast.Normal) and r.head.pred in dom:
            continue
        head = getattr(r, "head", None)
        extra = [r.bound] if isinstance(r, ast.AggregateBody) else []
        names = _vars(head, *r.body, *extra)
        for env in _envs(names, universe):
            if not all(_holds(l, env) for l in r.body if isinstance(l, ast.Builtin)):
                continue
            pos, neg = [], []
            for l in r.body:
                if isinstance(l, ast.Lit):
                    (pos if l.positive else neg).append(table.add(_inst(l.atom, env)))
            if isinstance(r, ast.Normal):
                g = make_normal(table.add(_inst(r.head, env)), pos, neg)
                if g is not None:
                    rules.append(g)
            elif isinstance(r, ast.IntegrityConstraint):
                rules.append(GConstraint(tuple(dict.fromkeys(pos)), tuple(dict.fromkeys(neg))))
            elif isinstance(r, ast.Choice):
                heads = []
                for e in r.elements:
                    for env2 in _envs(_vars(e.atom, *e.guards), universe, env):
                        if guard_ok(e.guards, env2):
                            heads.append(table.add(_inst(e.atom, env2)))
                heads = tuple(dict.fromkeys(heads))
                lo = r.lower or 0
                hi = len(heads) if r.upper is None else min(r.upper, len(heads))
                pos, neg = tuple(dict.fromkeys(pos)), tuple(dict.fromkeys(neg))
                if lo > len(heads):
                    rules.append(GConstraint(pos, neg))
                else:
                    rules.append(GChoice(lo, heads, hi, pos, neg))
            else:
                elems = []
                for e in r.elements:
                    for env2 in _envs(_vars(e.lit.atom, e.weight, *e.guards), universe, env):
                        if not guard_ok(e.guards, env2):
                            continue
                        w = 1 if e.weight is None else _val(e.weight, env2)
                        if w < 0:
                            raise StructuralError(f"negative weight {w} in aggregate")
                        if w:
                            elems.append((table.add(_inst(e.lit.atom, env2)), e.lit.positive, w))
                # aggregate bodies hold only domain atoms; test them directly
                if not all(_inst(l.atom, env).args in ext[l.atom.pred]
                           for l in r.body if isinstance(l, ast.Lit)):
                    continue
                h = table.add(_inst(r.head, env)) if r.head is not None else None
                rules.append(GWeight(h, _val(r.bound, env), tuple(elems)))
    return GroundProgram(table, tuple(rules), frozenset(facts))

