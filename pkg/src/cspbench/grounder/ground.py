"""Instantiation of range-restricted rule programs.

Domain predicates (intervals, facts, and negation-free rules over other
domain predicates) are evaluated completely; every other rule is
instantiated by joining its positive domain atoms left to right, in
lexicographic order of each extension, with built-ins checked as soon as
their variables are bound. Each join step looks up only the tuples that
agree with the already bound argument positions (hash index per pattern). Domain atoms and facts are absorbed into the
fact set.
"""
from __future__ import annotations

import logging
import time

from cspbench.errors import StructuralError
from cspbench.grounder.program import (
    AtomTable, GChoice, GConstraint, GroundAtom, GroundProgram, GWeight, make_normal,
)
from cspbench.lp.ast import (
    AggregateBody, Arith, Builtin, Choice, Const, DomainDecl, Fact, IntegrityConstraint, Lit,
    Normal, Var, literal_vars, term_vars,
)

log = logging.getLogger(__name__)

_MAXI = 2**63 - 1
_MINI = -2**63
MAX_EXTENSION = 1_000_000


def _check(v):
    if not _MINI <= v <= _MAXI:
        raise StructuralError(f"integer overflow in grounding ({v})")
    return v


def eval_term(t, subst) -> int:
    if isinstance(t, Const):
        return t.value
    if isinstance(t, Var):
        try:
            return subst[t.name]
        except KeyError:
            raise StructuralError(f"unbound variable {t.name}") from None
    if t.op == "abs":
        return _check(abs(eval_term(t.args[0], subst)))
    a, b = eval_term(t.args[0], subst), eval_term(t.args[1], subst)
    return _check(a + b if t.op == "+" else a - b)


def eval_builtin(rel, lhs, rhs, subst=None) -> bool:
    """Compare two terms (or plain ints) under ``subst``."""
    subst = subst or {}
    a = lhs if isinstance(lhs, int) else eval_term(lhs, subst)
    b = rhs if isinstance(rhs, int) else eval_term(rhs, subst)
    if rel == "<":
        return a < b
    if rel == "<=":
        return a <= b
    if rel == "=":
        return a == b
    if rel == "!=":
        return a != b
    raise StructuralError(f"unknown relation {rel!r}")


def ground_atom(atom, subst) -> GroundAtom:
    return GroundAtom(atom.pred, tuple(eval_term(t, subst) for t in atom.args))


class _Join:
    """Left-to-right join of positive domain atoms with early built-in checks."""

    def __init__(self, ext):
        self.ext = ext
        self._index = {}

    def _candidates(self, atom, subst):
        """Tuples of ``atom.pred`` agreeing with the already bound argument positions."""
        pos, key = [], []
        for i, t in enumerate(atom.args):
            if isinstance(t, Var):
                if t.name in subst:
                    pos.append(i)
                    key.append(subst[t.name])
            else:
                pos.append(i)
                key.append(eval_term(t, subst))
        tuples = self.ext.get(atom.pred, ())
        if not pos:
            return tuples
        pos = tuple(pos)
        idx = self._index.get((atom.pred, pos))
        if idx is None:
            idx = {}
            for tup in tuples:  # buckets keep the lexicographic order
                idx.setdefault(tuple(tup[i] for i in pos), []).append(tup)
            self._index[(atom.pred, pos)] = idx
        return idx.get(tuple(key), ())

    def run(self, atoms, builtins, subst):
        atoms = list(atoms)
        pending = list(builtins)
        yield from self._step(atoms, pending, dict(subst))

    def _ready(self, atom, subst):
        for t in atom.args:
            if isinstance(t, Arith) and any(v not in subst for v in term_vars(t)):
                return False
        return True

    def _step(self, atoms, pending, subst):
        still = []
        for b in pending:
            if all(v in subst for v in literal_vars(b)):
                if not eval_builtin(b.rel, b.lhs, b.rhs, subst):
                    return
            else:
                still.append(b)
        if not atoms:
            if still:
                raise StructuralError("built-in with unbound variables after join")
            yield subst
            return
        idx = next((i for i, a in enumerate(atoms) if self._ready(a, subst)), None)
        if idx is None:
            raise StructuralError("cannot order domain atoms for the join")
        atom = atoms[idx]
        rest = atoms[:idx] + atoms[idx + 1:]
        cands = self._candidates(atom, subst)
        free = [(i, t.name) for i, t in enumerate(atom.args) if isinstance(t, Var) and t.name not in subst]
        for tup in cands:
            new = subst
            ok = True
            for i, name in free:
                cur = new.get(name)
                if cur is None:
                    if new is subst:
                        new = dict(subst)
                    new[name] = tup[i]
                elif cur != tup[i]:
                    ok = False
                    break
            if ok:
                yield from self._step(rest, still, new)


def _domain_extensions(program):
    dom = program.domain_predicates
    ext: dict[str, set] = {p: set() for p in dom}
    rules = []
    for r in program.rules:
        if isinstance(r, DomainDecl) and r.pred in dom:
            ext[r.pred].update((v,) for v in range(r.low, r.high + 1))
        elif isinstance(r, Fact) and r.atom.pred in dom:
            ext[r.atom.pred].add(ground_atom(r.atom, {}).args)
        elif isinstance(r, Normal) and r.head.pred in dom:
            rules.append(r)
    changed = True
    while changed:
        changed = False
        snapshot = {p: sorted(v) for p, v in ext.items()}
        join = _Join(snapshot)
        for r in rules:
            atoms = [l.atom for l in r.body if isinstance(l, Lit)]
            blts = [l for l in r.body if isinstance(l, Builtin)]
            for s in join.run(atoms, blts, {}):
                g = ground_atom(r.head, s).args
                if g not in ext[r.head.pred]:
                    ext[r.head.pred].add(g)
                    changed = True
                    if len(ext[r.head.pred]) > MAX_EXTENSION:
                        raise StructuralError(f"extension of {r.head.pred} exceeds {MAX_EXTENSION} atoms")
    return {p: sorted(v) for p, v in ext.items()}


class Grounder:
    def __init__(self, program):
        self.program = program
        self.dom = program.domain_predicates
        self.warnings: list[str] = []
        self.ext = _domain_extensions(program)
        self.ext_sets = {p: set(v) for p, v in self.ext.items()}
        self.join = _Join(self.ext)
        self.table = AtomTable()
        self.facts: set[int] = set()
        self.fact_atoms: set[GroundAtom] = set()
        self.rules: list = []
        self.dropped = 0

    def _is_true(self, ga):
        if ga.pred in self.dom:
            return ga.args in self.ext_sets[ga.pred]
        return ga in self.fact_atoms

    def _split_body(self, body):
        dom_atoms, builtins, others = [], [], []
        for lit in body:
            if isinstance(lit, Builtin):
                builtins.append(lit)
            elif lit.positive and lit.atom.pred in self.dom:
                dom_atoms.append(lit.atom)
            else:
                others.append(lit)
        for a in dom_atoms:
            if not self.ext.get(a.pred):
                self.warnings.append(f"domain predicate {a.pred} has an empty extension; rule vanishes")
        return dom_atoms, builtins, others

    def _body_ids(self, others, subst):
        """Ground the non-domain literals; None when the body is trivially false."""
        pos, neg = [], []
        for lit in others:
            ga = ground_atom(lit.atom, subst)
            domain = ga.pred in self.dom
            true = self._is_true(ga)
            if lit.positive:
                if true:
                    continue
                if domain:
                    return None
                pos.append(self.table.add(ga))
            else:
                if true:
                    return None
                if domain:
                    continue
                neg.append(self.table.add(ga))
        return pos, neg

    def _expand(self, guards, subst):
        if not guards:
            yield subst
            return
        yield from self.join.run(guards, [], subst)

    def ground(self) -> GroundProgram:
        t0 = time.perf_counter()
        for pred in sorted(self.ext):
            for args in self.ext[pred]:
                self.facts.add(self.table.add(GroundAtom(pred, args)))
        for r in self.program.rules:
            if isinstance(r, Fact) and r.atom.pred not in self.dom:
                ga = ground_atom(r.atom, {})
                self.fact_atoms.add(ga)
                self.facts.add(self.table.add(ga))
        for r in self.program.rules:
            if isinstance(r, (DomainDecl, Fact)):
                continue
            if isinstance(r, Normal) and r.head.pred in self.dom:
                continue
            self._ground_rule(r)
        gp = GroundProgram(self.table, tuple(self.rules), frozenset(self.facts))
        gp.stats = {
            "atoms": len(self.table),
            "rules": len(self.rules),
            "facts": len(self.facts),
            "dropped_instances": self.dropped,
            "warnings": list(dict.fromkeys(self.warnings)),
            "seconds": time.perf_counter() - t0,
        }
        for w in gp.stats["warnings"]:
            log.warning(w)
        return gp

    def _ground_rule(self, r):
        dom_atoms, builtins, others = self._split_body(r.body)
        for s in self.join.run(dom_atoms, builtins, {}):
            body = self._body_ids(others, s)
            if body is None:
                self.dropped += 1
                continue
            pos, neg = body
            if isinstance(r, Normal):
                ga = ground_atom(r.head, s)
                if ga in self.fact_atoms:
                    continue
                rule = make_normal(self.table.add(ga), pos, neg)
                if rule is not None:
                    self.rules.append(rule)
            elif isinstance(r, IntegrityConstraint):
                self.rules.append(GConstraint(tuple(dict.fromkeys(pos)), tuple(dict.fromkeys(neg))))
            elif isinstance(r, Choice):
                self._emit_choice(r, s, pos, neg)
            elif isinstance(r, AggregateBody):
                self._emit_weight(r, s)
            else:
                raise TypeError(r)

    def _emit_choice(self, r, s, pos, neg):
        heads = []
        for e in r.elements:
            for s2 in self._expand(e.guards, s):
                heads.append(self.table.add(ground_atom(e.atom, s2)))
        heads = list(dict.fromkeys(heads))
        lower = 0 if r.lower is None else r.lower
        upper = len(heads) if r.upper is None else min(r.upper, len(heads))
        pos, neg = tuple(dict.fromkeys(pos)), tuple(dict.fromkeys(neg))
        if lower > len(heads):
            self.rules.append(GConstraint(pos, neg))
            return
        self.rules.append(GChoice(lower, tuple(heads), upper, pos, neg))

    def _emit_weight(self, r, s):
        lower = eval_term(r.bound, s)
        elems = []
        for e in r.elements:
            for s2 in self._expand(e.guards, s):
                w = 1 if e.weight is None else eval_term(e.weight, s2)
                if w < 0:
                    raise StructuralError(f"negative weight {w} in aggregate")
                if w == 0:
                    continue
                ga = ground_atom(e.lit.atom, s2)
                if ga.pred in self.dom or ga in self.fact_atoms:
                    if self._is_true(ga) == e.lit.positive:
                        lower -= w
                    continue
                elems.append((self.table.add(ga), e.lit.positive, w))
        head = None
        if r.head is not None:
            ga = ground_atom(r.head, s)
            if ga in self.fact_atoms:
                return
            head = self.table.add(ga)
        self.rules.append(GWeight(head, lower, tuple(elems)))


def ground(program) -> GroundProgram:
    """Instantiate ``program`` (a validated :class:`RuleProgram`)."""
    return Grounder(program).ground()
