"""Evaluation shared by the compiler and the direct checker.

:class:`Evaluator` enumerates the variable assignments that satisfy the
*static* literals of a conjunction: sort atoms, defined predicates and
comparisons whose terms can be computed. Subclasses decide what else is
static (the checker treats function tables and open atoms as static; the
compiler does not).
"""
from __future__ import annotations

from cspbench.declar.ast import Abs, Agg, Atom, Bin, Cmp, FTerm, Num, SpecError, Var, compare
from cspbench.declar.parser import lit_vars, term_vars


class NonStatic(Exception):
    """Raised while evaluating a term that depends on the unknown solution."""


class Evaluator:
    def __init__(self, spec, ext=None):
        self.spec = spec
        self.ext = ext if ext is not None else defined_extensions(spec)

    # hooks
    def atom_ext(self, pred):
        """Set of true tuples for ``pred`` or None if not static."""
        k = self.spec.kind(pred)
        if k == "sort":
            s = self.spec.sorts[pred]
            return _SortExt(s.low, s.high)
        if k == "pred":
            return self.ext[pred]
        return None

    def fterm(self, t, subst):
        raise NonStatic

    def agg(self, t, subst):
        raise NonStatic

    # evaluation
    def value(self, t, subst):
        if isinstance(t, Num):
            return t.value
        if isinstance(t, Var):
            return subst[t.name]
        if isinstance(t, Bin):
            a, b = self.value(t.left, subst), self.value(t.right, subst)
            return a + b if t.op == "+" else a - b
        if isinstance(t, Abs):
            return abs(self.value(t.arg, subst))
        if isinstance(t, FTerm):
            return self.fterm(t, subst)
        if isinstance(t, Agg):
            return self.agg(t, subst)
        raise TypeError(t)

    def is_static(self, lit):
        try:
            if isinstance(lit, Atom):
                if self.atom_ext(lit.pred) is None:
                    return False
                return all(_static_term(self, a) for a in lit.args)
            return _static_term(self, lit.lhs) and _static_term(self, lit.rhs)
        except NonStatic:
            return False

    def holds(self, lit, subst):
        if isinstance(lit, Cmp):
            return compare(lit.rel, self.value(lit.lhs, subst), self.value(lit.rhs, subst))
        args = tuple(self.value(a, subst) for a in lit.args)
        return (args in self.atom_ext(lit.pred)) == lit.positive

    def solutions(self, lits, types, subst=None, need=()):
        """Assignments extending ``subst`` that bind every variable of the static
        literals (plus ``need``) and satisfy them."""
        static = [x for x in lits if self.is_static(x)]
        want = set(need)
        for x in static:
            lit_vars(x, want)
        missing = [v for v in want if v not in types]
        if missing:
            raise SpecError(f"variable {missing[0]} has no sort")
        yield from self._join(static, dict(subst or {}), sorted(want), types)

    def _join(self, lits, subst, want, types):
        rest = []
        for x in lits:
            vs = lit_vars(x, set())
            if all(v in subst for v in vs):
                if not self.holds(x, subst):
                    return
            else:
                rest.append(x)
        for x in rest:
            if isinstance(x, Atom) and x.positive and all(
                    isinstance(a, Var) or all(v in subst for v in term_vars(a, set())) for a in x.args):
                others = [y for y in rest if y is not x]
                for tup in self.atom_ext(x.pred):
                    new = dict(subst)
                    ok = True
                    for a, val in zip(x.args, tup):
                        if isinstance(a, Var):
                            cur = new.get(a.name)
                            if cur is None:
                                new[a.name] = val
                            elif cur != val:
                                ok = False
                                break
                        elif self.value(a, new) != val:
                            ok = False
                            break
                    if ok:
                        yield from self._join(others, new, want, types)
                return
        free = next((v for v in want if v not in subst), None)
        if free is None:
            if rest:
                raise SpecError("literal with unbound variables")
            yield subst
            return
        for val in self.spec.sorts[types[free]].values:
            new = dict(subst)
            new[free] = val
            yield from self._join(rest, new, want, types)


def _static_term(ev, t):
    if isinstance(t, (Num, Var)):
        return True
    if isinstance(t, Bin):
        return _static_term(ev, t.left) and _static_term(ev, t.right)
    if isinstance(t, Abs):
        return _static_term(ev, t.arg)
    if isinstance(t, FTerm):
        return ev.static_functions and all(_static_term(ev, a) for a in t.args)
    if isinstance(t, Agg):
        return ev.static_aggregates
    return False


Evaluator.static_functions = False
Evaluator.static_aggregates = False


class _SortExt:
    """Membership view of a sort as a set of 1-tuples."""

    def __init__(self, lo, hi):
        self.lo, self.hi = lo, hi

    def __contains__(self, tup):
        return len(tup) == 1 and self.lo <= tup[0] <= self.hi

    def __iter__(self):
        return ((v,) for v in range(self.lo, self.hi + 1))


def _strata(spec):
    level = {p: 0 for p in spec.preds}
    for _ in range(len(level) + 1):
        changed = False
        for r in spec.rules:
            h = r.head.pred
            for x in r.body:
                if isinstance(x, Atom) and x.pred in spec.preds:
                    need = level[x.pred] + (0 if x.positive else 1)
                    if level[h] < need:
                        level[h] = need
                        changed = True
        if not changed:
            return level
    raise SpecError("defined predicates are not stratified")


def defined_extensions(spec) -> dict:
    """Extensions of all defined predicates (stratified least model)."""
    ext = {p: set() for p in spec.preds}
    level = _strata(spec)
    ev = Evaluator(spec, ext)
    for lv in sorted(set(level.values())):
        rules = [r for r in spec.rules if level[r.head.pred] == lv]
        changed = True
        while changed:
            changed = False
            for r in rules:
                for s in list(ev.solutions(r.body, r.types, need=lit_vars(r.head, set()))):
                    tup = tuple(ev.value(a, s) for a in r.head.args)
                    sorts = spec.preds[r.head.pred].args
                    if any(not spec.sorts[so].low <= v <= spec.sorts[so].high for v, so in zip(tup, sorts)):
                        raise SpecError(f"{r.head.pred}{tup} lies outside its declared sorts", r.line)
                    if tup not in ext[r.head.pred]:
                        ext[r.head.pred].add(tup)
                        changed = True
    return {p: frozenset(v) for p, v in ext.items()}


def eval_defined(spec, pred, args, ext=None) -> bool:
    """Truth of ``pred(args)`` under the stratified semantics of the definitions."""
    if pred not in spec.preds:
        raise SpecError(f"{pred} is not a defined predicate")
    ext = ext if ext is not None else defined_extensions(spec)
    return tuple(args) in ext[pred]
