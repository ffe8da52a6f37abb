"""Compilation of specifications into finite-domain problems.

Two schemes are offered:

``cells``
    one FD variable per function cell (value = function value). Value
    variables of open-function atoms that only feed comparisons are
    replaced by the cell itself; otherwise 0/1 indicator variables are
    channelled to the cell on demand.
``atoms``
    the explicit encoding: one 0/1 variable per function atom ``f(t, v)``
    and a constraint that exactly one value is chosen per cell. Kept as an
    alternative path for testing; it does not support ``occupy``.

Statements are instantiated over the sort extensions with static literals
(sort atoms, defined predicates, comparisons over known values) evaluated
at compile time, so instances with a false guard are never emitted.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from cspbench.declar.ast import (
    Abs, Agg, Atom, Bin, Cmp, Con, FTerm, Interpretation, Num, SpecError, Var, compare,
)
from cspbench.declar.parser import lit_vars, term_vars
from cspbench.declar.semantics import Evaluator, NonStatic
from cspbench.errors import StructuralError
from cspbench.fd import (
    AllDifferent, CspProblem, FdDomain, Linear, MinOf, NotEqual, NotEqualOffset, OccupancyChannel,
)

ENUM_CAP = 200_000


class _NonLinear(Exception):
    pass


@dataclass
class Compiled:
    problem: CspProblem
    spec: object
    scheme: str
    cells: dict = field(default_factory=dict)        # (f, args) -> var
    indicators: dict = field(default_factory=dict)   # (f, args, value) -> var
    atom_vars: dict = field(default_factory=dict)    # (pred, args) -> var
    infeasible: bool = False
    stats: dict = field(default_factory=dict)

    def decompile(self, assignment) -> Interpretation:
        """Function tables and true open atoms of a total assignment."""
        if assignment is None or len(assignment) != len(self.problem.vars):
            raise StructuralError("decompile needs a total assignment")
        if any(v is None for v in assignment):
            raise StructuralError("decompile needs a total assignment")
        funcs = {f: {} for f in self.spec.funcs}
        if self.scheme == "cells":
            for (f, args), v in self.cells.items():
                funcs[f][args] = assignment[v]
        else:
            for (f, args, val), v in self.indicators.items():
                if assignment[v] == 1:
                    if args in funcs[f]:
                        raise StructuralError(f"{f}{args} has two values")
                    funcs[f][args] = val
        atoms = {p: set() for p in self.spec.opens}
        for (p, args), v in self.atom_vars.items():
            if assignment[v] == 1:
                atoms[p].add(args)
        return Interpretation(funcs, {p: frozenset(s) for p, s in atoms.items()})


class _Lin:
    """Linear expression: {var: coef} plus constant."""

    __slots__ = ("coef", "const")

    def __init__(self, coef=None, const=0):
        self.coef = dict(coef or {})
        self.const = const

    def add(self, other, sign=1):
        out = _Lin(self.coef, self.const + sign * other.const)
        for v, c in other.coef.items():
            out.coef[v] = out.coef.get(v, 0) + sign * c
            if out.coef[v] == 0:
                del out.coef[v]
        return out

    def scale(self, k):
        return _Lin({v: c * k for v, c in self.coef.items() if c * k}, self.const * k)


class Compiler:
    def __init__(self, spec, scheme="cells"):
        if scheme not in ("cells", "atoms"):
            raise ValueError(f"unknown scheme {scheme!r}")
        self.spec = spec
        self.scheme = scheme
        self.ev = Evaluator(spec)
        self.p = CspProblem()
        self.out = Compiled(self.p, spec, scheme)
        self.occupied = set()
        self.counts = {}

    # -- variables ----------------------------------------------------------
    def _cells(self):
        spec = self.spec
        for f in spec.funcs.values():
            rng = spec.sorts[f.range]
            cells = list(itertools.product(*(spec.sort_values(s) for s in f.args)))
            if f.prop == "bijective" and len(cells) != len(rng.values):
                raise SpecError(f"bijective {f.name} maps {len(cells)} cells onto {len(rng.values)} values", f.line)
            if self.scheme == "cells":
                vs = [self.p.new_var(FdDomain.interval(rng.low, rng.high), f"{f.name}{c}") for c in cells]
                self.out.cells.update(zip(((f.name, c) for c in cells), vs))
                if f.prop != "none" and len(vs) > 1:
                    self._emit(AllDifferent(tuple(vs)))
            else:
                for c in cells:
                    row = []
                    for val in rng.values:
                        v = self.p.new_var(FdDomain((0, 1)), f"{f.name}{c + (val,)}")
                        self.out.indicators[(f.name, c, val)] = v
                        row.append(v)
                    self._emit(Linear(tuple((1, v) for v in row), "=", 1))
                if f.prop != "none":
                    rel = "=" if f.prop == "bijective" else "<="
                    for val in rng.values:
                        col = tuple((1, self.out.indicators[(f.name, c, val)]) for c in cells)
                        if len(col) > 1 or rel == "=":
                            self._emit(Linear(col, rel, 1))

    def _opens(self):
        spec = self.spec
        self.occupied = {o.atom.pred for o in spec.occupies}
        for p, d in spec.opens.items():
            if p in self.occupied:
                continue
            for tup in itertools.product(*(spec.sort_values(s) for s in d.args)):
                self.out.atom_vars[(p, tup)] = self.p.new_var(FdDomain((0, 1)), f"{p}{tup}")

    def indicator(self, f, args, val):
        """Var for ``f(args) = val`` (None when the value is out of range)."""
        key = (f, args, val)
        v = self.out.indicators.get(key)
        if v is not None:
            return v
        rng = self.spec.sorts[self.spec.funcs[f].range]
        if not rng.low <= val <= rng.high:
            return None
        if self.scheme == "atoms":
            raise SpecError(f"{f}{args} is not a cell")
        cell = self.out.cells[(f, args)]
        occ = []
        for w in rng.values:
            x = self.p.new_var(FdDomain((0, 1)), f"{f}{args + (w,)}")
            self.out.indicators[(f, args, w)] = x
            occ.append(x)
        self._emit(OccupancyChannel(cell, 1, tuple(occ), rng.low))
        return self.out.indicators[key]

    def open_atom(self, pred, args):
        v = self.out.atom_vars.get((pred, args))
        return v  # None: outside every occupancy window

    # -- helpers --------------------------------------------------------------
    def _emit(self, c):
        self.p.add(c)
        name = type(c).__name__
        self.counts[name] = self.counts.get(name, 0) + 1

    def static_value(self, t, subst):
        try:
            return self.ev.value(t, subst)
        except NonStatic:
            raise SpecError("function terms may not be nested inside arguments") from None

    def cell_lin(self, f, args):
        if self.scheme == "cells":
            return _Lin({self.out.cells[(f, args)]: 1})
        rng = self.spec.sorts[self.spec.funcs[f].range]
        return _Lin({self.out.indicators[(f, args, v)]: v for v in rng.values if v})

    def lin(self, t, subst, types):
        if isinstance(t, (Num, Var)):
            return _Lin(const=self.ev.value(t, subst))
        if isinstance(t, FTerm):
            args = tuple(self.static_value(a, subst) for a in t.args)
            return self.cell_lin(t.func, args)
        if isinstance(t, Bin):
            a, b = self.lin(t.left, subst, types), self.lin(t.right, subst, types)
            return a.add(b, 1 if t.op == "+" else -1)
        if isinstance(t, Abs):
            inner = self.lin(t.arg, subst, types)
            if inner.coef:
                raise _NonLinear
            return _Lin(const=abs(inner.const))
        if isinstance(t, Agg):
            return self.agg_lin(t, subst, types)
        raise TypeError(t)

    def agg_lin(self, t, subst, types):
        need = set()
        if t.weight is not None:
            term_vars(t.weight, need, True)
        for x in t.body:
            lit_vars(x, need, True)
        need -= set(subst)
        out = _Lin()
        for s in self.ev.solutions(t.body, types, subst, need=need):
            w = 1 if t.weight is None else self.static_value(t.weight, s)
            dyn = [x for x in t.body if not self.ev.is_static(x)]
            if not dyn:
                out = out.add(_Lin(const=w))
                continue
            if len(dyn) > 1 or not isinstance(dyn[0], Atom):
                raise SpecError("aggregate conditions may contain only one open atom")
            x, positive = self.literal_var(dyn[0], s)
            if x is None:
                term = _Lin(const=0 if positive else 1)
            else:
                term = _Lin({x: 1}) if positive else _Lin({x: -1}, 1)
            out = out.add(term.scale(w))
        return out

    def literal_var(self, atom, subst):
        """(var or None for a constant false atom, positive) of a non-static atom."""
        args = tuple(self.static_value(a, subst) for a in atom.args)
        k = self.spec.kind(atom.pred)
        if k == "open":
            return self.open_atom(atom.pred, args), atom.positive
        if k == "func":
            return self.indicator(atom.pred, args[:-1], args[-1]), atom.positive
        raise SpecError(f"unexpected literal {atom.pred}")

    # -- constraints ----------------------------------------------------------
    def require(self, cmp, subst, types):
        """Post ``cmp`` as a constraint; raises _NonLinear when impossible."""
        for side, other in ((cmp.lhs, cmp.rhs), (cmp.rhs, cmp.lhs)):
            if isinstance(side, Abs) and cmp.rel == "!=":
                inner = self.lin(side.arg, subst, types)
                if not inner.coef:
                    break
                c = self.lin(other, subst, types)
                if c.coef:
                    raise _NonLinear
                c = c.const
                if c < 0:
                    return
                items = sorted(inner.coef.items())
                if len(items) == 2 and inner.const == 0 and sorted(k for _, k in items) == [-1, 1]:
                    x = next(v for v, k in items if k == 1)
                    y = next(v for v, k in items if k == -1)
                    self._emit(NotEqual(x, y) if c == 0 else NotEqualOffset(x, y, c))
                    return
                # |e| != c  <=>  e != c and e != -c
                self._linear(inner, "!=", c)
                if c:
                    self._linear(inner, "!=", -c)
                return
        e = self.lin(cmp.lhs, subst, types).add(self.lin(cmp.rhs, subst, types), -1)
        self._linear(e, cmp.rel, 0)

    def _linear(self, e, rel, rhs):
        """Post ``e rel rhs``."""
        b = rhs - e.const
        terms = tuple(sorted(((c, v) for v, c in e.coef.items()), key=lambda t: t[1]))
        if not terms:
            if not compare(rel, 0, b):
                self.out.infeasible = True
                v = self.p.new_var(FdDomain((0,)), "infeasible")
                self._emit(Linear(((1, v),), "<=", -1))
            return
        if rel in (">", ">="):
            terms = tuple((-c, v) for c, v in terms)
            b = -b
            rel = "<" if rel == ">" else "<="
        if rel == "<":
            rel, b = "<=", b - 1
        if rel == "!=" and b == 0 and len(terms) == 2 and sorted(c for c, _ in terms) == [-1, 1]:
            self._emit(NotEqual(terms[0][1], terms[1][1]))
            return
        self._emit(Linear(terms, rel, b))

    def nogood(self, lits):
        """Forbid the conjunction of 0/1 literals ``(var, positive)``."""
        live = []
        for x, positive in lits:
            if x is None:
                if positive:
                    return
                continue
            live.append((x, positive))
        if not live:
            self._linear(_Lin(), "!=", 0)
            return
        if len(live) == 1:
            x, positive = live[0]
            self._linear(_Lin({x: 1}), "=", 0 if positive else 1)
            return
        npos = sum(1 for _, p in live if p)
        e = _Lin()
        for x, positive in live:
            e = e.add(_Lin({x: 1 if positive else -1}))
        self._linear(e, "<=", npos - 1)

    def forbid(self, lits, subst, types):
        """Forbid the conjunction of non-static literals under ``subst``."""
        inds, cmps = [], []
        for x in lits:
            if isinstance(x, Atom):
                inds.append(self.literal_var(x, subst))
            else:
                cmps.append(x)
        if not cmps:
            self.nogood(inds)
            return
        if not inds and len(cmps) == 1:
            try:
                self.require(cmps[0].negate(), subst, types)
                return
            except _NonLinear:
                pass
        self._enumerate(inds, cmps, subst, types)

    def _enumerate(self, inds, cmps, subst, types):
        cells = []
        for c in cmps:
            _fterms(c, cells)
        keys = []
        for t in cells:
            key = (t.func, tuple(self.static_value(a, subst) for a in t.args))
            if key not in keys:
                keys.append(key)
        if any(_has_agg(c) for c in cmps):
            raise SpecError("aggregates are only supported in single comparisons")
        ranges = [self.spec.sort_values(self.spec.funcs[f].range) for f, _ in keys]
        total = 1
        for r in ranges:
            total *= len(r)
        if total > ENUM_CAP:
            raise SpecError(f"constraint needs {total} value combinations (cap {ENUM_CAP})")
        for combo in itertools.product(*ranges):
            table = dict(zip(keys, combo))
            ev = _FixedCells(self.spec, self.ev.ext, table)
            if all(ev.holds(c, subst) for c in cmps):
                self.nogood(inds + [(self.indicator(f, a, v), True) for (f, a), v in zip(keys, combo)])

    # -- statements -------------------------------------------------------
    def _instances(self, lits, types):
        need = set()
        for x in lits:
            lit_vars(x, need)
        dyn = [x for x in lits if not self.ev.is_static(x)]
        for s in self.ev.solutions(lits, types, need=need):
            yield s, dyn

    def _statement(self, body, types):
        body = list(body)
        if self.scheme == "cells":
            body = _substitute_values(self.spec, body)
        for s, dyn in self._instances(body, types):
            self.forbid(dyn, s, types)

    def _occupies(self):
        if self.spec.occupies and self.scheme != "cells":
            raise SpecError("occupy is only supported by the cells scheme")
        for o in self.spec.occupies:
            need = set()
            lit_vars(o.atom, need)
            term_vars(o.duration, need)
            need.discard(o.atom.args[-1].name)
            sort = self.spec.sorts[self.spec.opens[o.atom.pred].args[-1]]
            for s in self.ev.solutions(o.guard, o.types, need=need):
                key = tuple(s[a.name] for a in o.atom.args[:-1])
                dur = self.static_value(o.duration, s)
                if dur < 1:
                    raise SpecError(f"occupancy duration {dur} must be positive", o.line)
                occ = []
                for t in sort.values:
                    if (o.atom.pred, key + (t,)) in self.out.atom_vars:
                        raise SpecError(f"{o.atom.pred}{key} defined twice", o.line)
                    v = self.p.new_var(FdDomain((0, 1)), f"{o.atom.pred}{key + (t,)}")
                    self.out.atom_vars[(o.atom.pred, key + (t,))] = v
                    occ.append(v)
                cell = self.out.cells[(o.start.func, key)]
                self._emit(OccupancyChannel(cell, dur, tuple(occ), sort.low))

    def _objective(self):
        ob = self.spec.objective
        if ob is None:
            return
        need = set()
        for x in ob.guard:
            lit_vars(x, need)
        term_vars(ob.expr, need)
        if ob.var:
            need.add(ob.var)
        parts = []
        for s in self.ev.solutions(ob.guard, ob.types, need=need):
            try:
                parts.append(self.lin(ob.expr, s, ob.types))
            except _NonLinear:
                raise SpecError("objective must be linear", ob.line) from None
            if not ob.var:
                break
        if not parts:
            raise SpecError("objective has no instances", ob.line)
        rs = [self._define(e, "reserve") for e in parts]
        if len(rs) == 1:
            obj = rs[0]
        else:
            lo = min(self.p.vars[r].domain.min for r in rs)
            hi = min(self.p.vars[r].domain.max for r in rs)
            obj = self.p.new_var(FdDomain.interval(lo, hi), "objective")
            self._emit(MinOf(obj, tuple(rs)))
        self.p.objective = obj

    def _define(self, e, name):
        doms = self.p.vars
        lo = hi = e.const
        for v, c in e.coef.items():
            a, b = c * doms[v].domain.min, c * doms[v].domain.max
            lo += min(a, b)
            hi += max(a, b)
        r = self.p.new_var(FdDomain.interval(lo, hi), name)
        if e.coef:
            terms = ((1, r),) + tuple((-c, v) for v, c in sorted(e.coef.items()))
            self._emit(Linear(terms, "=", e.const))
        return r

    def compile(self) -> Compiled:
        self._cells()
        self._opens()
        self._occupies()
        decision = list(self.out.cells.values()) if self.scheme == "cells" else list(
            self.out.indicators.values())
        decision += [v for (p, _), v in self.out.atom_vars.items() if p not in self.occupied]
        for c in self.spec.constraints:
            if isinstance(c, Con):
                for lit in c.conseq:
                    self._statement((*c.guard, lit.negate()), c.types)
            else:
                self._statement(c.body, c.types)
        self._objective()
        self.p.search_vars = tuple(decision)
        self.p.validate()
        self.out.stats = dict(sorted(self.counts.items()))
        self.out.stats["variables"] = len(self.p.vars)
        return self.out


class _FixedCells(Evaluator):
    static_functions = True

    def __init__(self, spec, ext, table):
        super().__init__(spec, ext)
        self.table = table

    def fterm(self, t, subst):
        return self.table[(t.func, tuple(self.value(a, subst) for a in t.args))]


def _fterms(t, out):
    if isinstance(t, FTerm):
        out.append(t)
    elif isinstance(t, Bin):
        _fterms(t.left, out)
        _fterms(t.right, out)
    elif isinstance(t, Abs):
        _fterms(t.arg, out)
    elif isinstance(t, Cmp):
        _fterms(t.lhs, out)
        _fterms(t.rhs, out)
    return out


def _has_agg(t):
    if isinstance(t, Agg):
        return True
    if isinstance(t, Bin):
        return _has_agg(t.left) or _has_agg(t.right)
    if isinstance(t, Abs):
        return _has_agg(t.arg)
    if isinstance(t, Cmp):
        return _has_agg(t.lhs) or _has_agg(t.rhs)
    return False


def _replace(t, name, new):
    if isinstance(t, Var):
        return new if t.name == name else t
    if isinstance(t, FTerm):
        return FTerm(t.func, tuple(_replace(a, name, new) for a in t.args))
    if isinstance(t, Bin):
        return Bin(t.op, _replace(t.left, name, new), _replace(t.right, name, new))
    if isinstance(t, Abs):
        return Abs(_replace(t.arg, name, new))
    if isinstance(t, Cmp):
        return Cmp(t.rel, _replace(t.lhs, name, new), _replace(t.rhs, name, new))
    return t


def _substitute_values(spec, body):
    """Replace value variables of open-function atoms by the function term.

    ``pos(X1,Y1), ..., Y1 != Y2`` becomes ``..., pos(X1) != pos(X2)`` when the
    value variable only occurs in comparisons and function-value positions.
    """
    while True:
        target = None
        for i, x in enumerate(body):
            if (isinstance(x, Atom) and x.positive and spec.kind(x.pred) == "func"
                    and isinstance(x.args[-1], Var)):
                y = x.args[-1].name
                if _substitutable(spec, body, y):
                    target = (i, x, y)
                    break
        if target is None:
            return body
        i, x, y = target
        fterm = FTerm(x.pred, x.args[:-1])
        new = []
        for j, z in enumerate(body):
            if j == i:
                continue
            if isinstance(z, Atom):
                if z.args and z.args[-1] == Var(y):
                    # another g(args, Y): turns into a comparison of function terms
                    new.append(Cmp("=", FTerm(z.pred, z.args[:-1]), fterm))
                else:
                    new.append(z)
            else:
                new.append(_replace(z, y, fterm))
        body = new


def _substitutable(spec, body, y):
    for x in body:
        if isinstance(x, Atom):
            inner = set()
            lit_vars(x, inner, True)
            if y not in inner:
                continue
            if not (x.positive and spec.kind(x.pred) == "func" and x.args[-1] == Var(y)):
                return False
            args = set()
            for a in x.args[:-1]:
                term_vars(a, args, True)
            if y in args:
                return False
        else:
            if _has_agg(x):
                inner = set()
                lit_vars(x, inner, True)
                outer = lit_vars(x, set())
                if y in inner and y not in outer:
                    return False
                if y in inner and _agg_mentions(x, y):
                    return False
    return True


def _agg_mentions(t, y):
    found = []

    def walk(u):
        if isinstance(u, Agg):
            s = set()
            if u.weight is not None:
                term_vars(u.weight, s, True)
            for b in u.body:
                lit_vars(b, s, True)
            if y in s:
                found.append(u)
        elif isinstance(u, Bin):
            walk(u.left)
            walk(u.right)
        elif isinstance(u, Abs):
            walk(u.arg)
        elif isinstance(u, Cmp):
            walk(u.lhs)
            walk(u.rhs)
    walk(t)
    return bool(found)


def compile_spec(spec, scheme: str = "cells") -> Compiled:
    return Compiler(spec, scheme).compile()
