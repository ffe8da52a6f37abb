"""Direct evaluation of a specification over an interpretation.

This is the reference semantics used to re-check compiled solutions; it
never touches the finite-domain solver.
"""
from __future__ import annotations

import itertools

from cspbench.declar.ast import Atom, Con, Interpretation, SpecError
from cspbench.declar.parser import lit_vars, term_vars
from cspbench.declar.semantics import Evaluator, defined_extensions


class InterpEvaluator(Evaluator):
    static_functions = True
    static_aggregates = True

    def __init__(self, spec, interp: Interpretation, ext=None):
        super().__init__(spec, ext)
        self.interp = interp
        self.types = {}
        self._graphs = {}

    def atom_ext(self, pred):
        k = self.spec.kind(pred)
        if k == "func":
            g = self._graphs.get(pred)
            if g is None:
                g = self._graphs[pred] = {args + (v,) for args, v in self.interp.functions[pred].items()}
            return g
        if k == "open":
            return self.interp.atoms.get(pred, frozenset())
        return super().atom_ext(pred)

    def fterm(self, t, subst):
        args = tuple(self.value(a, subst) for a in t.args)
        table = self.interp.functions[t.func]
        if args not in table:
            raise SpecError(f"{t.func}{args} is undefined")
        return table[args]

    def agg(self, t, subst):
        need = set()
        if t.weight is not None:
            term_vars(t.weight, need, True)
        for x in t.body:
            lit_vars(x, need, True)
        total = 0
        for s in self.solutions(t.body, self.types, subst, need=need - set(subst)):
            total += 1 if t.weight is None else self.value(t.weight, s)
        return total


def _globals(lits, extra=()):
    out = set()
    for x in lits:
        lit_vars(x, out)
    for t in extra:
        term_vars(t, out)
    return out


def check_interpretation(spec, interp: Interpretation, ext=None) -> list:
    """List of human-readable violations (empty when ``interp`` is a model)."""
    ext = ext if ext is not None else defined_extensions(spec)
    ev = InterpEvaluator(spec, interp, ext)
    bad = []
    for f in spec.funcs.values():
        table = interp.functions.get(f.name, {})
        cells = list(itertools.product(*(spec.sort_values(s) for s in f.args)))
        rng = spec.sorts[f.range]
        for c in cells:
            if c not in table:
                bad.append(f"{f.name}{c} undefined")
            elif not rng.low <= table[c] <= rng.high:
                bad.append(f"{f.name}{c} = {table[c]} outside {f.range}")
        vals = [table[c] for c in cells if c in table]
        if f.prop in ("injective", "bijective") and len(set(vals)) != len(vals):
            bad.append(f"{f.name} is not injective")
        if f.prop == "bijective" and set(vals) != set(rng.values):
            bad.append(f"{f.name} is not onto {f.range}")
    for p, d in spec.opens.items():
        for tup in interp.atoms.get(p, ()):
            if len(tup) != len(d.args) or any(not spec.sorts[s].low <= v <= spec.sorts[s].high
                                              for v, s in zip(tup, d.args)):
                bad.append(f"{p}{tup} outside its sorts")
    if any(v.endswith("undefined") for v in bad):
        return bad  # constraints over partial tables are not evaluated
    occupied = {}
    for o in spec.occupies:
        ev.types = o.types
        need = _globals((o.atom,), (o.duration,)) - {o.atom.args[-1].name}
        for s in ev.solutions(o.guard, o.types, need=need):
            key = tuple(ev.value(a, s) for a in o.atom.args[:-1])
            start = interp.functions[o.start.func][key]
            dur = ev.value(o.duration, s)
            tset = occupied.setdefault(o.atom.pred, set())
            for t in spec.sort_values(spec.opens[o.atom.pred].args[-1]):
                if start <= t < start + dur:
                    tset.add(key + (t,))
    for p, expected in occupied.items():
        if set(interp.atoms.get(p, ())) != expected:
            bad.append(f"{p} does not match its occupancy definition")
    for c in spec.constraints:
        ev.types = c.types
        if isinstance(c, Con):
            for lit in c.conseq:
                neg = lit.negate()
                for s in ev.solutions((*c.guard, neg), c.types, need=_globals((*c.guard, lit))):
                    bad.append(f"line {c.line}: {_show(lit)} fails at {s}")
                    break
        else:
            for s in ev.solutions(c.body, c.types, need=_globals(c.body)):
                bad.append(f"line {c.line}: integrity constraint violated at {s}")
                break
    return bad


def _show(lit):
    return lit.pred if isinstance(lit, Atom) else lit.rel


def objective_value(spec, interp: Interpretation, ext=None):
    """Value of the objective under ``interp`` (None without an objective)."""
    ob = spec.objective
    if ob is None:
        return None
    ev = InterpEvaluator(spec, interp, ext)
    ev.types = ob.types
    need = _globals(ob.guard, (ob.expr,)) | ({ob.var} if ob.var else set())
    vals = [ev.value(ob.expr, s) for s in ev.solutions(ob.guard, ob.types, need=need)]
    if not vals:
        raise SpecError("objective has no instances")
    return min(vals) if ob.var else vals[0]
