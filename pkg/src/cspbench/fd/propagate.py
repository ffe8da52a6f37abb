"""Constraint propagation to a fixpoint.

Strength per constraint kind:

* NotEqual, NotEqualOffset, and any two-variable Linear: arc consistent.
* Linear ``<=`` and ``!=``: domain consistent for any arity.
* Linear ``=`` with three or more variables: bounds consistent.
* AllDifferent: decomposed into pairwise disequalities plus a pigeonhole
  count over the union of the domains.
* OccupancyChannel: domain consistent in both directions.
* MinOf: bounds consistent; a single-argument MinOf is arc consistent.
"""
from __future__ import annotations

from bisect import bisect_left, bisect_right
from collections import deque
from dataclasses import dataclass
from typing import Sequence

from cspbench.fd.constraints import (
    EQ, LE, AllDifferent, Linear, MinOf, NotEqual, NotEqualOffset, OccupancyChannel,
)
from cspbench.fd.domain import FdDomain, contains, remove, restrict


class _Fail(Exception):
    pass


_FAIL = _Fail()


def _set(doms, v, new, changed):
    if not new:
        raise _FAIL
    if len(new) != len(doms[v]):
        doms[v] = new
        changed.append(v)


def _ceil_div(a, b):
    return -((-a) // b)


def _prop_ne(c: NotEqual, doms, changed):
    dx, dy = doms[c.x], doms[c.y]
    if len(dx) == 1:
        _set(doms, c.y, remove(dy, dx[0]), changed)
    dy = doms[c.y]
    if len(dy) == 1:
        _set(doms, c.x, remove(doms[c.x], dy[0]), changed)


def _prop_ne_offset(c: NotEqualOffset, doms, changed):
    k = c.c
    if k < 0:
        return
    dy = doms[c.y]
    if len(dy) <= 2:
        dx = doms[c.x]
        _set(doms, c.x, tuple(a for a in dx if any(abs(a - b) != k for b in dy)), changed)
    dx = doms[c.x]
    if len(dx) <= 2:
        dy = doms[c.y]
        _set(doms, c.y, tuple(b for b in dy if any(abs(a - b) != k for a in dx)), changed)


def _filter_scaled(vals, coef, lo, hi):
    """Values ``a`` of ``vals`` with ``lo <= coef * a <= hi`` (either bound may be None)."""
    if coef > 0:
        a_lo = None if lo is None else _ceil_div(lo, coef)
        a_hi = None if hi is None else hi // coef
    else:
        a_lo = None if hi is None else _ceil_div(hi, coef)
        a_hi = None if lo is None else lo // coef
    return restrict(vals, a_lo, a_hi)


def _binary_support(c1, dx, c2, dy, rel, b):
    """Values of x (coefficient c1) with a partner in dy under ``c1 x + c2 y rel b``."""
    if rel == LE:
        ymin = c2 * dy[0] if c2 > 0 else c2 * dy[-1]
        return _filter_scaled(dx, c1, None, b - ymin)
    if rel == EQ:
        out = []
        for a in dx:
            r = b - c1 * a
            if r % c2 == 0 and contains(dy, r // c2):
                out.append(a)
        return tuple(out)
    if len(dy) > 1:
        return dx
    r = b - c2 * dy[0]
    if r % c1 == 0:
        return remove(dx, r // c1)
    return dx


def _prop_linear(c: Linear, doms, changed):
    terms, rel, b = c.terms, c.rel, c.bound
    n = len(terms)
    if n == 0:
        ok = 0 <= b if rel == LE else (0 == b if rel == EQ else 0 != b)
        if not ok:
            raise _FAIL
        return
    if n == 1:
        (c1, x), = terms
        dx = doms[x]
        if rel == LE:
            new = _filter_scaled(dx, c1, None, b)
        elif rel == EQ:
            new = (b // c1,) if b % c1 == 0 and contains(dx, b // c1) else ()
        else:
            new = remove(dx, b // c1) if b % c1 == 0 else dx
        _set(doms, x, new, changed)
        return
    if n == 2:
        (c1, x), (c2, y) = terms
        _set(doms, x, _binary_support(c1, doms[x], c2, doms[y], rel, b), changed)
        _set(doms, y, _binary_support(c2, doms[y], c1, doms[x], rel, b), changed)
        return
    if rel == "!=":
        unfixed = [(cf, v) for cf, v in terms if len(doms[v]) > 1]
        if len(unfixed) > 1:
            return
        fixed_sum = sum(cf * doms[v][0] for cf, v in terms if len(doms[v]) == 1)
        if not unfixed:
            if fixed_sum == b:
                raise _FAIL
            return
        (cf, v), = unfixed
        r = b - fixed_sum
        if r % cf == 0:
            _set(doms, v, remove(doms[v], r // cf), changed)
        return
    while True:
        lows, highs = [], []
        for cf, v in terms:
            d = doms[v]
            if cf > 0:
                lows.append(cf * d[0])
                highs.append(cf * d[-1])
            else:
                lows.append(cf * d[-1])
                highs.append(cf * d[0])
        smin, smax = sum(lows), sum(highs)
        if smin > b or (rel == EQ and smax < b):
            raise _FAIL
        progress = False
        for i, (cf, v) in enumerate(terms):
            rest_min = smin - lows[i]
            hi = b - rest_min
            lo = b - (smax - highs[i]) if rel == EQ else None
            d = doms[v]
            new = _filter_scaled(d, cf, lo, hi)
            if len(new) != len(d):
                _set(doms, v, new, changed)
                progress = True
        if not progress:
            return


def _prop_alldiff(c: AllDifferent, doms, changed):
    vs = c.vars
    done = set()
    work = [v for v in vs if len(doms[v]) == 1]
    while work:
        v = work.pop()
        if v in done:
            continue
        done.add(v)
        val = doms[v][0]
        for w in vs:
            if w == v:
                continue
            dw = doms[w]
            if contains(dw, val):
                new = remove(dw, val)
                _set(doms, w, new, changed)
                if len(new) == 1:
                    work.append(w)
            elif len(dw) == 1 and w not in done:
                work.append(w)
    # pigeonhole: fewer candidate values than variables
    union = set()
    for v in vs:
        union.update(doms[v])
        if len(union) >= len(vs):
            return
    raise _FAIL


def _prop_occupancy(c: OccupancyChannel, doms, changed):
    occ, d, off = c.occ, c.duration, c.offset
    n = len(occ)
    forced1 = []
    zero_prefix = [0] * (n + 1)
    for i, v in enumerate(occ):
        dv = doms[v]
        one_ok = contains(dv, 1)
        zero_ok = contains(dv, 0)
        if not one_ok and not zero_ok:
            raise _FAIL
        if not one_ok:
            zero_prefix[i + 1] = zero_prefix[i] + 1
        else:
            zero_prefix[i + 1] = zero_prefix[i]
            if not zero_ok:
                forced1.append(i)

    def ok(s):
        i = max(s - off, 0)
        j = min(s + d - off, n)
        if i < j and zero_prefix[j] - zero_prefix[i] > 0:
            return False
        if forced1:
            lo, hi = forced1[0] + off, forced1[-1] + off
            if s > lo or s + d - 1 < hi:
                return False
        return True

    ds = doms[c.start]
    starts = tuple(s for s in ds if ok(s))
    _set(doms, c.start, starts, changed)
    for i, v in enumerate(occ):
        w = off + i
        # starts s covering w satisfy w - d + 1 <= s <= w
        lo = bisect_left(starts, w - d + 1)
        hi = bisect_right(starts, w)
        one_sup = hi > lo
        zero_sup = lo > 0 or hi < len(starts)
        dv = doms[v]
        new = tuple(x for x in dv if (x == 1 and one_sup) or (x == 0 and zero_sup))
        _set(doms, v, new, changed)


def _prop_min(c: MinOf, doms, changed):
    r, args = c.result, c.args
    lo = min(doms[a][0] for a in args)
    hi = min(doms[a][-1] for a in args)
    _set(doms, r, restrict(doms[r], lo, hi), changed)
    rmin = doms[r][0]
    for a in args:
        _set(doms, a, restrict(doms[a], rmin, None), changed)
    # trim result bounds to values some argument can take
    dr = doms[r]
    i, j = 0, len(dr)
    while i < j and not any(contains(doms[a], dr[i]) for a in args):
        i += 1
    while j > i and not any(contains(doms[a], dr[j - 1]) for a in args):
        j -= 1
    _set(doms, r, dr[i:j], changed)
    rmax = doms[r][-1]
    cands = [a for a in args if doms[a][0] <= rmax]
    if not cands:
        raise _FAIL
    if len(cands) == 1:
        a = cands[0]
        da, dr = doms[a], doms[r]
        common = tuple(sorted(set(da) & set(dr)))
        # a equals the minimum, so a's values must be feasible results
        _set(doms, a, common, changed)
        _set(doms, r, common, changed)


_DISPATCH = {
    NotEqual: _prop_ne,
    NotEqualOffset: _prop_ne_offset,
    Linear: _prop_linear,
    AllDifferent: _prop_alldiff,
    OccupancyChannel: _prop_occupancy,
    MinOf: _prop_min,
}


class Propagator:
    """Fixpoint engine bound to one problem's constraint list."""

    def __init__(self, problem):
        problem.validate()
        self.constraints = list(problem.constraints)
        self.funcs = [_DISPATCH[type(c)] for c in self.constraints]
        self.watch: list[list[int]] = [[] for _ in problem.vars]
        for ci, c in enumerate(self.constraints):
            for v in set(c.scope()):
                self.watch[v].append(ci)
        self.steps = 0
        self.failed: int | None = None

    def fixpoint(self, doms: list, changed_vars: Sequence[int] | None = None) -> bool:
        """Propagate in place; False on failure. ``None`` seeds every constraint."""
        ncons = len(self.constraints)
        queued = [False] * ncons
        queue = deque()
        if changed_vars is None:
            seed = range(ncons)
        else:
            seed = sorted({ci for v in changed_vars for ci in self.watch[v]})
        for ci in seed:
            queued[ci] = True
            queue.append(ci)
        for d in doms:
            if not d:
                self.failed = None
                return False
        changed: list[int] = []
        cons, funcs, watch = self.constraints, self.funcs, self.watch
        while queue:
            ci = queue.popleft()
            queued[ci] = False
            self.steps += 1
            try:
                funcs[ci](cons[ci], doms, changed)
            except _Fail:
                self.failed = ci
                return False
            if changed:
                for v in changed:
                    for cj in watch[v]:
                        if not queued[cj]:
                            queued[cj] = True
                            queue.append(cj)
                changed.clear()
        self.failed = None
        return True


@dataclass(frozen=True)
class PropagationOutcome:
    fixpoint: bool
    domains: tuple[FdDomain, ...] | None = None
    failed_constraint: int | None = None

    @property
    def failure(self) -> bool:
        return not self.fixpoint


def propagate(problem, state=None) -> PropagationOutcome:
    """Propagate ``problem`` from ``state`` (defaults to the original domains).

    ``state`` is a sequence of :class:`FdDomain` or sorted value tuples, one
    per variable. Structural problems raise :class:`StructuralError`;
    infeasibility is reported as a failure outcome.
    """
    engine = Propagator(problem)
    if state is None:
        doms = problem.domains()
    else:
        doms = [d.values if isinstance(d, FdDomain) else tuple(sorted(set(d))) for d in state]
        if len(doms) != len(problem.vars):
            raise ValueError("state must give one domain per variable")
    if engine.fixpoint(doms):
        return PropagationOutcome(True, tuple(FdDomain(d) for d in doms))
    return PropagationOutcome(False, None, engine.failed)
