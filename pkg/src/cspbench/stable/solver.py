"""Backtracking search for stable models.

Propagation between branch points:

* forward: a rule whose body is true makes its head true (a constraint fails);
* backward: a rule whose head is false (or a constraint) with a single
  undecided body literal left forces that literal the other way; for weight
  rules every undecided literal that alone would lift the sum to the bound
  is falsified;
* support: an atom whose rules all have false bodies becomes false; a true
  atom with exactly one possibly-true rule makes that body true;
* unfounded sets: atoms on positive cycles that cannot be derived from
  outside the cycle become false (skipped for tight programs).

Branching picks the first undecided atom in id order and tries true first.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

from cspbench.errors import SearchTimeout
from cspbench.stable.check import check_stable
from cspbench.stable.normalize import NRule, normalize

U, T, F = 0, 1, 2


@dataclass
class StableStats:
    choices: int = 0
    conflicts: int = 0
    propagations: int = 0
    models: int = 0
    wall_time: float = 0.0
    outcome: str = ""


class _Conflict(Exception):
    pass


def _tarjan(n, succ):
    """Strongly connected components of the graph 1..n (iterative)."""
    index = [0] * (n + 1)
    low = [0] * (n + 1)
    on = [False] * (n + 1)
    comp = [0] * (n + 1)
    stack, counter, ncomp = [], 1, 0
    for root in range(1, n + 1):
        if index[root]:
            continue
        work = [(root, 0)]
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on[v] = True
            if i < len(succ[v]):
                work.append((v, i + 1))
                w = succ[v][i]
                if not index[w]:
                    work.append((w, 0))
                elif on[w]:
                    low[v] = min(low[v], index[w])
                continue
            if low[v] == index[v]:
                ncomp += 1
                while True:
                    w = stack.pop()
                    on[w] = False
                    comp[w] = ncomp
                    if w == v:
                        break
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
    return comp


class StableSolver:
    def __init__(self, gp, budget: float | None = None, verify: bool = True):
        self.gp = gp
        self.norm = normalize(gp)
        self.budget = budget
        self.verify = verify
        self.stats = StableStats()
        self._build()

    # -- setup -----------------------------------------------------------
    def _build(self):
        norm = self.norm
        n = self.n = norm.n_atoms
        # rules: kind 0 normal, 1 weight; stored in parallel lists
        self.kind, self.head, self.pos, self.neg, self.lower, self.elems = [], [], [], [], [], []
        self.occ = [[] for _ in range(n + 1)]
        self.heads_of = [[] for _ in range(n + 1)]
        succ = [[] for _ in range(n + 1)]
        for r in norm.rules:
            i = len(self.kind)
            h = r.head or 0
            self.head.append(h)
            if isinstance(r, NRule):
                self.kind.append(0)
                self.pos.append(r.pos)
                self.neg.append(r.neg)
                self.lower.append(0)
                self.elems.append(())
                atoms = set(r.pos) | set(r.neg)
                if h:
                    succ[h].extend(r.pos)
            else:
                self.kind.append(1)
                self.pos.append(())
                self.neg.append(())
                self.lower.append(r.lower)
                self.elems.append(r.elements)
                atoms = {a for a, _, _ in r.elements}
                if h:
                    succ[h].extend(a for a, p, _ in r.elements if p)
            for a in atoms:
                self.occ[a].append(i)
            if h:
                self.heads_of[h].append(i)
        self.is_fact = [False] * (n + 1)
        for a in norm.facts:
            self.is_fact[a] = True
        comp = _tarjan(n, succ)
        size = {}
        for a in range(1, n + 1):
            size[comp[a]] = size.get(comp[a], 0) + 1
        self.cyclic = [a for a in range(1, n + 1)
                       if size[comp[a]] > 1 or a in succ[a]]
        self.comp = comp
        self.tight = not self.cyclic

    # -- assignment ------------------------------------------------------
    def _set(self, a, v):
        cur = self.val[a]
        if cur == v:
            return
        if cur != U:
            raise _Conflict
        self.val[a] = v
        self.trail.append(a)

    def _set_lit(self, a, positive, true):
        self._set(a, T if positive == true else F)

    def _undo(self, length):
        val, trail = self.val, self.trail
        while len(trail) > length:
            val[trail.pop()] = U
        self.qhead = min(self.qhead, length)

    # -- rule evaluation -------------------------------------------------
    def _body(self, i):
        """(status, undecided literals) with status T, F or U."""
        val = self.val
        und = []
        if self.kind[i] == 0:
            for a in self.pos[i]:
                v = val[a]
                if v == F:
                    return F, None
                if v == U:
                    und.append((a, True, 1))
            for a in self.neg[i]:
                v = val[a]
                if v == T:
                    return F, None
                if v == U:
                    und.append((a, False, 1))
            return (T if not und else U), und
        lo = self.lower[i]
        st = 0
        poss = 0
        for e in self.elems[i]:
            a, p, w = e
            v = val[a]
            if v == U:
                und.append(e)
                poss += w
            elif (v == T) == p:
                st += w
        if st >= lo:
            return T, und
        if st + poss < lo:
            return F, und
        return U, (und, st, poss)

    def _check_rule(self, i):
        status, info = self._body(i)
        h = self.head[i]
        val = self.val
        if status == T:
            if not h:
                raise _Conflict
            self._set(h, T)
            return
        if status == F:
            if h and val[h] != F:
                self._check_support(h)
            return
        hv = val[h] if h else F
        if hv == F:
            if self.kind[i] == 0:
                if len(info) == 1:
                    a, p, _ = info[0]
                    self._set_lit(a, p, False)
            else:
                und, st, _ = info
                lo = self.lower[i]
                for a, p, w in und:
                    if st + w >= lo:
                        self._set_lit(a, p, False)
        elif hv == T:
            self._check_support(h)

    def _check_support(self, h):
        if self.is_fact[h]:
            return
        live = None
        count = 0
        for i in self.heads_of[h]:
            status, info = self._body(i)
            if status != F:
                count += 1
                live = (i, status, info)
                if count > 1:
                    return
        if count == 0:
            self._set(h, F)
            return
        if self.val[h] != T:
            return
        i, status, info = live
        if status == T:
            return
        if self.kind[i] == 0:
            for a, p, _ in info:
                self._set_lit(a, p, True)
        else:
            und, st, poss = info
            lo = self.lower[i]
            for a, p, w in und:
                if st + poss - w < lo:
                    self._set_lit(a, p, True)

    def _unfounded(self):
        val = self.val
        founded = [False] * (self.n + 1)
        cyc = [a for a in self.cyclic if val[a] != F]
        if not cyc:
            return
        cycset = set(cyc)
        for a in range(1, self.n + 1):
            if val[a] != F and (a not in cycset or self.is_fact[a]):
                founded[a] = True
        changed = True
        while changed:
            changed = False
            for h in cyc:
                if founded[h]:
                    continue
                for i in self.heads_of[h]:
                    if self.kind[i] == 0:
                        ok = (all(founded[a] for a in self.pos[i])
                              and all(val[a] != T for a in self.neg[i]))
                    else:
                        s = 0
                        for a, p, w in self.elems[i]:
                            if (founded[a] if p else val[a] != T):
                                s += w
                        ok = s >= self.lower[i]
                    if ok:
                        founded[h] = True
                        changed = True
                        break
        for h in cyc:
            if not founded[h]:
                self._set(h, F)

    def _propagate(self):
        """Run to fixpoint; raises _Conflict."""
        trail = self.trail
        while True:
            while self.qhead < len(trail):
                a = trail[self.qhead]
                self.qhead += 1
                self.stats.propagations += 1
                for i in self.occ[a]:
                    self._check_rule(i)
                for i in self.heads_of[a]:
                    self._check_rule(i)
            if self.tight:
                return
            before = len(trail)
            self._unfounded()
            if len(trail) == before:
                return

    # -- search ----------------------------------------------------------
    def _init(self):
        self.val = [U] * (self.n + 1)
        self.trail = []
        self.qhead = 0
        try:
            for a in range(1, self.n + 1):
                if self.is_fact[a]:
                    self._set(a, T)
            for i in range(len(self.kind)):
                self._check_rule(i)
            for a in range(1, self.n + 1):
                if not self.is_fact[a] and self.val[a] != F:
                    self._check_support(a)
            self._propagate()
        except _Conflict:
            return False
        return True

    def models(self):
        """Generate stable models as frozensets of original atom ids."""
        t0 = time.perf_counter()
        deadline = None if self.budget is None else t0 + self.budget
        stats = self.stats
        found = []
        try:
            if not self._init():
                return
            stack = []  # (trail length before decision, atom, flipped)
            nxt = 1
            while True:
                if deadline is not None and time.perf_counter() > deadline:
                    stats.outcome = "timeout"
                    raise SearchTimeout("stable model search exceeded its budget", partial=found)
                conflict = False
                a = nxt
                val = self.val
                while a <= self.n and val[a] != U:
                    a += 1
                if a > self.n:
                    model = frozenset(x for x in range(1, self.norm.n_original + 1) if val[x] == T)
                    if self.verify and not check_stable(self.gp, model, self.norm):
                        raise AssertionError(f"search produced a non-stable model {sorted(model)}")
                    stats.models += 1
                    found.append(model)
                    yield model
                    conflict = True
                else:
                    stats.choices += 1
                    stack.append((len(self.trail), a, False))
                    try:
                        self._set(a, T)
                        self._propagate()
                    except _Conflict:
                        conflict = True
                    nxt = a
                while conflict:
                    stats.conflicts += 1
                    while stack and stack[-1][2]:
                        stack.pop()
                    if not stack:
                        stats.outcome = "exhausted"
                        return
                    length, b, _ = stack.pop()
                    self._undo(length)
                    stack.append((length, b, True))
                    nxt = b
                    try:
                        self._set(b, F)
                        self._propagate()
                        conflict = False
                    except _Conflict:
                        pass
        finally:
            stats.wall_time += time.perf_counter() - t0
            if not stats.outcome:
                stats.outcome = "stopped"

    def first(self):
        for m in self.models():
            return m
        return None

    def all(self, limit: int | None = None) -> list:
        out = []
        for m in self.models():
            out.append(m)
            if limit is not None and len(out) >= limit:
                break
        return out

    def count(self, limit: int | None = None) -> int:
        return len(self.all(limit))


def solve_stable(gp, mode: str = "all", limit: int | None = None, budget: float | None = None):
    """Stable models of ``gp``.

    ``mode`` is ``first`` (a list with at most one model), ``all`` (list of
    models in search order) or ``count`` (an int).
    """
    s = StableSolver(gp, budget)
    if mode == "first":
        return s.all(1)
    if mode == "all":
        return s.all(limit)
    if mode == "count":
        return s.count(limit)
    raise ValueError(f"unknown mode {mode!r}")
