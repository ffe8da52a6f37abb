"""Brute-force oracles.

Exhaustive enumeration with constraint checks written directly from the
problem definitions; nothing here calls a solver, propagator, grounder or
compiler. Enumeration is vectorized with numpy in fixed-size chunks. A
search space above ``cap`` is refused with :class:`OracleRefused` rather
than answered partially.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_CAP = 10**7
CHUNK = 1 << 18


class OracleRefused(RuntimeError):
    """The search space exceeds the configured cap."""

    def __init__(self, space, cap):
        super().__init__(f"search space {space} exceeds the oracle cap {cap}")
        self.space = space
        self.cap = cap


@dataclass
class OracleAnswer:
    mode: str
    sat: bool
    count: int | None = None
    value: int | None = None
    space: int = 0
    solutions: list = field(default_factory=list)


def brute_force(problem, mode: str = "all", cap: int = DEFAULT_CAP, keep: bool = False) -> OracleAnswer:
    """Count (``all``), decide (``first``) or optimize (``optimize``) by enumeration.

    With ``keep`` the satisfying assignments (canonical form) are returned too.
    """
    if mode not in ("all", "first", "optimize"):
        raise ValueError(f"unknown mode {mode!r}")
    if problem.kind == "queens":
        return _queens(problem.n, mode, cap, keep)
    if problem.kind == "coloring":
        return _coloring(problem.graph, mode, cap, keep)
    return _schedule(problem.instance, mode, cap, keep)


def _answer(mode, sols_count, space, value=None, sols=None):
    return OracleAnswer(mode, sols_count > 0, sols_count if mode == "all" else None, value, space,
                        sols or [])


# -- queens --------------------------------------------------------------------

def _queens(n, mode, cap, keep):
    if mode == "optimize":
        raise ValueError("queens has no objective")
    space = math.factorial(n)
    if space > cap:
        raise OracleRefused(space, cap)
    sols = queens_by_rows(n)
    return _answer(mode, len(sols), space, sols=sorted(sols) if keep else None)


def queens_by_rows(n):
    """Row-major: one column per row, columns a permutation."""
    out = []
    for cols in itertools.permutations(range(1, n + 1)):
        if all(abs(cols[i] - cols[j]) != j - i for i in range(n) for j in range(i + 1, n)):
            out.append(cols)
    return out


def queens_by_columns(n):
    """Column-major enumeration, converted back to row-major form."""
    out = []
    for rows in itertools.permutations(range(1, n + 1)):
        # rows[c] is the row of the queen in column c + 1
        ok = True
        for a in range(n):
            for b in range(a + 1, n):
                if abs(rows[a] - rows[b]) == b - a:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            cols = [0] * n
            for c, r in enumerate(rows, 1):
                cols[r - 1] = c
            out.append(tuple(cols))
    return out


# -- coloring ------------------------------------------------------------------

def _digits(start, stop, bases):
    """Mixed-radix digits of start..stop-1, one column per position (last varies fastest)."""
    idx = np.arange(start, stop, dtype=np.int64)
    cols = []
    for b in reversed(bases):
        cols.append(idx % b)
        idx //= b
    return np.stack(cols[::-1], axis=1) if cols else np.zeros((stop - start, 0), dtype=np.int64)


def _coloring(g, mode, cap, keep):
    if mode == "optimize":
        raise ValueError("coloring has no objective")
    space = g.k ** g.n
    if space > cap:
        raise OracleRefused(space, cap)
    count = 0
    kept = []
    bases = [g.k] * g.n
    for start in range(0, space, CHUNK):
        a = _digits(start, min(space, start + CHUNK), bases)
        ok = np.ones(len(a), dtype=bool)
        for u, v in g.edges:
            ok &= a[:, u - 1] != a[:, v - 1]
        count += int(ok.sum())
        if keep:
            kept += [tuple(int(x) + 1 for x in row) for row in a[ok]]
        if mode == "first" and count:
            break
    return _answer(mode, count, space, sols=kept if keep else None)


# -- scheduling ----------------------------------------------------------------

def _schedule(inst, mode, cap, keep):
    H = inst.horizon
    ms = []
    for u in inst.units:
        for i, d in enumerate(u.durations, 1):
            ms.append((u, i, d))
    domains = []
    for u, i, d in ms:
        fixed = inst.fixed.get((u.id, i))
        dom = []
        for s in range(1, H - d + 2):
            if fixed is not None and s != fixed:
                continue
            if any((u.id, w) in inst.prohibited for w in range(s, s + d)):
                continue
            dom.append(s)
        domains.append(np.array(dom, dtype=np.int64))
    space = 1
    for dom in domains:
        space *= len(dom)
    if space > cap:
        raise OracleRefused(space, cap)
    total = sum(u.capacity for u in inst.units)
    peaks = np.array(inst.peaks, dtype=np.int64)
    count, best = 0, None
    kept = []
    bases = [len(dom) for dom in domains]
    weeks = np.arange(1, H + 1, dtype=np.int64)
    for start in range(0, space, CHUNK):
        idx = _digits(start, min(space, start + CHUNK), bases)
        st = np.stack([domains[j][idx[:, j]] for j in range(len(ms))], axis=1) if ms else idx
        ok = np.ones(len(st), dtype=bool)
        # sequential maintenances of one unit
        for j in range(1, len(ms)):
            if ms[j][0].id == ms[j - 1][0].id:
                ok &= st[:, j] >= st[:, j - 1] + ms[j - 1][2]
        down_mw = np.zeros((len(st), H), dtype=np.int64)
        plant = {p: np.zeros((len(st), H), dtype=np.int64) for p in inst.plant_limit}
        area = {a: np.zeros((len(st), H), dtype=np.int64) for a in inst.area_limit}
        for j, (u, i, d) in enumerate(ms):
            s = st[:, j:j + 1]
            busy = (weeks[None, :] >= s) & (weeks[None, :] < s + d)
            down_mw += busy * u.capacity
            plant[u.plant] += busy
            area[u.area] += busy * u.capacity
        for p, lim in inst.plant_limit.items():
            ok &= (plant[p] <= lim).all(axis=1)
        for a, lim in inst.area_limit.items():
            ok &= (area[a] <= lim).all(axis=1)
        count += int(ok.sum())
        if ok.any():
            reserve = (total - down_mw - peaks[None, :]).min(axis=1)
            cand = int(reserve[ok].max())
            best = cand if best is None else max(best, cand)
            if keep:
                kept += [tuple(int(x) for x in row) for row in st[ok]]
        if mode == "first" and count:
            break
    return _answer(mode, count, space, value=best if mode == "optimize" else None,
                   sols=kept if keep else None)


# -- direct solution checks ------------------------------------------------------

def check_solution(problem, sol) -> bool:
    """Whether a canonical solution satisfies every constraint of ``problem``."""
    if problem.kind == "queens":
        n = problem.n
        return (len(sol) == n and all(1 <= c <= n for c in sol)
                and all(sol[i] != sol[j] and abs(sol[i] - sol[j]) != j - i
                        for i in range(n) for j in range(i + 1, n)))
    if problem.kind == "coloring":
        g = problem.graph
        return (len(sol) == g.n and all(1 <= c <= g.k for c in sol)
                and all(sol[u - 1] != sol[v - 1] for u, v in g.edges))
    return not schedule_violations(problem.instance, sol)


def schedule_violations(inst, starts) -> list:
    ms = [(u, i, d) for u in inst.units for i, d in enumerate(u.durations, 1)]
    if len(starts) != len(ms):
        return ["wrong number of starts"]
    bad = []
    for (u, i, d), s in zip(ms, starts):
        if not 1 <= s <= inst.horizon - d + 1:
            bad.append(f"unit {u.id} maintenance {i} leaves the horizon")
        if inst.fixed.get((u.id, i), s) != s:
            bad.append(f"unit {u.id} maintenance {i} ignores its fixed start")
        if any((u.id, w) in inst.prohibited for w in range(s, s + d)):
            bad.append(f"unit {u.id} maintenance {i} hits a prohibited week")
    for j in range(1, len(ms)):
        if ms[j][0].id == ms[j - 1][0].id and starts[j] < starts[j - 1] + ms[j - 1][2]:
            bad.append(f"unit {ms[j][0].id} maintenances overlap")
    for w in range(1, inst.horizon + 1):
        down = [u for (u, i, d), s in zip(ms, starts) if s <= w < s + d]
        for p, lim in inst.plant_limit.items():
            if sum(u.plant == p for u in down) > lim:
                bad.append(f"plant {p} over its limit in week {w}")
        for a, lim in inst.area_limit.items():
            if sum(u.capacity for u in down if u.area == a) > lim:
                bad.append(f"area {a} over its limit in week {w}")
    return bad


def min_reserve(inst, starts) -> int:
    ms = [(u, d) for u in inst.units for d in u.durations]
    total = sum(u.capacity for u in inst.units)
    return min(total - inst.peaks[w - 1] - sum(u.capacity for (u, d), s in zip(ms, starts) if s <= w < s + d)
               for w in range(1, inst.horizon + 1))
