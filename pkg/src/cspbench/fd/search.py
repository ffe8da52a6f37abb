"""Labelling search over the propagation engine.

Variable order is first-fail: smallest current domain, ties broken by the
larger number of constraints on the variable, then by the lower id. Values
are tried in ascending order.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Callable

from cspbench.errors import SearchTimeout, StructuralError
from cspbench.fd.domain import restrict
from cspbench.fd.propagate import Propagator

log = logging.getLogger(__name__)


@dataclass
class SearchStats:
    nodes: int = 0
    backtracks: int = 0
    propagations: int = 0
    wall_time: float = 0.0
    solutions: int = 0
    outcome: str = ""


class FdSolver:
    """Depth-first labelling with propagation at every node.

    Parameters
    ----------
    problem : CspProblem
    budget : float, optional
        Wall-clock seconds; checked every ``node_quantum`` nodes. On expiry
        the search raises :class:`SearchTimeout` whose ``partial`` holds the
        solutions (or best incumbent) found so far.
    """

    def __init__(self, problem, budget: float | None = None, node_quantum: int = 64):
        self.problem = problem
        self.budget = budget
        self.node_quantum = node_quantum
        self.engine = Propagator(problem)
        self.degree = [v.degree for v in problem.vars]
        order = list(problem.search_vars) if problem.search_vars is not None else []
        seen = set(order)
        self._primary = order
        self._rest = [v for v in range(len(problem.vars)) if v not in seen]
        self.stats = SearchStats()

    def _select(self, doms):
        for group in (self._primary, self._rest):
            best = None
            best_key = None
            deg = self.degree
            for v in group:
                size = len(doms[v])
                if size > 1:
                    key = (size, -deg[v], v)
                    if best_key is None or key < best_key:
                        best, best_key = v, key
            if best is not None:
                return best
        return None

    def _run(self, on_solution: Callable[[tuple], bool], bound_fn=None, partial=None):
        stats = self.stats = SearchStats()
        start = time.perf_counter()
        deadline = None if self.budget is None else start + self.budget
        engine = self.engine
        steps0 = engine.steps
        try:
            doms = self.problem.domains()
            stats.nodes = 1
            if not engine.fixpoint(doms, None):
                stats.outcome = "unsat"
                return
            var = self._select(doms)
            if var is None:
                stats.solutions += 1
                on_solution(tuple(d[0] for d in doms))
                return
            stack = [[doms, var, 0]]
            while stack:
                frame = stack[-1]
                fdoms, var, i = frame
                values = fdoms[var]
                if i >= len(values):
                    stack.pop()
                    continue
                frame[2] = i + 1
                child = list(fdoms)
                child[var] = (values[i],)
                changed = [var]
                if bound_fn is not None:
                    obj, lo = bound_fn()
                    if lo is not None:
                        nd = restrict(child[obj], lo, None)
                        if not nd:
                            stats.nodes += 1
                            stats.backtracks += 1
                            continue
                        if len(nd) != len(child[obj]):
                            child[obj] = nd
                            changed.append(obj)
                stats.nodes += 1
                if deadline is not None and stats.nodes % self.node_quantum == 0:
                    if time.perf_counter() > deadline:
                        raise SearchTimeout(partial=partial() if partial else None)
                if not engine.fixpoint(child, changed):
                    stats.backtracks += 1
                    continue
                nxt = self._select(child)
                if nxt is None:
                    stats.solutions += 1
                    if on_solution(tuple(d[0] for d in child)):
                        return
                    continue
                stack.append([child, nxt, 0])
        except SearchTimeout:
            stats.outcome = "timeout"
            raise
        finally:
            stats.propagations = engine.steps - steps0
            stats.wall_time = time.perf_counter() - start
            if not stats.outcome:
                stats.outcome = "sat" if stats.solutions else "unsat"

    def solve_first(self):
        """Return the first satisfying assignment (tuple by var id) or None."""
        found = []

        def on_solution(a):
            found.append(a)
            return True

        self._run(on_solution, partial=lambda: list(found))
        return found[0] if found else None

    def solve_all(self, limit: int | None = None):
        """Enumerate satisfying assignments (up to ``limit``) in search order."""
        found = []

        def on_solution(a):
            found.append(a)
            return limit is not None and len(found) >= limit

        if limit is not None and limit <= 0:
            return []
        self._run(on_solution, partial=lambda: list(found))
        return found

    def maximize(self, on_incumbent: Callable[[tuple, int], None] | None = None):
        """Branch and bound on ``problem.objective``.

        After every incumbent of value v the search continues under the
        extra requirement objective >= v + 1. Returns ``(assignment, value)``
        or None when infeasible.
        """
        obj = self.problem.objective
        if obj is None:
            raise StructuralError("maximize needs an objective variable")
        best: list = [None, None]

        def on_solution(a):
            val = a[obj]
            if best[1] is None or val > best[1]:
                best[0], best[1] = a, val
                log.info("incumbent objective %d", val)
                if on_incumbent is not None:
                    on_incumbent(a, val)
            return False

        def bound():
            return obj, (None if best[1] is None else best[1] + 1)

        self._run(on_solution, bound_fn=bound,
                  partial=lambda: None if best[0] is None else (best[0], best[1]))
        if best[0] is None:
            return None
        return best[0], best[1]


def solve_first(problem, budget=None):
    return FdSolver(problem, budget).solve_first()


def solve_all(problem, limit=None, budget=None):
    return FdSolver(problem, budget).solve_all(limit)


def maximize(problem, budget=None, on_incumbent=None):
    return FdSolver(problem, budget).maximize(on_incumbent)
