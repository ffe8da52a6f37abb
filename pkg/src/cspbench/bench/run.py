"""Solve one problem with one paradigm, timing setup and solve separately.

Setup covers encoding plus grounding or compilation (the pre-processing
step); solve covers search only. Every model a solver reports is decoded
to the canonical form and re-checked by :func:`check_solution`, which
shares no code with the solvers.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

from cspbench.bench.encode import (
    UnsupportedEncoding, decode_declar, decode_stable, encode_fd, encode_text, lp_schedule, supports,
)
from cspbench.bench.oracle import check_solution, min_reserve
from cspbench.declar import check_interpretation, compile_spec, parse_spec
from cspbench.errors import SearchTimeout
from cspbench.fd import FdSolver
from cspbench.grounder import ground
from cspbench.lp import parse_program
from cspbench.stable import StableSolver, optimize_iterated

log = logging.getLogger(__name__)

MODES = ("first", "all", "optimize")


class VerificationError(AssertionError):
    """A solver reported a model that fails the direct check."""


@dataclass
class RunOutcome:
    paradigm: str
    problem: str
    size: int
    mode: str
    outcome: str = ""              # sat | unsat | timeout
    count: int | None = None       # mode all
    value: int | None = None       # mode optimize
    solutions: list = field(default_factory=list)
    incumbents: list = field(default_factory=list)   # (seconds, value)
    setup_s: float = 0.0
    solve_s: float = 0.0
    nodes: int | None = None
    backtracks: int | None = None

    @property
    def value_or_count(self):
        return self.count if self.mode == "all" else self.value


def solve_problem(problem, paradigm: str, mode: str = "all", limit: int | None = None,
                  budget: float | None = None) -> RunOutcome:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if not supports(problem, paradigm):
        raise UnsupportedEncoding(f"{paradigm} does not support {problem.kind}")
    if mode == "optimize" and problem.kind != "schedule":
        raise ValueError(f"{problem.kind} has no objective")
    out = RunOutcome(paradigm, problem.name, problem.size, mode)
    if paradigm == "fd":
        _run_fd(problem, mode, limit, budget, out)
    elif paradigm == "stable":
        _run_stable(problem, mode, limit, budget, out)
    else:
        _run_declar(problem, paradigm, mode, limit, budget, out)
    for sol in out.solutions:
        if not check_solution(problem, sol):
            raise VerificationError(f"{paradigm} reported an invalid solution {sol}")
    if mode == "optimize" and out.solutions:
        if min_reserve(problem.instance, out.solutions[-1]) != out.value:
            raise VerificationError(f"{paradigm} reported a wrong objective value {out.value}")
    if mode == "all" and out.outcome != "timeout":
        out.count = len(out.solutions)
    return out


def _fd_search(problem_fd, decode, mode, limit, budget, out):
    solver = FdSolver(problem_fd, budget)
    t0 = time.perf_counter()
    try:
        if mode == "first":
            a = solver.solve_first()
            out.solutions = [decode(a)] if a is not None else []
        elif mode == "all":
            out.solutions = [decode(a) for a in solver.solve_all(limit)]
        else:
            def on_incumbent(a, v):
                out.incumbents.append((time.perf_counter() - t0, v))
                out.solutions.append(decode(a))

            res = solver.maximize(on_incumbent)
            out.value = None if res is None else res[1]
        out.outcome = "sat" if out.solutions else "unsat"
    except SearchTimeout as e:
        out.outcome = "timeout"
        if mode == "all":
            out.solutions = [decode(a) for a in (e.partial or [])]
        elif mode == "first":
            out.solutions = []
        elif out.incumbents:
            out.value = out.incumbents[-1][1]
    out.solve_s = time.perf_counter() - t0
    out.nodes, out.backtracks = solver.stats.nodes, solver.stats.backtracks


def _run_fd(problem, mode, limit, budget, out):
    t0 = time.perf_counter()
    enc = encode_fd(problem)
    out.setup_s = time.perf_counter() - t0
    _fd_search(enc.problem, enc.decode, mode, limit, budget, out)


def _run_declar(problem, paradigm, mode, limit, budget, out):
    t0 = time.perf_counter()
    spec = parse_spec(encode_text(problem, paradigm))
    comp = compile_spec(spec)
    out.setup_s = time.perf_counter() - t0

    def decode(a):
        interp = comp.decompile(a)
        bad = check_interpretation(spec, interp)
        if bad:
            raise VerificationError(f"{paradigm} model violates its specification: {bad[0]}")
        return decode_declar(problem, interp)

    _fd_search(comp.problem, decode, mode, limit, budget, out)


def _run_stable(problem, mode, limit, budget, out):
    if mode == "optimize":
        inst = problem.instance
        t0 = time.perf_counter()

        def builder(bound):
            return ground(parse_program(lp_schedule(inst, bound)))

        def objective(gp, model):
            return min_reserve(inst, decode_stable(problem, gp, model))

        def on_incumbent(value, model, gp):
            out.incumbents.append((time.perf_counter() - t0, value))
            out.solutions.append(decode_stable(problem, gp, model))

        try:
            res = optimize_iterated(builder, objective, budget=budget, on_incumbent=on_incumbent)
            out.outcome = "sat" if res.found else "unsat"
        except SearchTimeout as e:
            res = e.partial
            out.outcome = "timeout"
        out.value = res.value
        out.setup_s, out.solve_s = res.setup_time, res.solve_time
        return
    t0 = time.perf_counter()
    gp = ground(parse_program(encode_text(problem, "stable")))
    t1 = time.perf_counter()
    out.setup_s = t1 - t0
    left = None if budget is None else max(0.0, budget - out.setup_s)
    solver = StableSolver(gp, left)
    try:
        models = solver.all(1 if mode == "first" else limit)
        out.outcome = "sat" if models else "unsat"
    except SearchTimeout as e:
        models = (e.partial or []) if mode == "all" else []
        out.outcome = "timeout"
    out.solutions = [decode_stable(problem, gp, m) for m in models]
    out.solve_s = time.perf_counter() - t1
    out.nodes, out.backtracks = solver.stats.choices, solver.stats.conflicts
