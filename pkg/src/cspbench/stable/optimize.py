"""Optimization by re-solving under increasing lower bounds."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

from cspbench.errors import SearchTimeout
from cspbench.stable.solver import StableSolver

log = logging.getLogger(__name__)


@dataclass
class IteratedResult:
    model: frozenset | None
    value: int | None
    program: object = None
    calls: int = 0
    incumbents: list = field(default_factory=list)  # (seconds, value)
    setup_time: float = 0.0
    solve_time: float = 0.0

    @property
    def found(self) -> bool:
        return self.model is not None


def optimize_iterated(builder, objective, step: int = 1, start=None, budget: float | None = None,
                      on_incumbent=None) -> IteratedResult:
    """Maximize ``objective(gp, model)`` over programs ``builder(bound)``.

    ``builder(None)`` (or ``builder(start)``) gives the first program; after
    each model of value v the next program is ``builder(v + step)``. The loop
    stops at the first unsatisfiable call. A budget overrun raises
    :class:`SearchTimeout` whose ``partial`` is the result so far.
    """
    t0 = time.perf_counter()
    res = IteratedResult(None, None)
    bound = start
    while True:
        left = None if budget is None else budget - (time.perf_counter() - t0)
        if left is not None and left <= 0:
            raise SearchTimeout("iterated optimization exceeded its budget", partial=res)
        ts = time.perf_counter()
        gp = builder(bound)
        res.calls += 1
        tm = time.perf_counter()
        res.setup_time += tm - ts
        try:
            model = StableSolver(gp, budget=left).first()
        except SearchTimeout:
            res.solve_time += time.perf_counter() - tm
            raise SearchTimeout("iterated optimization exceeded its budget", partial=res) from None
        res.solve_time += time.perf_counter() - tm
        if model is None:
            return res
        value = objective(gp, model)
        res.model, res.value, res.program = model, value, gp
        res.incumbents.append((time.perf_counter() - t0, value))
        log.info("incumbent %s after %d calls", value, res.calls)
        if on_incumbent is not None:
            on_incumbent(value, model, gp)
        bound = value + step
