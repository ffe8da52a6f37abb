"""Finite-domain constraint engine: domains, propagation, labelling, branch and bound."""
from cspbench.fd.constraints import (
    EQ, LE, NE, AllDifferent, Linear, MinOf, NotEqual, NotEqualOffset, OccupancyChannel,
)
from cspbench.fd.domain import FdDomain
from cspbench.fd.problem import CspProblem, FdVar
from cspbench.fd.propagate import PropagationOutcome, Propagator, propagate
from cspbench.fd.search import FdSolver, SearchStats, maximize, solve_all, solve_first

__all__ = [
    "EQ", "LE", "NE", "AllDifferent", "Linear", "MinOf", "NotEqual", "NotEqualOffset",
    "OccupancyChannel", "FdDomain", "CspProblem", "FdVar", "PropagationOutcome",
    "Propagator", "propagate", "FdSolver", "SearchStats", "maximize", "solve_all",
    "solve_first",
]
