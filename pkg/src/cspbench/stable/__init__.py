"""Stable model computation for ground programs."""
from cspbench.stable.check import check_stable, least_model
from cspbench.stable.normalize import NormalizedProgram, NRule, WRule, normalize
from cspbench.stable.optimize import IteratedResult, optimize_iterated
from cspbench.stable.solver import StableSolver, StableStats, solve_stable

__all__ = [
    "IteratedResult", "NRule", "NormalizedProgram", "StableSolver", "StableStats", "WRule",
    "check_stable", "least_model", "normalize", "optimize_iterated", "solve_stable",
]
