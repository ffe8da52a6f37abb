"""Declarative specifications (``.dl``): parsing, compilation to FD, direct checking."""
from cspbench.declar.ast import DeclarSpec, Interpretation, SpecError
from cspbench.declar.compile import Compiled, compile_spec
from cspbench.declar.evaluate import check_interpretation, objective_value
from cspbench.declar.parser import parse_spec
from cspbench.declar.semantics import defined_extensions, eval_defined

__all__ = [
    "DeclarSpec", "Interpretation", "SpecError", "Compiled", "compile_spec",
    "check_interpretation", "objective_value", "parse_spec", "defined_extensions",
    "eval_defined",
]
