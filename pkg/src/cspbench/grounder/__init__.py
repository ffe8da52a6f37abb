"""Grounding of rule programs into propositional programs."""
from cspbench.grounder.ground import eval_builtin, eval_term, ground
from cspbench.grounder.naive import naive_ground
from cspbench.grounder.program import (
    AtomTable, GChoice, GConstraint, GNormal, GroundAtom, GroundProgram, GWeight, make_normal,
    rule_atoms,
)
from cspbench.grounder.textfmt import GroundFormatError, parse_atom, read_ground, write_ground

__all__ = [
    "AtomTable", "GChoice", "GConstraint", "GNormal", "GroundAtom", "GroundFormatError",
    "GroundProgram", "GWeight", "eval_builtin", "eval_term", "ground", "make_normal",
    "naive_ground", "parse_atom", "read_ground", "rule_atoms", "write_ground",
]
