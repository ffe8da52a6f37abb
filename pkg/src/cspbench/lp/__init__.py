"""Non-ground rule language: syntax tree, parser, printer."""
from cspbench.lp.ast import (
    AggregateBody, Arith, Atom, Builtin, Choice, ChoiceElement, Const, DomainDecl, Fact,
    IntegrityConstraint, Lit, Normal, RuleProgram, Var, WeightedLiteral,
)
from cspbench.lp.parser import (
    ArityError, ParseError, ProgramError, RangeRestrictionError, parse_program, validate,
)
from cspbench.lp.render import render, render_rule, render_term

__all__ = [
    "AggregateBody", "Arith", "Atom", "Builtin", "Choice", "ChoiceElement", "Const",
    "DomainDecl", "Fact", "IntegrityConstraint", "Lit", "Normal", "RuleProgram", "Var",
    "WeightedLiteral", "ArityError", "ParseError", "ProgramError", "RangeRestrictionError",
    "parse_program", "validate", "render", "render_rule", "render_term",
]
