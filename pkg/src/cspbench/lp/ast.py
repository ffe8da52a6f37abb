"""Syntax tree for the non-ground rule language.

All nodes are frozen dataclasses; structural equality is plain ``==``.
Source positions are kept out of equality.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Arith:
    """``op`` is ``+`` or ``-`` (two args) or ``abs`` (one arg)."""

    op: str
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        want = 1 if self.op == "abs" else 2
        if self.op not in ("+", "-", "abs") or len(self.args) != want:
            raise ValueError(f"bad arithmetic term {self.op}/{len(self.args)}")


Term = Union[Var, Const, Arith]


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))

    @property
    def arity(self):
        return len(self.args)


@dataclass(frozen=True)
class Lit:
    atom: Atom
    positive: bool = True


@dataclass(frozen=True)
class Builtin:
    """Comparison between integer terms; ``rel`` in ``<``, ``<=``, ``=``, ``!=``."""

    rel: str
    lhs: Term
    rhs: Term


Literal = Union[Lit, Builtin]


@dataclass(frozen=True)
class ChoiceElement:
    atom: Atom
    guards: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "guards", tuple(self.guards))


@dataclass(frozen=True)
class WeightedLiteral:
    lit: Lit
    weight: Term | None = None
    guards: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "guards", tuple(self.guards))


def _pos():
    return field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class DomainDecl:
    pred: str
    low: int
    high: int
    pos: tuple = _pos()


@dataclass(frozen=True)
class Fact:
    atom: Atom
    pos: tuple = _pos()


@dataclass(frozen=True)
class Normal:
    head: Atom
    body: tuple
    pos: tuple = _pos()


@dataclass(frozen=True)
class Choice:
    """``lower {elements} upper :- body``; omitted bounds are ``None``."""

    lower: int | None
    elements: tuple
    upper: int | None
    body: tuple = ()
    pos: tuple = _pos()


@dataclass(frozen=True)
class IntegrityConstraint:
    body: tuple
    pos: tuple = _pos()


@dataclass(frozen=True)
class AggregateBody:
    """``head :- bound #count{...}, domain literals``.

    The body holds when the count (or weight sum) of the satisfied elements
    is at least ``bound``. ``body`` lists only positive domain atoms and
    built-ins; they are evaluated away during grounding.
    """

    head: Atom | None
    agg: str
    bound: Term
    elements: tuple
    body: tuple = ()
    pos: tuple = _pos()


Rule = Union[DomainDecl, Fact, Normal, Choice, IntegrityConstraint, AggregateBody]


@dataclass(frozen=True)
class RuleProgram:
    rules: tuple
    predicates: dict = field(default_factory=dict, hash=False)
    domain_predicates: frozenset = frozenset()

    def __eq__(self, other):
        return (isinstance(other, RuleProgram) and self.rules == other.rules
                and self.predicates == other.predicates
                and self.domain_predicates == other.domain_predicates)

    def __hash__(self):
        return hash(self.rules)


def term_vars(t, out=None):
    out = [] if out is None else out
    if isinstance(t, Var):
        if t.name not in out:
            out.append(t.name)
    elif isinstance(t, Arith):
        for a in t.args:
            term_vars(a, out)
    return out


def atom_vars(a: Atom, out=None):
    out = [] if out is None else out
    for t in a.args:
        term_vars(t, out)
    return out


def literal_vars(lit, out=None):
    out = [] if out is None else out
    if isinstance(lit, Lit):
        return atom_vars(lit.atom, out)
    term_vars(lit.lhs, out)
    term_vars(lit.rhs, out)
    return out
