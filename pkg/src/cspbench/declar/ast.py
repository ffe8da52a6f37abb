"""Syntax tree of the ``.dl`` specification dialect."""
from __future__ import annotations

from dataclasses import dataclass, field


class SpecError(ValueError):
    """Malformed or ill-typed specification."""

    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


# -- terms -----------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class FTerm:
    """Application of a declared function, e.g. ``pos(X1)``."""

    func: str
    args: tuple


@dataclass(frozen=True)
class Bin:
    op: str  # "+" or "-"
    left: object
    right: object


@dataclass(frozen=True)
class Abs:
    arg: object


@dataclass(frozen=True)
class Agg:
    """``#count{L1,..: body}`` or ``#sum{w, L1,..: body}`` over local variables."""

    kind: str
    weight: object | None
    locals: tuple
    body: tuple


# -- literals ---------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple = ()
    positive: bool = True

    def negate(self):
        return Atom(self.pred, self.args, not self.positive)


NEGATE = {"<": ">=", "<=": ">", ">": "<=", ">=": "<", "=": "!=", "!=": "="}


@dataclass(frozen=True)
class Cmp:
    rel: str
    lhs: object
    rhs: object

    def negate(self):
        return Cmp(NEGATE[self.rel], self.lhs, self.rhs)


def compare(rel, a, b) -> bool:
    if rel == "<":
        return a < b
    if rel == "<=":
        return a <= b
    if rel == ">":
        return a > b
    if rel == ">=":
        return a >= b
    if rel == "=":
        return a == b
    return a != b


# -- statements -------------------------------------------------------------

@dataclass
class SortDecl:
    name: str
    low: int
    high: int
    line: int = 0

    @property
    def values(self):
        return range(self.low, self.high + 1)


@dataclass
class FuncDecl:
    name: str
    args: tuple
    range: str
    prop: str = "none"  # none | injective | bijective
    open: bool = False
    line: int = 0


@dataclass
class OpenDecl:
    name: str
    args: tuple
    line: int = 0


@dataclass
class PredDecl:
    name: str
    args: tuple
    line: int = 0


@dataclass
class DefRule:
    head: Atom
    body: tuple
    line: int = 0
    types: dict = field(default_factory=dict, compare=False)


@dataclass
class Con:
    """Every instance satisfying ``guard`` must satisfy each literal of ``conseq``."""

    conseq: tuple
    guard: tuple
    line: int = 0
    types: dict = field(default_factory=dict, compare=False)


@dataclass
class Ic:
    """No instance may satisfy ``body``."""

    body: tuple
    line: int = 0
    types: dict = field(default_factory=dict, compare=False)


@dataclass
class Occupy:
    """``occupy p(A..,T) : f(A..) for D <- guard``: p(A..,T) iff f(A..) <= T < f(A..) + D."""

    atom: Atom
    start: FTerm
    duration: object
    guard: tuple
    line: int = 0
    types: dict = field(default_factory=dict, compare=False)


@dataclass
class Maximize:
    """``maximize min V in s : expr <- guard`` (or ``maximize expr``)."""

    var: str | None
    sort: str | None
    expr: object
    guard: tuple
    line: int = 0
    types: dict = field(default_factory=dict, compare=False)


@dataclass
class DeclarSpec:
    sorts: dict = field(default_factory=dict)
    funcs: dict = field(default_factory=dict)
    opens: dict = field(default_factory=dict)
    preds: dict = field(default_factory=dict)
    rules: list = field(default_factory=list)
    constraints: list = field(default_factory=list)
    occupies: list = field(default_factory=list)
    objective: Maximize | None = None

    def kind(self, name):
        if name in self.sorts:
            return "sort"
        if name in self.funcs:
            return "func"
        if name in self.opens:
            return "open"
        if name in self.preds:
            return "pred"
        return None

    def atom_sorts(self, name):
        """Argument sorts of ``name`` used as an atom."""
        k = self.kind(name)
        if k == "sort":
            return (name,)
        if k == "func":
            f = self.funcs[name]
            return tuple(f.args) + (f.range,)
        if k == "open":
            return tuple(self.opens[name].args)
        if k == "pred":
            return tuple(self.preds[name].args)
        return None

    def sort_values(self, name):
        return self.sorts[name].values


@dataclass
class Interpretation:
    """Function tables and the set of true open atoms."""

    functions: dict
    atoms: dict

    def delta(self):
        return sorted((p, t) for p, ts in self.atoms.items() for t in ts)
