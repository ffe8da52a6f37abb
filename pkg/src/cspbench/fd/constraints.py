"""Constraint records understood by the finite-domain engine.

Each record knows its scope and can check itself against a total
assignment (``holds``). The checks are straight-line and never touch the
propagators in :mod:`cspbench.fd.propagate`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from cspbench.errors import StructuralError

LE, EQ, NE = "<=", "=", "!="
RELATIONS = (LE, EQ, NE)


@dataclass(frozen=True)
class NotEqual:
    x: int
    y: int

    def __post_init__(self):
        if self.x == self.y:
            raise StructuralError("NotEqual needs two distinct variables")

    def scope(self):
        return (self.x, self.y)

    def holds(self, a: Sequence[int]) -> bool:
        return a[self.x] != a[self.y]


@dataclass(frozen=True)
class NotEqualOffset:
    """``|x - y| != c``; the diagonal check between two queens."""

    x: int
    y: int
    c: int

    def __post_init__(self):
        if self.x == self.y:
            raise StructuralError("NotEqualOffset needs two distinct variables")

    def scope(self):
        return (self.x, self.y)

    def holds(self, a: Sequence[int]) -> bool:
        return abs(a[self.x] - a[self.y]) != self.c


@dataclass(frozen=True)
class Linear:
    """``sum(coef * var) rel bound`` with ``rel`` one of ``<=``, ``=``, ``!=``.

    Repeated variables are merged and zero coefficients dropped on
    construction, so ``terms`` always lists distinct variables.
    """

    terms: tuple[tuple[int, int], ...]
    rel: str
    bound: int

    def __post_init__(self):
        if self.rel not in RELATIONS:
            raise StructuralError(f"unknown linear relation {self.rel!r}")
        merged: dict[int, int] = {}
        for coef, var in self.terms:
            merged[var] = merged.get(var, 0) + int(coef)
        terms = tuple((c, v) for v, c in merged.items() if c != 0)
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "bound", int(self.bound))

    def scope(self):
        return tuple(v for _, v in self.terms)

    def holds(self, a: Sequence[int]) -> bool:
        s = sum(c * a[v] for c, v in self.terms)
        if self.rel == LE:
            return s <= self.bound
        if self.rel == EQ:
            return s == self.bound
        return s != self.bound


@dataclass(frozen=True)
class AllDifferent:
    vars: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        if len(set(self.vars)) != len(self.vars):
            raise StructuralError("AllDifferent lists a variable twice")

    def scope(self):
        return self.vars

    def holds(self, a: Sequence[int]) -> bool:
        vals = [a[v] for v in self.vars]
        return len(set(vals)) == len(vals)


@dataclass(frozen=True)
class OccupancyChannel:
    """``occ[i] = 1`` iff ``start <= offset + i < start + duration``.

    ``offset`` is the time slot of ``occ[0]``; slots outside the list are
    simply not represented.
    """

    start: int
    duration: int
    occ: tuple[int, ...]
    offset: int = 0

    def __post_init__(self):
        object.__setattr__(self, "occ", tuple(self.occ))
        if self.duration < 1:
            raise StructuralError("OccupancyChannel duration must be positive")
        if self.start in self.occ or len(set(self.occ)) != len(self.occ):
            raise StructuralError("OccupancyChannel variables must be distinct")

    def scope(self):
        return (self.start,) + self.occ

    def holds(self, a: Sequence[int]) -> bool:
        s = a[self.start]
        for i, v in enumerate(self.occ):
            w = self.offset + i
            if a[v] != (1 if s <= w < s + self.duration else 0):
                return False
        return True


@dataclass(frozen=True)
class MinOf:
    """``result = min(args)``."""

    result: int
    args: tuple[int, ...]

    def __post_init__(self):
        args = tuple(dict.fromkeys(self.args))
        if not args:
            raise StructuralError("MinOf needs at least one argument")
        if self.result in args:
            raise StructuralError("MinOf result may not appear among its args")
        object.__setattr__(self, "args", args)

    def scope(self):
        return (self.result,) + self.args

    def holds(self, a: Sequence[int]) -> bool:
        return a[self.result] == min(a[v] for v in self.args)


FdConstraint = NotEqual | NotEqualOffset | Linear | AllDifferent | OccupancyChannel | MinOf
