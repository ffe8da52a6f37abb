"""Propositional programs: atom table and ground rules."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable


@dataclass(frozen=True, order=True)
class GroundAtom:
    pred: str
    args: tuple = ()

    def __str__(self):
        if not self.args:
            return self.pred
        return f"{self.pred}({','.join(map(str, self.args))})"


class AtomTable:
    """Bijection between ground atoms and dense ids starting at 1."""

    def __init__(self, atoms: Iterable[GroundAtom] = ()):
        self._atoms: list[GroundAtom] = []
        self._ids: dict[GroundAtom, int] = {}
        for a in atoms:
            self.add(a)

    def add(self, atom: GroundAtom) -> int:
        i = self._ids.get(atom)
        if i is None:
            self._atoms.append(atom)
            i = self._ids[atom] = len(self._atoms)
        return i

    def id(self, atom: GroundAtom) -> int:
        return self._ids[atom]

    def get(self, atom: GroundAtom, default=None):
        return self._ids.get(atom, default)

    def atom(self, i: int) -> GroundAtom:
        if i < 1:
            raise KeyError(i)
        return self._atoms[i - 1]

    def __contains__(self, atom):
        return atom in self._ids

    def __len__(self):
        return len(self._atoms)

    def __iter__(self):
        return iter(range(1, len(self._atoms) + 1))

    def atoms(self):
        return list(self._atoms)

    def __eq__(self, other):
        return isinstance(other, AtomTable) and self._atoms == other._atoms

    def __repr__(self):
        return f"AtomTable({len(self)} atoms)"


@dataclass(frozen=True)
class GNormal:
    head: int
    pos: tuple = ()
    neg: tuple = ()

    def __post_init__(self):
        if self.head in self.pos or self.head in self.neg:
            raise ValueError("normal rule head may not occur in its own body")


@dataclass(frozen=True)
class GChoice:
    lower: int
    heads: tuple
    upper: int
    pos: tuple = ()
    neg: tuple = ()

    def __post_init__(self):
        if not 0 <= self.lower <= self.upper <= len(self.heads):
            raise ValueError(f"choice bounds {self.lower}..{self.upper} invalid for {len(self.heads)} heads")
        if len(set(self.heads)) != len(self.heads):
            raise ValueError("choice heads must be distinct")


@dataclass(frozen=True)
class GConstraint:
    pos: tuple = ()
    neg: tuple = ()


@dataclass(frozen=True)
class GWeight:
    """``head :- lower <= sum of weights of satisfied elements``; no head means a constraint.

    ``elements`` are ``(atom, positive, weight)`` triples with weight > 0.
    """

    head: int | None
    lower: int
    elements: tuple

    def __post_init__(self):
        for _, _, w in self.elements:
            if w <= 0:
                raise ValueError("weights must be positive")


GroundRule = GNormal | GChoice | GConstraint | GWeight


def rule_atoms(r) -> list[int]:
    if isinstance(r, GNormal):
        return [r.head, *r.pos, *r.neg]
    if isinstance(r, GChoice):
        return [*r.heads, *r.pos, *r.neg]
    if isinstance(r, GConstraint):
        return [*r.pos, *r.neg]
    out = [a for a, _, _ in r.elements]
    if r.head is not None:
        out.append(r.head)
    return out


@dataclass
class GroundProgram:
    atoms: AtomTable
    rules: tuple
    facts: frozenset
    stats: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        self.rules = tuple(self.rules)
        self.facts = frozenset(self.facts)
        n = len(self.atoms)
        for a in self.facts:
            if not 1 <= a <= n:
                raise ValueError(f"fact id {a} not in atom table")
        for r in self.rules:
            for a in rule_atoms(r):
                if not 1 <= a <= n:
                    raise ValueError(f"rule {r!r} references unknown atom id {a}")

    def name(self, i: int) -> str:
        return str(self.atoms.atom(i))

    def model_names(self, model) -> list[str]:
        return sorted(str(self.atoms.atom(i)) for i in model)


def make_normal(head, pos, neg):
    """Build a normal rule, rewriting self-referencing bodies.

    ``a :- a, ...`` can never support ``a`` and is dropped (returns None);
    ``a :- not a, B`` is equivalent to the constraint ``:- not a, B``.
    """
    pos = tuple(dict.fromkeys(pos))
    neg = tuple(dict.fromkeys(neg))
    if head in pos:
        return None
    if head in neg:
        return GConstraint(pos, neg)
    return GNormal(head, pos, neg)
