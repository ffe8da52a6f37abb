"""Translation of ground programs into normal, constraint and weight rules.

A choice rule ``l {a1..an} u :- B`` becomes, for every head ``ai``::

    ai  :- B, not ~ai.
    ~ai :- B, not ai.

with a fresh complement atom ``~ai`` per (rule, head) pair, plus bound checks
that only fire when ``B`` holds::

    c :- u+1 <= [a1..an].         :- B, c.      (skipped when u = n)
    d :- n-l+1 <= [not a1..an].   :- B, d.      (skipped when l = 0)

Complement and check atoms get ids above the original atom table, so they
never reach user output.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from cspbench.grounder.program import GChoice, GConstraint, GNormal, GroundProgram, GWeight


@dataclass(frozen=True)
class NRule:
    """Normal rule or constraint (``head`` None)."""

    head: int | None
    pos: tuple
    neg: tuple


@dataclass(frozen=True)
class WRule:
    """``head :- lower <= sum``; a constraint forbids the sum reaching ``lower`` when head is None."""

    head: int | None
    lower: int
    elements: tuple


@dataclass
class NormalizedProgram:
    n_original: int
    n_atoms: int
    rules: list
    facts: frozenset
    complements: dict = field(default_factory=dict)
    aux: dict = field(default_factory=dict)

    def project(self, model) -> frozenset:
        return frozenset(a for a in model if a <= self.n_original)


def normalize(gp: GroundProgram) -> NormalizedProgram:
    n = len(gp.atoms)
    nxt = n
    rules: list = []
    complements: dict = {}
    aux: dict = {}

    def fresh():
        nonlocal nxt
        nxt += 1
        return nxt

    for idx, r in enumerate(gp.rules):
        if isinstance(r, GNormal):
            rules.append(NRule(r.head, tuple(r.pos), tuple(r.neg)))
        elif isinstance(r, GConstraint):
            rules.append(NRule(None, tuple(r.pos), tuple(r.neg)))
        elif isinstance(r, GWeight):
            rules.append(WRule(r.head, r.lower, tuple(r.elements)))
        elif isinstance(r, GChoice):
            body_pos, body_neg = tuple(r.pos), tuple(r.neg)
            for a in r.heads:
                c = fresh()
                complements[(idx, a)] = c
                rules.append(NRule(a, body_pos, body_neg + (c,)))
                rules.append(NRule(c, body_pos, body_neg + (a,)))
            k = len(r.heads)
            if r.upper < k:
                c = fresh()
                aux[c] = (idx, "upper")
                rules.append(WRule(c, r.upper + 1, tuple((a, True, 1) for a in r.heads)))
                rules.append(NRule(None, body_pos + (c,), body_neg))
            if r.lower > 0:
                d = fresh()
                aux[d] = (idx, "lower")
                rules.append(WRule(d, k - r.lower + 1, tuple((a, False, 1) for a in r.heads)))
                rules.append(NRule(None, body_pos + (d,), body_neg))
        else:
            raise TypeError(r)
    return NormalizedProgram(n, nxt, rules, frozenset(gp.facts), complements, aux)
