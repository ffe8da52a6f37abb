from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from cspbench.errors import StructuralError
from cspbench.fd.constraints import Linear, OccupancyChannel
from cspbench.fd.domain import FdDomain

INT64_MAX = 2**63 - 1


@dataclass
class FdVar:
    id: int
    domain: FdDomain
    degree: int = 0
    name: str | None = None

    @property
    def label(self):
        return self.name if self.name is not None else f"x{self.id}"


@dataclass
class CspProblem:
    """Variables with finite integer domains, constraints, optional objective.

    ``search_vars`` optionally names the decision variables labelled first;
    the remaining variables are labelled afterwards if propagation has not
    already fixed them.
    """

    vars: list[FdVar] = field(default_factory=list)
    constraints: list = field(default_factory=list)
    objective: int | None = None
    search_vars: tuple[int, ...] | None = None

    def new_var(self, domain, name: str | None = None) -> int:
        if not isinstance(domain, FdDomain):
            domain = FdDomain.of(domain)
        v = FdVar(len(self.vars), domain, 0, name)
        self.vars.append(v)
        return v.id

    def new_vars(self, count: int, domain, prefix: str = "x") -> list[int]:
        return [self.new_var(domain, f"{prefix}{i}") for i in range(count)]

    def add(self, constraint) -> None:
        for vid in set(constraint.scope()):
            if not 0 <= vid < len(self.vars):
                raise StructuralError(f"constraint {constraint!r} references unknown variable {vid}")
            self.vars[vid].degree += 1
        self.constraints.append(constraint)

    def extend(self, constraints: Iterable) -> None:
        for c in constraints:
            self.add(c)

    def domains(self) -> list[tuple[int, ...]]:
        return [v.domain.values for v in self.vars]

    def var_by_name(self, name: str) -> int:
        for v in self.vars:
            if v.name == name:
                return v.id
        raise KeyError(name)

    def is_solution(self, assignment: Sequence[int]) -> bool:
        """Check a total assignment against original domains and all constraints."""
        if len(assignment) != len(self.vars):
            return False
        for v, val in zip(self.vars, assignment):
            if val not in v.domain:
                return False
        return all(c.holds(assignment) for c in self.constraints)

    def validate(self) -> None:
        """Raise :class:`StructuralError` on dangling ids, bad channels or overflow."""
        n = len(self.vars)
        for i, v in enumerate(self.vars):
            if v.id != i:
                raise StructuralError(f"variable at position {i} has id {v.id}")
        degree = [0] * n
        for c in self.constraints:
            for vid in set(c.scope()):
                if not 0 <= vid < n:
                    raise StructuralError(f"constraint {c!r} references unknown variable {vid}")
                degree[vid] += 1
            if isinstance(c, OccupancyChannel):
                for vid in c.occ:
                    if not set(self.vars[vid].domain.values) <= {0, 1}:
                        raise StructuralError(f"occupancy variable {vid} has a non 0/1 domain")
            elif isinstance(c, Linear):
                worst = abs(c.bound)
                for coef, vid in c.terms:
                    d = self.vars[vid].domain
                    if len(d):
                        worst += abs(coef) * max(abs(d.min), abs(d.max))
                if worst > INT64_MAX:
                    raise StructuralError(f"linear constraint may overflow 64-bit arithmetic: {c!r}")
        for v, d in zip(self.vars, degree):
            v.degree = d
        if self.objective is not None and not 0 <= self.objective < n:
            raise StructuralError(f"objective references unknown variable {self.objective}")
        if self.search_vars is not None:
            for vid in self.search_vars:
                if not 0 <= vid < n:
                    raise StructuralError(f"search variable {vid} does not exist")
