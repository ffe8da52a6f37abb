from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Iterable


@dataclass(frozen=True)
class FdDomain:
    """Finite ordered set of integers, stored as a strictly increasing tuple."""

    values: tuple[int, ...]

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        for a, b in zip(vals, vals[1:]):
            if a >= b:
                raise ValueError("domain values must be strictly increasing")
        object.__setattr__(self, "values", vals)

    @classmethod
    def interval(cls, low: int, high: int) -> "FdDomain":
        return cls(tuple(range(low, high + 1)))

    @classmethod
    def of(cls, values: Iterable[int]) -> "FdDomain":
        return cls(tuple(sorted(set(values))))

    @property
    def min(self) -> int:
        return self.values[0]

    @property
    def max(self) -> int:
        return self.values[-1]

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __contains__(self, v):
        return contains(self.values, v)

    def __repr__(self):
        vals = self.values
        if len(vals) > 2 and vals[-1] - vals[0] == len(vals) - 1:
            return f"FdDomain({vals[0]}..{vals[-1]})"
        return f"FdDomain({set(vals) if vals else '{}'})"


# Helpers on raw sorted tuples; the search state uses tuples directly.

def contains(vals: tuple, v: int) -> bool:
    i = bisect_left(vals, v)
    return i < len(vals) and vals[i] == v


def remove(vals: tuple, v: int) -> tuple:
    i = bisect_left(vals, v)
    if i < len(vals) and vals[i] == v:
        return vals[:i] + vals[i + 1:]
    return vals


def restrict(vals: tuple, lo: int | None = None, hi: int | None = None) -> tuple:
    """Keep the values within ``[lo, hi]``; ``None`` leaves that side open."""
    i = 0 if lo is None else bisect_left(vals, lo)
    j = len(vals) if hi is None else bisect_right(vals, hi)
    if i == 0 and j == len(vals):
        return vals
    return vals[i:j]
