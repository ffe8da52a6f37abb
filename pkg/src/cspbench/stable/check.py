"""Stability check through the reduct of the normalized program."""
from __future__ import annotations

from cspbench.stable.normalize import NRule, NormalizedProgram, WRule, normalize


def _lit_true(a, positive, m):
    return (a in m) == positive


def weight_sum(elements, m) -> int:
    return sum(w for a, p, w in elements if _lit_true(a, p, m))


def extend(gp, norm: NormalizedProgram, candidate) -> set:
    """Add the complement and bound-check atoms implied by ``candidate``."""
    m = set(candidate)
    for (idx, a), c in norm.complements.items():
        r = gp.rules[idx]
        if a not in m and all(p in m for p in r.pos) and not any(q in m for q in r.neg):
            m.add(c)
    # bound-check atoms depend only on original atoms
    for r in norm.rules:
        if isinstance(r, WRule) and r.head in norm.aux and weight_sum(r.elements, m) >= r.lower:
            m.add(r.head)
    return m


def least_model(norm: NormalizedProgram, m) -> set:
    """Least model of the reduct of ``norm`` with respect to ``m``."""
    normal, weight = [], []
    for r in norm.rules:
        if r.head is None:
            continue
        if isinstance(r, NRule):
            if not any(q in m for q in r.neg):
                normal.append((r.head, r.pos))
        else:
            lower = r.lower - sum(w for a, p, w in r.elements if not p and a not in m)
            weight.append((r.head, lower, [(a, w) for a, p, w in r.elements if p]))
    lm = set(norm.facts)
    changed = True
    while changed:
        changed = False
        for h, pos in normal:
            if h not in lm and all(p in lm for p in pos):
                lm.add(h)
                changed = True
        for h, lower, elems in weight:
            if h not in lm and sum(w for a, w in elems if a in lm) >= lower:
                lm.add(h)
                changed = True
    return lm


def violated(norm: NormalizedProgram, m) -> bool:
    for r in norm.rules:
        if r.head is not None:
            continue
        if isinstance(r, NRule):
            if all(p in m for p in r.pos) and not any(q in m for q in r.neg):
                return True
        elif weight_sum(r.elements, m) >= r.lower:
            return True
    return False


def check_stable(gp, candidate, norm: NormalizedProgram | None = None) -> bool:
    """True iff ``candidate`` (original atom ids) is a stable model of ``gp``."""
    norm = norm or normalize(gp)
    cand = set(candidate)
    if any(not 1 <= a <= norm.n_original for a in cand):
        return False
    m = extend(gp, norm, cand)
    if violated(norm, m):
        return False
    return least_model(norm, m) == m

