"""Independent checkers used by the test-suite.

Nothing here imports solver or propagator code; these evaluate constraints
straight from their definitions.
"""
from itertools import product


def fd_holds(kind, fields, a):
    """Evaluate one FD constraint given as (kind name, field dict) on assignment ``a``."""
    if kind == "NotEqual":
        return a[fields["x"]] != a[fields["y"]]
    if kind == "NotEqualOffset":
        return abs(a[fields["x"]] - a[fields["y"]]) != fields["c"]
    if kind == "Linear":
        s = 0
        for c, v in fields["terms"]:
            s += c * a[v]
        rel, b = fields["rel"], fields["bound"]
        return s <= b if rel == "<=" else (s == b if rel == "=" else s != b)
    if kind == "AllDifferent":
        vals = [a[v] for v in fields["vars"]]
        return len(vals) == len(set(vals))
    if kind == "OccupancyChannel":
        s, d, off = a[fields["start"]], fields["duration"], fields.get("offset", 0)
        return all(a[v] == int(s <= off + i < s + d) for i, v in enumerate(fields["occ"]))
    if kind == "MinOf":
        return a[fields["result"]] == min(a[v] for v in fields["args"])
    raise ValueError(kind)


def describe(constraint):
    """Turn a constraint dataclass into (kind, fields) without calling its methods."""
    kind = type(constraint).__name__
    fields = dict(vars(constraint)) if hasattr(constraint, "__dict__") else {
        f: getattr(constraint, f) for f in constraint.__dataclass_fields__}
    return kind, fields


def brute_force_solutions(domains, constraints):
    """All assignments over the product of ``domains`` satisfying ``constraints``."""
    descs = [describe(c) for c in constraints]
    out = []
    for a in product(*domains):
        if all(fd_holds(k, f, a) for k, f in descs):
            out.append(a)
    return out


def queens_count_product(n):
    """n-queens by the full n^n product, rows -> columns."""
    count = 0
    for cols in product(range(1, n + 1), repeat=n):
        ok = True
        for i in range(n):
            for j in range(i + 1, n):
                if cols[i] == cols[j] or abs(cols[i] - cols[j]) == j - i:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            count += 1
    return count


def least_model(rules, extra=0):
    """Least model of definite rules given as (head_bit, body_mask) pairs, as a bitmask."""
    m = extra
    changed = True
    while changed:
        changed = False
        for head, body in rules:
            if body & m == body and not m & head:
                m |= head
                changed = True
    return m


def _sat(pos, neg, s):
    return all(s >> a & 1 for a in pos) and not any(s >> a & 1 for a in neg)


def stable_models_bruteforce(gp):
    """Stable models of a ground program by checking all 2^n atom sets.

    Choice rules are read natively: in the reduct, a chosen head that is in the
    candidate is derivable from the positive body, and the bounds are checked
    directly on the candidate. Weight rules use the weight-constraint reduct.
    Returns a set of frozensets of atom ids.
    """
    n = len(gp.atoms)
    rules = [(type(r).__name__, r) for r in gp.rules]
    facts = 0
    for a in gp.facts:
        facts |= 1 << a
    out = set()
    for raw in range(1 << n):
        s = raw << 1
        if s & facts != facts:
            continue
        ok = True
        definite = []
        weights = []
        for kind, r in rules:
            if kind == "GConstraint":
                if _sat(r.pos, r.neg, s):
                    ok = False
                    break
            elif kind == "GNormal":
                if not any(s >> a & 1 for a in r.neg):
                    definite.append((r.head, r.pos))
            elif kind == "GChoice":
                if _sat(r.pos, r.neg, s):
                    k = sum(s >> a & 1 for a in r.heads)
                    if not r.lower <= k <= r.upper:
                        ok = False
                        break
                if not any(s >> a & 1 for a in r.neg):
                    definite.extend((a, r.pos) for a in r.heads if s >> a & 1)
            elif kind == "GWeight":
                total = sum(w for a, p, w in r.elements if bool(s >> a & 1) == p)
                if r.head is None:
                    if total >= r.lower:
                        ok = False
                        break
                else:
                    lower = r.lower - sum(w for a, p, w in r.elements if not p and not s >> a & 1)
                    weights.append((r.head, lower, [(a, w) for a, p, w in r.elements if p]))
            else:
                raise ValueError(kind)
        if not ok:
            continue
        m = facts
        changed = True
        while changed:
            changed = False
            for h, pos in definite:
                if not m >> h & 1 and all(m >> a & 1 for a in pos):
                    m |= 1 << h
                    changed = True
            for h, lower, elems in weights:
                if not m >> h & 1 and sum(w for a, w in elems if m >> a & 1) >= lower:
                    m |= 1 << h
                    changed = True
        if m == s:
            out.add(frozenset(a for a in range(1, n + 1) if s >> a & 1))
    return out
