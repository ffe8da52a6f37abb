"""Textual ground format.

Three sections, each introduced by a header line::

    #atoms
    1 d(1)
    2 pos(1,1)
    #facts
    d(1)
    #rules
    a :- b, not c.
    :- a, b.
    #choice 1 {pos(1,1); pos(1,2)} 1 :- q.
    #weight h :- 3 {a = 1; not b = 2}.

Rules refer to atoms by name; names are resolved through the atom table.
Blank lines and lines starting with ``%`` are ignored.
"""
from __future__ import annotations

import re

from cspbench.grounder.program import (
    AtomTable, GChoice, GConstraint, GNormal, GroundAtom, GroundProgram, GWeight,
)


class GroundFormatError(ValueError):
    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


_NAME = re.compile(r"\s*([a-z][A-Za-z0-9_]*)(?:\(([-0-9,\s]*)\))?\s*")


def parse_atom(text: str) -> GroundAtom:
    m = _NAME.fullmatch(text)
    if not m:
        raise GroundFormatError(f"bad atom {text!r}")
    args = () if m.group(2) is None else tuple(int(x) for x in m.group(2).split(","))
    return GroundAtom(m.group(1), args)


def _lit(gp, a, positive=True):
    return gp.name(a) if positive else f"not {gp.name(a)}"


def _body(gp, pos, neg):
    return ", ".join([_lit(gp, a) for a in pos] + [_lit(gp, a, False) for a in neg])


def format_rule(gp: GroundProgram, r) -> str:
    if isinstance(r, GNormal):
        return f"{gp.name(r.head)} :- {_body(gp, r.pos, r.neg)}."
    if isinstance(r, GConstraint):
        return f":- {_body(gp, r.pos, r.neg)}."
    if isinstance(r, GChoice):
        heads = "; ".join(gp.name(a) for a in r.heads)
        b = _body(gp, r.pos, r.neg)
        return f"#choice {r.lower} {{{heads}}} {r.upper}" + (f" :- {b}." if b else ".")
    if isinstance(r, GWeight):
        elems = "; ".join(f"{_lit(gp, a, p)} = {w}" for a, p, w in r.elements)
        head = gp.name(r.head) + " " if r.head is not None else ""
        return f"#weight {head}:- {r.lower} {{{elems}}}."
    raise TypeError(r)


def write_ground(gp: GroundProgram) -> str:
    out = ["#atoms"]
    out += [f"{i} {gp.name(i)}" for i in gp.atoms]
    out.append("#facts")
    out += [gp.name(i) for i in sorted(gp.facts)]
    out.append("#rules")
    out += [format_rule(gp, r) for r in gp.rules]
    return "\n".join(out) + "\n"


def _split(text, sep):
    """Split on ``sep`` outside parentheses."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
            continue
        depth += (ch == "(") - (ch == ")")
        cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


class _Reader:
    def __init__(self):
        self.table = AtomTable()

    def atom(self, name, line):
        try:
            ga = parse_atom(name)
        except (GroundFormatError, ValueError):
            raise GroundFormatError(f"bad atom {name!r}", line) from None
        i = self.table.get(ga)
        if i is None:
            raise GroundFormatError(f"atom {name} not in table", line)
        return i

    def lit(self, text, line):
        if text.startswith("not "):
            return self.atom(text[4:], line), False
        return self.atom(text, line), True

    def body(self, text, line):
        pos, neg = [], []
        for part in _split(text, ","):
            a, p = self.lit(part, line)
            (pos if p else neg).append(a)
        return tuple(pos), tuple(neg)

    def rule(self, s, line):
        if not s.endswith("."):
            raise GroundFormatError("rule must end with '.'", line)
        s = s[:-1].strip()
        if s.startswith("#choice"):
            m = re.fullmatch(r"#choice\s+(\d+)\s*\{(.*)\}\s*(\d+)\s*(?::-(.*))?", s)
            if not m:
                raise GroundFormatError("bad choice rule", line)
            heads = tuple(self.atom(h, line) for h in _split(m.group(2), ";"))
            pos, neg = self.body(m.group(4) or "", line)
            return GChoice(int(m.group(1)), heads, int(m.group(3)), pos, neg)
        if s.startswith("#weight"):
            m = re.fullmatch(r"#weight\s*(.*?)\s*:-\s*(-?\d+)\s*\{(.*)\}", s)
            if not m:
                raise GroundFormatError("bad weight rule", line)
            head = self.atom(m.group(1), line) if m.group(1) else None
            elems = []
            for e in _split(m.group(3), ";"):
                lit, _, w = e.rpartition("=")
                a, p = self.lit(lit.strip(), line)
                elems.append((a, p, int(w)))
            return GWeight(head, int(m.group(2)), tuple(elems))
        head, sep, body = s.partition(":-")
        if not sep:
            raise GroundFormatError("expected ':-'", line)
        pos, neg = self.body(body, line)
        if not head.strip():
            return GConstraint(pos, neg)
        return GNormal(self.atom(head.strip(), line), pos, neg)


def read_ground(text: str) -> GroundProgram:
    """Inverse of :func:`write_ground`."""
    rd = _Reader()
    facts, rules = [], []
    section = None
    for n, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        if not s or s.startswith("%"):
            continue
        if s in ("#atoms", "#facts", "#rules"):
            section = s
            continue
        try:
            if section == "#atoms":
                num, _, name = s.partition(" ")
                if int(num) != len(rd.table) + 1:
                    raise GroundFormatError("atom ids must be dense and ascending", n)
                ga = parse_atom(name)
                if ga in rd.table:
                    raise GroundFormatError(f"duplicate atom {name}", n)
                rd.table.add(ga)
            elif section == "#facts":
                facts.append(rd.atom(s, n))
            elif section == "#rules":
                rules.append(rd.rule(s, n))
            else:
                raise GroundFormatError("content before a section header", n)
        except GroundFormatError:
            raise
        except ValueError as e:
            raise GroundFormatError(str(e), n) from None
    return GroundProgram(rd.table, tuple(rules), frozenset(facts))
