"""Parser for ``.lp`` rule programs.

See ``docs/lp-grammar.md`` for the grammar. Any input either parses or
raises a :class:`ProgramError` subclass carrying a line and column.
"""
from __future__ import annotations

import re

from cspbench.lp.ast import (
    AggregateBody, Arith, Atom, Builtin, Choice, ChoiceElement, Const, DomainDecl, Fact,
    IntegrityConstraint, Lit, Normal, RuleProgram, Var, WeightedLiteral, atom_vars,
    literal_vars, term_vars,
)


class ProgramError(ValueError):
    def __init__(self, message, line=0, col=0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.message = message
        self.line = line
        self.col = col


class ParseError(ProgramError):
    def __init__(self, message, line, col, expected=()):
        exp = sorted(set(expected))
        if exp:
            message = f"{message}; expected one of {', '.join(exp)}"
        super().__init__(message, line, col)
        self.expected = frozenset(exp)


class ArityError(ProgramError):
    pass


class RangeRestrictionError(ProgramError):
    def __init__(self, variable, message, line=0, col=0):
        super().__init__(message, line, col)
        self.variable = variable


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+|%[^\n]*)
  | (?P<int>[0-9]+)
  | (?P<var>[A-Z_][A-Za-z0-9_']*)
  | (?P<name>[a-z][A-Za-z0-9_']*)
  | (?P<agg>\#count|\#sum)
  | (?P<op>:-|\.\.|!=|<=|>=|[(){},;.:=<>+\-])
""", re.VERBOSE)

_RELOPS = {"<", "<=", "=", "!=", ">", ">="}
_INT64 = 2**63


class Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind, self.text, self.line, self.col = kind, text, line, col

    def __repr__(self):
        return f"Token({self.kind}, {self.text!r}, {self.line}:{self.col})"


def tokenize(src: str):
    toks = []
    pos, line, line_start = 0, 1, 0
    n = len(src)
    while pos < n:
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        if kind != "ws":
            if kind == "op":
                kind = text
            elif kind == "agg":
                kind = text
            elif kind == "name" and text == "not":
                kind = "not"
            toks.append(Token(kind, text, line, pos - line_start + 1))
        nl = text.count("\n")
        if nl:
            line += nl
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    toks.append(Token("EOF", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, src):
        self.toks = tokenize(src)
        self.i = 0
        self.var_pos = {}

    # token helpers
    @property
    def tok(self):
        return self.toks[self.i]

    def peek(self, k=1):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self, *kinds):
        t = self.tok
        if t.kind not in kinds:
            what = "end of input" if t.kind == "EOF" else repr(t.text)
            raise ParseError(f"unexpected {what}", t.line, t.col, kinds)
        self.i += 1
        return t

    def at(self, *kinds):
        return self.tok.kind in kinds

    # terms
    def integer(self):
        neg = False
        if self.at("-"):
            self.take("-")
            neg = True
        t = self.take("int")
        v = -int(t.text) if neg else int(t.text)
        if not -_INT64 <= v < _INT64:
            raise ParseError("integer literal out of 64-bit range", t.line, t.col)
        return v

    def primary(self):
        t = self.tok
        if t.kind == "int" or (t.kind == "-" and self.peek().kind == "int"):
            return Const(self.integer())
        if t.kind == "var":
            self.i += 1
            self.var_pos.setdefault(t.text, (t.line, t.col))
            return Var(t.text)
        if t.kind == "name" and t.text == "abs":
            self.i += 1
            self.take("(")
            inner = self.term()
            self.take(")")
            return Arith("abs", (inner,))
        if t.kind == "(":
            self.i += 1
            inner = self.term()
            self.take(")")
            return inner
        if t.kind == "name":
            raise ParseError(f"symbolic constant or function term {t.text!r} is not supported",
                             t.line, t.col, ("int", "var", "abs", "("))
        self.take("int", "var", "abs", "(", "-")

    def term(self):
        left = self.primary()
        while self.at("+", "-"):
            op = self.take("+", "-").text
            left = Arith(op, (left, self.primary()))
        return left

    # atoms and literals
    def atom(self):
        t = self.take("name")
        if t.text == "abs":
            raise ParseError("'abs' is reserved for arithmetic", t.line, t.col)
        args = []
        if self.at("("):
            self.take("(")
            args.append(self.term())
            while self.at(","):
                self.take(",")
                args.append(self.term())
            self.take(")")
        return Atom(t.text, tuple(args))

    def is_term_start(self):
        t = self.tok
        return (t.kind in ("int", "var", "(", "-")
                or (t.kind == "name" and t.text == "abs" and self.peek().kind == "("))

    def body_element(self):
        """Returns a Literal or an aggregate triple (agg, bound, elements)."""
        if self.at("not"):
            self.take("not")
            return Lit(self.atom(), False)
        if self.is_term_start():
            lhs = self.term()
            if self.at("#count", "#sum"):
                agg = self.take("#count", "#sum").text[1:]
                return ("agg", agg, lhs, self.weighted_elements(agg))
            t = self.tok
            if t.kind not in _RELOPS:
                self.take("<", "<=", "=", "!=", ">", ">=", "#count", "#sum")
            self.i += 1
            rhs = self.term()
            return _builtin(t.text, lhs, rhs)
        return Lit(self.atom(), True)

    def guards(self):
        gs = [self.atom()]
        while self.at(",") and self.peek().kind == "name" and self.peek().text != "abs":
            self.take(",")
            gs.append(self.atom())
        return tuple(gs)

    def weighted_elements(self, agg):
        self.take("{")
        elems = []
        if not self.at("}"):
            while True:
                t = self.tok
                positive = True
                if self.at("not"):
                    self.take("not")
                    positive = False
                a = self.atom()
                weight = None
                if self.at("="):
                    self.take("=")
                    weight = self.term()
                if agg == "sum" and weight is None:
                    raise ParseError("#sum elements need a weight 'atom = w'", t.line, t.col, ("=",))
                if agg == "count" and weight is not None:
                    raise ParseError("#count elements take no weight", t.line, t.col)
                guards = ()
                if self.at(":"):
                    self.take(":")
                    guards = self.guards()
                elems.append(WeightedLiteral(Lit(a, positive), weight, guards))
                if self.at(";", ","):
                    self.take(";", ",")
                    continue
                break
        self.take("}")
        return tuple(elems)

    def choice_elements(self):
        self.take("{")
        elems = []
        if not self.at("}"):
            while True:
                a = self.atom()
                guards = ()
                if self.at(":"):
                    self.take(":")
                    guards = self.guards()
                elems.append(ChoiceElement(a, guards))
                if self.at(";", ","):
                    self.take(";", ",")
                    continue
                break
        self.take("}")
        return tuple(elems)

    def body(self):
        if self.at("."):
            return []
        items = [self.body_element()]
        while self.at(","):
            self.take(",")
            items.append(self.body_element())
        return items

    # statements
    def statement(self):
        start = self.tok
        pos = (start.line, start.col)
        self.var_pos = {}
        if self.at(":-"):
            self.take(":-")
            items = self.body()
            self.take(".")
            return self._assemble(None, items, pos)
        if self.at("{") or (self.at("int") and self.peek().kind == "{"):
            lower = int(self.take("int").text) if self.at("int") else None
            elems = self.choice_elements()
            upper = int(self.take("int").text) if self.at("int") else None
            items = []
            if self.at(":-"):
                self.take(":-")
                items = self.body()
            self.take(".")
            if any(isinstance(x, tuple) for x in items):
                raise ParseError("aggregates are not allowed in choice rule bodies", *pos)
            if lower is not None and upper is not None and lower > upper:
                raise ParseError(f"choice bounds {lower} > {upper}", *pos)
            return Choice(lower, elems, upper, tuple(items), pos=pos)
        if self.at("name"):
            head_tok = self.tok
            if self.peek().kind == "(" and self.peek(2).kind in ("int", "-") :
                decl = self._try_domain_decl()
                if decl is not None:
                    return decl
            head = self.atom()
            if self.at("."):
                self.take(".")
                return Fact(head, pos=pos)
            self.take(":-", ".")
            items = self.body()
            self.take(".")
            return self._assemble(head, items, (head_tok.line, head_tok.col))
        self.take(":-", "{", "int", "name")

    def _try_domain_decl(self):
        save = self.i
        name = self.take("name")
        self.take("(")
        try:
            low = self.integer()
        except ParseError:
            self.i = save
            return None
        if not self.at(".."):
            self.i = save
            return None
        self.take("..")
        high = self.integer()
        self.take(")")
        self.take(".")
        if low > high:
            raise ParseError(f"empty interval {low}..{high}", name.line, name.col)
        return DomainDecl(name.text, low, high, pos=(name.line, name.col))

    def _assemble(self, head, items, pos):
        aggs = [x for x in items if isinstance(x, tuple)]
        lits = tuple(x for x in items if not isinstance(x, tuple))
        if len(aggs) > 1:
            raise ParseError("at most one aggregate per rule", *pos)
        if aggs:
            _, agg, bound, elems = aggs[0]
            return AggregateBody(head, agg, bound, elems, lits, pos=pos)
        if head is None:
            return IntegrityConstraint(lits, pos=pos)
        return Normal(head, lits, pos=pos)

    def program(self):
        rules, positions = [], []
        while not self.at("EOF"):
            r = self.statement()
            rules.append(r)
            positions.append(dict(self.var_pos))
        return rules, positions


def _builtin(op, lhs, rhs):
    if op == ">":
        return Builtin("<", rhs, lhs)
    if op == ">=":
        return Builtin("<=", rhs, lhs)
    return Builtin(op, lhs, rhs)


# ---------------------------------------------------------------------------
# validation

def _atoms_of_rule(r):
    """(atom, role) pairs; role in head/body/elem/guard."""
    out = []
    if isinstance(r, Fact):
        out.append((r.atom, "head"))
    elif isinstance(r, Normal):
        out.append((r.head, "head"))
    elif isinstance(r, AggregateBody):
        if r.head is not None:
            out.append((r.head, "head"))
        for e in r.elements:
            out.append((e.lit.atom, "elem"))
            out.extend((g, "guard") for g in e.guards)
    elif isinstance(r, Choice):
        for e in r.elements:
            out.append((e.atom, "elem"))
            out.extend((g, "guard") for g in e.guards)
    body = getattr(r, "body", ())
    for lit in body:
        if isinstance(lit, Lit):
            out.append((lit.atom, "body"))
    return out


def domain_predicates(rules) -> frozenset:
    """Predicates defined only by facts, intervals and negation-free rules over domain predicates."""
    defined_by = {}
    for r in rules:
        if isinstance(r, DomainDecl):
            defined_by.setdefault(r.pred, []).append(r)
        elif isinstance(r, (Fact, Normal)):
            head = r.atom if isinstance(r, Fact) else r.head
            defined_by.setdefault(head.pred, []).append(r)
        elif isinstance(r, Choice):
            for e in r.elements:
                defined_by.setdefault(e.atom.pred, []).append(None)
        elif isinstance(r, AggregateBody) and r.head is not None:
            defined_by.setdefault(r.head.pred, []).append(None)
    dom = {p for p, rs in defined_by.items() if all(x is not None for x in rs)}
    changed = True
    while changed:
        changed = False
        for p in list(dom):
            for r in defined_by[p]:
                if isinstance(r, Normal):
                    for lit in r.body:
                        if isinstance(lit, Lit) and (not lit.positive or lit.atom.pred not in dom):
                            dom.discard(p)
                            changed = True
                            break
                if p not in dom:
                    break
    return frozenset(dom)


def _check_arity(rules):
    arity = {}
    for r in rules:
        if isinstance(r, DomainDecl):
            items = [(Atom(r.pred, (Const(r.low),)), r.pos)]
        else:
            items = [(a, r.pos) for a, _ in _atoms_of_rule(r)]
        for a, pos in items:
            prev = arity.setdefault(a.pred, a.arity)
            if prev != a.arity:
                raise ArityError(f"predicate {a.pred} used with arity {a.arity} and {prev}", *pos)
    return arity


def _rr_error(var, rule, var_pos, what):
    line, col = var_pos.get(var, rule.pos)
    return RangeRestrictionError(var, f"variable {var} {what}", line, col)


def _check_range(rule, dom, var_pos):
    if isinstance(rule, DomainDecl):
        return
    if isinstance(rule, Fact):
        vs = atom_vars(rule.atom)
        if vs:
            raise _rr_error(vs[0], rule, var_pos, "in a fact is not bound by any domain predicate")
        return
    body = getattr(rule, "body", ())
    bound = []
    for lit in body:
        if isinstance(lit, Lit) and lit.positive and lit.atom.pred in dom:
            atom_vars(lit.atom, bound)
    global_vars = []
    for lit in body:
        literal_vars(lit, global_vars)
    if isinstance(rule, Normal):
        atom_vars(rule.head, global_vars)
    if isinstance(rule, AggregateBody):
        if rule.head is not None:
            atom_vars(rule.head, global_vars)
        term_vars(rule.bound, global_vars)
        for lit in body:
            if isinstance(lit, Lit) and (not lit.positive or lit.atom.pred not in dom):
                raise ProgramError(
                    f"aggregate rules may only add positive domain atoms and built-ins, found {lit.atom.pred}",
                    *rule.pos)
    for v in global_vars:
        if v not in bound:
            raise _rr_error(v, rule, var_pos, "is not bound by a positive domain atom in the body")
    if isinstance(rule, (Choice, AggregateBody)):
        for e in rule.elements:
            atom = e.atom if isinstance(rule, Choice) else e.lit.atom
            for g in e.guards:
                if g.pred not in dom:
                    raise ProgramError(f"guard {g.pred} is not a domain predicate", *rule.pos)
            local_bound = list(bound)
            for g in e.guards:
                atom_vars(g, local_bound)
            used = atom_vars(atom)
            if isinstance(rule, AggregateBody) and e.weight is not None:
                term_vars(e.weight, used)
            for g in e.guards:
                atom_vars(g, used)
            for v in used:
                if v not in local_bound:
                    raise _rr_error(v, rule, var_pos, "in an element is not bound by its guards or the body")


def validate(rules, positions=None) -> RuleProgram:
    rules = tuple(rules)
    positions = positions or [{} for _ in rules]
    arity = _check_arity(rules)
    dom = domain_predicates(rules)
    for r, vp in zip(rules, positions):
        _check_range(r, dom, vp)
    return RuleProgram(rules, arity, dom)


def parse_program(source) -> RuleProgram:
    """Parse and validate a rule program from text (or UTF-8 bytes)."""
    if isinstance(source, (bytes, bytearray)):
        try:
            source = bytes(source).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not valid UTF-8 ({exc.reason})", 1, exc.start + 1) from None
    p = _Parser(source)
    try:
        rules, positions = p.program()
    except RecursionError:
        t = p.tok
        raise ParseError("expression nested too deeply", t.line, t.col) from None
    except ValueError as exc:
        if isinstance(exc, ProgramError):
            raise
        t = p.tok
        raise ParseError(str(exc), t.line, t.col) from None
    return validate(rules, positions)
