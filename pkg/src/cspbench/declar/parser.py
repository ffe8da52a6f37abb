"""Parser and static checks for ``.dl`` specifications.

Statements end with ``;`` and start with a keyword::

    sort d = 1..8;
    func pos: d -> d bijective;
    openfunc pos: d -> d;
    open maint: unit * week;
    pred edge: v * v;
    def edge(1,2);
    def attack(X1,Y1,X2,Y2) <- Y1 = Y2;
    con abs(pos(X1) - pos(X2)) != X2 - X1 <- X1 < X2;
    ic <- color(X,C), color(Y,C), edge(X,Y);
    occupy inmaint(M,W) : start(M) for D <- dur(M,D);
    maximize min W in week : T - #sum{C, M : inmaint(M,W), mcap(M,C)} <- total(T);

Variables start with an upper-case letter and are typed by the argument
positions they occupy; ``%`` starts a comment.
"""
from __future__ import annotations

import re

from cspbench.declar.ast import (
    Abs, Agg, Atom, Bin, Cmp, Con, DeclarSpec, DefRule, FTerm, FuncDecl, Ic, Maximize, Num,
    Occupy, OpenDecl, PredDecl, SortDecl, SpecError, Var,
)

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+|%[^\n]*)
  | (?P<nl>\n)
  | (?P<int>\d+)
  | (?P<agg>\#count|\#sum)
  | (?P<id>[a-z][A-Za-z0-9_]*)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<sym>\.\.|->|<-|<=|>=|!=|[<>=+\-*(){},;:])
""", re.VERBOSE)

KEYWORDS = {"sort", "func", "openfunc", "open", "pred", "def", "con", "ic", "occupy", "maximize",
            "min", "in", "for", "not", "abs", "injective", "bijective"}
RELS = {"<", "<=", ">", ">=", "=", "!="}


def _tokens(text):
    out, line, pos = [], 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise SpecError(f"unexpected character {text[pos]!r}", line)
        kind = m.lastgroup
        val = m.group()
        pos = m.end()
        if kind == "nl":
            line += 1
        elif kind != "ws":
            if kind == "id" and val in KEYWORDS:
                kind = "kw"
            out.append((kind, val, line))
    out.append(("eof", "", line))
    return out


class _Call:
    """Unresolved ``name(args)``; becomes an FTerm or an Atom."""

    def __init__(self, name, args, line):
        self.name, self.args, self.line = name, args, line


class _Parser:
    def __init__(self, text):
        self.toks = _tokens(text)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def at(self, val):
        return self.tok[1] == val and self.tok[0] in ("sym", "kw", "agg")

    def expect(self, val):
        t = self.next()
        if t[1] != val or t[0] not in ("sym", "kw", "agg"):
            raise SpecError(f"expected {val!r}, found {t[1] or 'end of input'!r}", t[2])
        return t

    def ident(self):
        t = self.next()
        if t[0] != "id":
            raise SpecError(f"expected a name, found {t[1] or 'end of input'!r}", t[2])
        return t[1]

    def integer(self):
        neg = False
        if self.at("-"):
            self.next()
            neg = True
        t = self.next()
        if t[0] != "int":
            raise SpecError(f"expected an integer, found {t[1]!r}", t[2])
        return -int(t[1]) if neg else int(t[1])

    def sorts(self):
        out = [self.ident()]
        while self.at("*"):
            self.next()
            out.append(self.ident())
        return tuple(out)

    # expressions
    def expr(self):
        e = self.unary()
        while self.at("+") or self.at("-"):
            op = self.next()[1]
            e = Bin(op, e, self.unary())
        return e

    def unary(self):
        if self.at("-"):
            self.next()
            return Bin("-", Num(0), self.unary())
        return self.primary()

    def primary(self):
        kind, val, line = self.tok
        if kind == "int":
            self.next()
            return Num(int(val))
        if kind == "var":
            self.next()
            return Var(val)
        if kind == "kw" and val == "abs":
            self.next()
            self.expect("(")
            e = self.expr()
            self.expect(")")
            return Abs(e)
        if kind == "agg":
            return self.aggregate()
        if self.at("("):
            self.next()
            e = self.expr()
            self.expect(")")
            return e
        if kind == "id":
            self.next()
            args = ()
            if self.at("("):
                self.next()
                args = [self.expr()]
                while self.at(","):
                    self.next()
                    args.append(self.expr())
                self.expect(")")
            return _Call(val, tuple(args), line)
        raise SpecError(f"expected a term, found {val or 'end of input'!r}", line)

    def aggregate(self):
        kind = self.next()[1][1:]
        self.expect("{")
        weight = None
        if kind == "sum":
            weight = self.expr()
            self.expect(",")
        locs = []
        t = self.next()
        if t[0] != "var":
            raise SpecError("aggregate needs local variables before ':'", t[2])
        locs.append(t[1])
        while self.at(","):
            self.next()
            t = self.next()
            if t[0] != "var":
                raise SpecError("expected a variable", t[2])
            locs.append(t[1])
        self.expect(":")
        body = self.body()
        self.expect("}")
        return Agg(kind, weight, tuple(locs), tuple(body))

    # literals
    def literal(self):
        if self.at("not"):
            line = self.next()[2]
            e = self.primary()
            if not isinstance(e, _Call):
                raise SpecError("'not' must precede an atom", line)
            return Atom(e.name, e.args, False), e.line
        line = self.tok[2]
        lhs = self.expr()
        if self.tok[1] in RELS and self.tok[0] == "sym":
            rel = self.next()[1]
            return Cmp(rel, lhs, self.expr()), line
        if isinstance(lhs, _Call):
            return Atom(lhs.name, lhs.args), line
        raise SpecError("expected an atom or a comparison", line)

    def body(self):
        lits = [self.literal()]
        while self.at(","):
            self.next()
            lits.append(self.literal())
        return lits

    def statement(self, spec):
        kind, val, line = self.next()
        if kind != "kw":
            raise SpecError(f"statement must start with a keyword, found {val!r}", line)
        if val == "sort":
            name = self.ident()
            self.expect("=")
            lo = self.integer()
            self.expect("..")
            hi = self.integer()
            if lo > hi:
                raise SpecError(f"empty sort {name}", line)
            self._declare(spec, name, line)
            spec.sorts[name] = SortDecl(name, lo, hi, line)
        elif val in ("func", "openfunc"):
            name = self.ident()
            self.expect(":")
            args = self.sorts()
            self.expect("->")
            rng = self.ident()
            prop = "none"
            if self.at("injective") or self.at("bijective"):
                prop = self.next()[1]
            self._declare(spec, name, line)
            spec.funcs[name] = FuncDecl(name, args, rng, prop, val == "openfunc", line)
        elif val in ("open", "pred"):
            name = self.ident()
            args = ()
            if self.at(":"):
                self.next()
                args = self.sorts()
            self._declare(spec, name, line)
            (spec.opens if val == "open" else spec.preds)[name] = (
                OpenDecl(name, args, line) if val == "open" else PredDecl(name, args, line))
        elif val == "def":
            head, _ = self.literal()
            if not isinstance(head, Atom) or not head.positive:
                raise SpecError("definition head must be an atom", line)
            body = []
            if self.at("<-"):
                self.next()
                body = self.body()
            spec.rules.append(DefRule(head, tuple(body), line))
        elif val == "con":
            conseq = self.body()
            guard = []
            if self.at("<-"):
                self.next()
                guard = self.body()
            spec.constraints.append(Con(tuple(conseq), tuple(guard), line))
        elif val == "ic":
            self.expect("<-")
            body = self.body()
            spec.constraints.append(Ic(tuple(body), line))
        elif val == "occupy":
            atom, _ = self.literal()
            self.expect(":")
            start = self.primary()
            self.expect("for")
            dur = self.expr()
            guard = []
            if self.at("<-"):
                self.next()
                guard = self.body()
            occ = Occupy(atom, start, dur, tuple(guard), line)
            spec.occupies.append(occ)
        elif val == "maximize":
            var = sort = None
            if self.at("min"):
                self.next()
                t = self.next()
                if t[0] != "var":
                    raise SpecError("expected a variable after 'min'", t[2])
                var = t[1]
                self.expect("in")
                sort = self.ident()
                self.expect(":")
            expr = self.expr()
            guard = []
            if self.at("<-"):
                self.next()
                guard = self.body()
            if spec.objective is not None:
                raise SpecError("only one objective allowed", line)
            spec.objective = Maximize(var, sort, expr, tuple(guard), line)
        else:
            raise SpecError(f"unexpected keyword {val!r}", line)
        self.expect(";")

    def _declare(self, spec, name, line):
        if spec.kind(name) is not None:
            raise SpecError(f"symbol {name} declared twice", line)

    def parse(self):
        spec = DeclarSpec()
        while self.tok[0] != "eof":
            self.statement(spec)
        return spec


# -- resolution and typing -------------------------------------------------------

class _Resolver:
    def __init__(self, spec):
        self.spec = spec

    def term(self, t, line):
        if isinstance(t, _Call):
            if t.name not in self.spec.funcs:
                raise SpecError(f"{t.name} is not a declared function", line)
            f = self.spec.funcs[t.name]
            if len(t.args) != len(f.args):
                raise SpecError(f"function {t.name} takes {len(f.args)} arguments", line)
            return FTerm(t.name, tuple(self.term(a, line) for a in t.args))
        if isinstance(t, Bin):
            return Bin(t.op, self.term(t.left, line), self.term(t.right, line))
        if isinstance(t, Abs):
            return Abs(self.term(t.arg, line))
        if isinstance(t, Agg):
            w = None if t.weight is None else self.term(t.weight, line)
            return Agg(t.kind, w, t.locals, tuple(self.lit(x, line) for x in t.body))
        return t

    def lit(self, lit, line):
        if isinstance(lit, tuple):
            lit, line = lit
        if isinstance(lit, Cmp):
            return Cmp(lit.rel, self.term(lit.lhs, line), self.term(lit.rhs, line))
        sorts = self.spec.atom_sorts(lit.pred)
        if sorts is None:
            raise SpecError(f"undeclared predicate {lit.pred}", line)
        if len(sorts) != len(lit.args):
            raise SpecError(f"{lit.pred} expects {len(sorts)} arguments, got {len(lit.args)}", line)
        return Atom(lit.pred, tuple(self.term(a, line) for a in lit.args), lit.positive)

    def lits(self, lits, line):
        return tuple(self.lit(x, line) for x in lits)


class _Typer:
    """Infer one sort per variable from argument positions."""

    def __init__(self, spec, line):
        self.spec, self.line, self.types = spec, line, {}

    def bind(self, var, sort):
        prev = self.types.setdefault(var, sort)
        if prev != sort:
            raise SpecError(f"variable {var} used with sorts {prev} and {sort}", self.line)

    def term(self, t):
        if isinstance(t, FTerm):
            for a, s in zip(t.args, self.spec.funcs[t.func].args):
                self.arg(a, s)
        elif isinstance(t, Bin):
            self.term(t.left)
            self.term(t.right)
        elif isinstance(t, Abs):
            self.term(t.arg)
        elif isinstance(t, Agg):
            if t.weight is not None:
                self.term(t.weight)
            for x in t.body:
                self.lit(x)

    def arg(self, a, sort):
        if isinstance(a, Var):
            self.bind(a.name, sort)
        else:
            self.term(a)

    def lit(self, x):
        if isinstance(x, Cmp):
            self.term(x.lhs)
            self.term(x.rhs)
        else:
            for a, s in zip(x.args, self.spec.atom_sorts(x.pred)):
                self.arg(a, s)


def term_vars(t, out, inner=False):
    """Variables of ``t``; aggregate locals only when ``inner`` is set."""
    if isinstance(t, Var):
        out.add(t.name)
    elif isinstance(t, FTerm):
        for a in t.args:
            term_vars(a, out, inner)
    elif isinstance(t, Bin):
        term_vars(t.left, out, inner)
        term_vars(t.right, out, inner)
    elif isinstance(t, Abs):
        term_vars(t.arg, out, inner)
    elif isinstance(t, Agg):
        vs = set()
        if t.weight is not None:
            term_vars(t.weight, vs, True)
        for x in t.body:
            lit_vars(x, vs, True)
        out |= vs if inner else vs - set(t.locals)
    return out


def _outer_vars(t, out):
    """Variables of ``t`` outside any aggregate."""
    if isinstance(t, Var):
        out.add(t.name)
    elif isinstance(t, (FTerm, Atom)):
        for a in t.args:
            _outer_vars(a, out)
    elif isinstance(t, (Bin, Cmp)):
        _outer_vars(t.left if isinstance(t, Bin) else t.lhs, out)
        _outer_vars(t.right if isinstance(t, Bin) else t.rhs, out)
    elif isinstance(t, Abs):
        _outer_vars(t.arg, out)
    return out


def _close_aggs(t, outer):
    """Rebuild ``t`` so every aggregate lists all its local variables: the
    declared ones plus those that occur nowhere outside an aggregate."""
    if isinstance(t, Agg):
        vs = set()
        if t.weight is not None:
            term_vars(t.weight, vs, True)
        for x in t.body:
            lit_vars(x, vs, True)
        locs = tuple(t.locals) + tuple(sorted(vs - outer - set(t.locals)))
        return Agg(t.kind, t.weight, locs, t.body)
    if isinstance(t, Bin):
        return Bin(t.op, _close_aggs(t.left, outer), _close_aggs(t.right, outer))
    if isinstance(t, Abs):
        return Abs(_close_aggs(t.arg, outer))
    if isinstance(t, Cmp):
        return Cmp(t.rel, _close_aggs(t.lhs, outer), _close_aggs(t.rhs, outer))
    return t


def _close_all(lits, terms=(), extra=()):
    outer = set(extra)
    for x in (*lits, *terms):
        _outer_vars(x, outer)
    return (tuple(_close_aggs(x, outer) for x in lits),
            tuple(_close_aggs(x, outer) for x in terms))


def lit_vars(x, out, inner=False):
    if isinstance(x, Cmp):
        term_vars(x.lhs, out, inner)
        term_vars(x.rhs, out, inner)
    else:
        for a in x.args:
            term_vars(a, out, inner)
    return out


def _aggs(t, out):
    if isinstance(t, Agg):
        out.append(t)
    elif isinstance(t, Bin):
        _aggs(t.left, out)
        _aggs(t.right, out)
    elif isinstance(t, Abs):
        _aggs(t.arg, out)
    elif isinstance(t, Cmp):
        _aggs(t.lhs, out)
        _aggs(t.rhs, out)
    return out


def _has_open(spec, t):
    if isinstance(t, FTerm):
        return True
    if isinstance(t, Bin):
        return _has_open(spec, t.left) or _has_open(spec, t.right)
    if isinstance(t, Abs):
        return _has_open(spec, t.arg)
    if isinstance(t, Agg):
        return True
    if isinstance(t, Cmp):
        return _has_open(spec, t.lhs) or _has_open(spec, t.rhs)
    if isinstance(t, Atom):
        return spec.kind(t.pred) in ("func", "open") or any(_has_open(spec, a) for a in t.args)
    return False


def _check_aggs(spec, lits, globals_, line):
    for x in lits:
        for agg in _aggs(x, []):
            clash = set(agg.locals) & globals_
            if clash:
                raise SpecError(f"aggregate variable {sorted(clash)[0]} shadows an outer variable", line)
            if not any(isinstance(b, Atom) and spec.kind(b.pred) in ("open", "func", "pred") for b in agg.body):
                raise SpecError("aggregate condition must mention an open or defined symbol", line)


def _type_stmt(spec, stmt, lits, extra_terms=(), fixed=None):
    ty = _Typer(spec, stmt.line)
    for v, s in (fixed or {}).items():
        ty.bind(v, s)
    for x in lits:
        ty.lit(x)
    for t in extra_terms:
        ty.term(t)
    used = set()
    for x in lits:
        lit_vars(x, used, True)
    for t in extra_terms:
        term_vars(t, used, True)
    for v in sorted(used):
        if v not in ty.types:
            raise SpecError(f"variable {v} is not typed by any sort", stmt.line)
    stmt.types = ty.types
    return used


def _stratify(spec):
    """Reject recursion through negation among defined predicates."""
    edges = {p: set() for p in spec.preds}
    neg = set()
    for r in spec.rules:
        for x in r.body:
            if isinstance(x, Atom) and x.pred in spec.preds:
                edges[r.head.pred].add(x.pred)
                if not x.positive:
                    neg.add((r.head.pred, x.pred))
    reach = {p: set() for p in edges}
    for p in edges:
        stack = list(edges[p])
        while stack:
            q = stack.pop()
            if q not in reach[p]:
                reach[p].add(q)
                stack.extend(edges[q])
    for h, b in neg:
        if h == b or h in reach[b]:
            raise SpecError(f"defined predicate {h} depends negatively on itself through {b}")


def _resolve_spec(spec):
    rs = _Resolver(spec)
    for f in spec.funcs.values():
        for s in (*f.args, f.range):
            if s not in spec.sorts:
                raise SpecError(f"unknown sort {s} in function {f.name}", f.line)
    for d in (*spec.opens.values(), *spec.preds.values()):
        for s in d.args:
            if s not in spec.sorts:
                raise SpecError(f"unknown sort {s} in {d.name}", d.line)
    for r in spec.rules:
        if r.head.pred not in spec.preds:
            raise SpecError(f"{r.head.pred} is not a declared predicate", r.line)
        r.head = rs.lit(r.head, r.line)
        r.body = rs.lits(r.body, r.line)
        for x in r.body:
            if _has_open(spec, x):
                raise SpecError(f"definition of {r.head.pred} may not use open symbols", r.line)
        _type_stmt(spec, r, (r.head, *r.body))
    for c in spec.constraints:
        if isinstance(c, Con):
            c.conseq = rs.lits(c.conseq, c.line)
            c.guard = rs.lits(c.guard, c.line)
            lits, _ = _close_all((*c.conseq, *c.guard))
            c.conseq, c.guard = lits[:len(c.conseq)], lits[len(c.conseq):]
        else:
            c.body, _ = _close_all(rs.lits(c.body, c.line))
            lits = c.body
        _type_stmt(spec, c, lits)
        glob = set()
        for x in lits:
            lit_vars(x, glob)
        _check_aggs(spec, lits, glob, c.line)
    for o in spec.occupies:
        o.atom = rs.lit(o.atom, o.line)
        o.start = rs.term(o.start, o.line)
        o.duration = rs.term(o.duration, o.line)
        o.guard = rs.lits(o.guard, o.line)
        if spec.kind(o.atom.pred) != "open":
            raise SpecError("occupy needs an open predicate", o.line)
        if not isinstance(o.start, FTerm) or not all(isinstance(a, Var) for a in o.atom.args):
            raise SpecError("occupy form is p(A..,T) : f(A..) for D", o.line)
        if [a.name for a in o.start.args] != [a.name for a in o.atom.args[:-1]]:
            raise SpecError("occupy function arguments must match the leading atom arguments", o.line)
        f = spec.funcs[o.start.func]
        if spec.opens[o.atom.pred].args[-1] != f.range:
            raise SpecError("occupy time argument must have the function's range sort", o.line)
        if any(_has_open(spec, x) for x in o.guard) or _has_open(spec, o.duration):
            raise SpecError("occupy guard and duration must be static", o.line)
        _type_stmt(spec, o, (o.atom, *o.guard), (o.start, o.duration))
    ob = spec.objective
    if ob is not None:
        ob.expr = rs.term(ob.expr, ob.line)
        ob.guard = rs.lits(ob.guard, ob.line)
        fixed = {}
        if ob.var is not None:
            if ob.sort not in spec.sorts:
                raise SpecError(f"unknown sort {ob.sort}", ob.line)
            fixed[ob.var] = ob.sort
        ob.guard, (ob.expr,) = _close_all(ob.guard, (ob.expr,), {ob.var} if ob.var else ())
        _type_stmt(spec, ob, ob.guard, (ob.expr,), fixed)
        glob = set()
        for x in ob.guard:
            lit_vars(x, glob)
        term_vars(ob.expr, glob)
        if ob.var:
            glob.add(ob.var)
        _check_aggs(spec, (Cmp("=", ob.expr, Num(0)),), glob, ob.line)
    _stratify(spec)
    return spec


def parse_spec(text) -> DeclarSpec:
    """Parse and check a ``.dl`` specification."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as e:
            raise SpecError(f"input is not UTF-8: {e}") from None
    try:
        spec = _Parser(text).parse()
    except RecursionError:
        raise SpecError("specification nested too deeply") from None
    return _resolve_spec(spec)
