"""Problem encodings for the four paradigms.

Every problem has a canonical solution form shared by all paradigms so
that solution sets can be compared directly:

* queens: column of the queen in each row 1..n,
* coloring: color of each vertex 1..n,
* schedule: start week of each maintenance, in instance order.
"""
from __future__ import annotations

from dataclasses import dataclass

from cspbench.bench.graphs import GraphInstance
from cspbench.bench.schedule import ScheduleInstance
from cspbench.fd import (
    CspProblem, FdDomain, Linear, MinOf, NotEqual, NotEqualOffset, OccupancyChannel,
)

PARADIGMS = ("fd", "stable", "modelgen", "abductive")


class UnsupportedEncoding(ValueError):
    """The paradigm has no encoding for this problem."""


@dataclass(frozen=True)
class Queens:
    n: int
    kind = "queens"

    @property
    def size(self):
        return self.n

    @property
    def name(self):
        return f"queens-{self.n}"


@dataclass
class Coloring:
    graph: GraphInstance
    kind = "coloring"

    @property
    def size(self):
        return self.graph.n

    @property
    def name(self):
        return f"coloring-{self.graph.name or self.graph.n}"


@dataclass
class Schedule:
    instance: ScheduleInstance
    kind = "schedule"

    @property
    def size(self):
        return len(self.instance.maintenances)

    @property
    def name(self):
        m = self.instance.meta
        return f"schedule-{m.get('profile', 'custom')}-{m.get('seed', 0)}"


# -- fd -----------------------------------------------------------------------

@dataclass
class FdEncoding:
    problem: CspProblem
    decision: list   # var ids whose values form the canonical solution

    def decode(self, assignment):
        return tuple(assignment[v] for v in self.decision)


def fd_queens(n: int) -> FdEncoding:
    """One variable per row; NotEqual and NotEqualOffset for every pair of rows."""
    p = CspProblem()
    xs = p.new_vars(n, FdDomain.interval(1, n), "q")
    for i in range(n):
        for j in range(i + 1, n):
            p.add(NotEqual(xs[i], xs[j]))
            p.add(NotEqualOffset(xs[i], xs[j], j - i))
    return FdEncoding(p, xs)


def fd_coloring(g: GraphInstance) -> FdEncoding:
    p = CspProblem()
    xs = [p.new_var(FdDomain.interval(1, g.k), f"v{i}") for i in range(1, g.n + 1)]
    for u, v in g.edges:
        p.add(NotEqual(xs[u - 1], xs[v - 1]))
    return FdEncoding(p, xs)


def fd_schedule(inst: ScheduleInstance) -> FdEncoding:
    """Start variable per maintenance with occupancy channelling, limits as
    linear constraints and the minimal weekly reserve as objective."""
    p = CspProblem()
    ms = inst.maintenances
    starts, occ = [], {}
    for m in ms:
        s = p.new_var(FdDomain(tuple(inst.allowed_starts(m, ignore_fixed=True))), f"start{m.id}")
        starts.append(s)
        row = [p.new_var(FdDomain((0, 1)), f"in{m.id}w{w}") for w in inst.weeks()]
        occ.update(((m.id, w), v) for w, v in zip(inst.weeks(), row))
        p.add(OccupancyChannel(s, m.duration, tuple(row), 1))
        fixed = inst.fixed.get((m.unit, m.index))
        if fixed is not None:
            p.add(Linear(((1, s),), "=", fixed))
    for a, b in zip(ms, ms[1:]):
        if a.unit == b.unit:
            p.add(Linear(((1, starts[a.id - 1]), (-1, starts[b.id - 1])), "<=", -a.duration))
    cap = {m.id: inst.unit(m.unit).capacity for m in ms}
    for w in inst.weeks():
        for pl, lim in sorted(inst.plant_limit.items()):
            group = [m for m in ms if inst.unit(m.unit).plant == pl]
            if len(group) > lim:
                p.add(Linear(tuple((1, occ[(m.id, w)]) for m in group), "<=", lim))
        for ar, lim in sorted(inst.area_limit.items()):
            group = [m for m in ms if inst.unit(m.unit).area == ar]
            if sum(cap[m.id] for m in group) > lim:
                p.add(Linear(tuple((cap[m.id], occ[(m.id, w)]) for m in group), "<=", lim))
    total = inst.total_capacity
    down_max = sum(cap.values())
    reserves = []
    for w in inst.weeks():
        base = total - inst.peaks[w - 1]
        r = p.new_var(FdDomain.interval(base - down_max, base), f"reserve{w}")
        p.add(Linear(((1, r),) + tuple((cap[m.id], occ[(m.id, w)]) for m in ms), "=", base))
        reserves.append(r)
    lo = min(p.vars[r].domain.min for r in reserves)
    hi = min(p.vars[r].domain.max for r in reserves)
    z = p.new_var(FdDomain.interval(lo, hi), "min_reserve")
    p.add(MinOf(z, tuple(reserves)))
    p.objective = z
    p.search_vars = tuple(starts)
    p.validate()
    return FdEncoding(p, starts)


# -- stable (rule programs) ---------------------------------------------------

def lp_queens(n: int) -> str:
    return (f"d(1..{n}).\n"
            "1 {pos(X,Y) : d(Y)} 1 :- d(X).\n"
            "1 {pos(X,Y) : d(X)} 1 :- d(Y).\n"
            ":- d(X1), d(Y1), d(X2), d(Y2), pos(X1,Y1), pos(X2,Y2), X1 < X2, X2 - X1 = abs(Y1 - Y2).\n")


def lp_coloring(g: GraphInstance) -> str:
    lines = [f"vtx(1..{g.n}).", f"col(1..{g.k}).", "1 {color(V,C) : col(C)} 1 :- vtx(V)."]
    lines += [f":- color({u},C), color({v},C), col(C)." for u, v in g.edges]
    return "\n".join(lines) + "\n"


def lp_schedule(inst: ScheduleInstance, bound: int | None = None) -> str:
    """Rule program; with ``bound`` every week must keep a reserve >= bound."""
    ms = inst.maintenances
    lines = [f"week(1..{inst.horizon}).", f"maint(1..{len(ms)})." if ms else ""]
    for m in ms:
        u = inst.unit(m.unit)
        lines.append(f"dur({m.id},{m.duration}). cap({m.id},{u.capacity}). "
                     f"inplant({m.id},{u.plant}). inarea({m.id},{u.area}).")
        lines.append(" ".join(f"ok({m.id},{s})." for s in inst.allowed_starts(m)))
    seq = [f"next({a.id},{b.id},{a.duration})." for a, b in zip(ms, ms[1:]) if a.unit == b.unit]
    lines += seq
    lines += [
        "1 {start(M,S) : ok(M,S)} 1 :- maint(M).",
        "inm(M,W) :- start(M,S), ok(M,S), dur(M,D), week(W), S <= W, W < S + D.",
    ]
    if seq:
        lines.append(":- next(M1,M2,D), ok(M1,S1), ok(M2,S2), S2 < S1 + D, start(M1,S1), start(M2,S2).")
    cap = {m.id: inst.unit(m.unit).capacity for m in ms}
    for pl, lim in sorted(inst.plant_limit.items()):
        if sum(1 for m in ms if inst.unit(m.unit).plant == pl) > lim:
            lines.append(f":- week(W), {lim + 1} #count {{inm(M,W) : inplant(M,{pl})}}.")
    for ar, lim in sorted(inst.area_limit.items()):
        if sum(cap[m.id] for m in ms if inst.unit(m.unit).area == ar) > lim:
            lines.append(f":- week(W), {lim + 1} #sum {{inm(M,W) = C : inarea(M,{ar}), cap(M,C)}}.")
    if bound is not None:
        total = inst.total_capacity
        for w in inst.weeks():
            # at least allowed+1 MW down violates the bound; 0 makes the week infeasible
            allowed = total - inst.peaks[w - 1] - bound
            lines.append(f":- {max(0, allowed + 1)} #sum {{inm(M,{w}) = C : cap(M,C)}}.")
    return "\n".join(x for x in lines if x) + "\n"


def decode_stable(problem, gp, model):
    """Canonical solution from a stable model (frozenset of atom ids)."""
    atoms = [gp.atoms.atom(i) for i in model]
    if problem.kind == "queens":
        sol = [0] * problem.n
        for a in atoms:
            if a.pred == "pos":
                sol[a.args[0] - 1] = a.args[1]
    elif problem.kind == "coloring":
        sol = [0] * problem.graph.n
        for a in atoms:
            if a.pred == "color":
                sol[a.args[0] - 1] = a.args[1]
    else:
        sol = [0] * problem.size
        for a in atoms:
            if a.pred == "start":
                sol[a.args[0] - 1] = a.args[1]
    return tuple(sol)


# -- declarative specifications -------------------------------------------------

def dl_queens(n: int, paradigm: str) -> str:
    if paradigm == "modelgen":
        return (f"sort d = 1..{n};\nfunc pos: d -> d bijective;\n"
                "con abs(pos(X1) - pos(X2)) != X2 - X1 <- X1 < X2;\n")
    return (f"sort d = 1..{n};\nopenfunc pos: d -> d;\n"
            "con Y1 != Y2, X2 - X1 != Y2 - Y1, X2 - X1 != Y1 - Y2 <- pos(X1,Y1), pos(X2,Y2), X1 < X2;\n")


def dl_coloring(g: GraphInstance, paradigm: str) -> str:
    lines = [f"sort v = 1..{g.n};", f"sort c = 1..{g.k};", "pred edge: v * v;"]
    lines += [f"def edge({u},{v});" for u, v in g.edges]
    if paradigm == "modelgen":
        lines += ["func col: v -> c;", "ic <- edge(X,Y), col(X) = col(Y);"]
    else:
        lines += ["openfunc color: v -> c;", "ic <- edge(X,Y), color(X,C), color(Y,C);"]
    return "\n".join(lines) + "\n"


def dl_schedule(inst: ScheduleInstance) -> str:
    ms = inst.maintenances
    H = inst.horizon
    if not ms:
        raise UnsupportedEncoding("schedule without maintenances")
    cap = {m.id: inst.unit(m.unit).capacity for m in ms}
    top = max([inst.total_capacity, *inst.peaks, *inst.area_limit.values(),
               *inst.plant_limit.values(), H])
    lines = [f"sort maint = 1..{len(ms)};", f"sort week = 1..{H};", f"sort mw = 0..{top};",
             f"sort plant = 1..{max(inst.plant_limit)};", f"sort area = 1..{max(inst.area_limit)};",
             "pred dur: maint * week;", "pred cap: maint * mw;", "pred inplant: maint * plant;",
             "pred inarea: maint * area;", "pred bad: maint * week;", "pred fixed: maint * week;",
             "pred next: maint * maint * week;", "pred plimit: plant * mw;",
             "pred alimit: area * mw;", "pred total: mw;", "pred peak: week * mw;"]
    for m in ms:
        u = inst.unit(m.unit)
        lines.append(f"def dur({m.id},{m.duration}); def cap({m.id},{cap[m.id]}); "
                     f"def inplant({m.id},{u.plant}); def inarea({m.id},{u.area});")
        ok = set(inst.allowed_starts(m, ignore_fixed=True))
        lines += [f"def bad({m.id},{s});" for s in range(1, H + 1) if s not in ok]
        if (m.unit, m.index) in inst.fixed:
            lines.append(f"def fixed({m.id},{inst.fixed[(m.unit, m.index)]});")
    for a, b in zip(ms, ms[1:]):
        if a.unit == b.unit:
            lines.append(f"def next({a.id},{b.id},{a.duration});")
    lines += [f"def plimit({p},{v});" for p, v in sorted(inst.plant_limit.items())]
    lines += [f"def alimit({a},{v});" for a, v in sorted(inst.area_limit.items())]
    lines.append(f"def total({inst.total_capacity});")
    lines += [f"def peak({w},{inst.peaks[w - 1]});" for w in inst.weeks()]
    lines += [
        "func start: maint -> week;",
        "open inm: maint * week;",
        "occupy inm(M,W) : start(M) for D <- dur(M,D);",
        "ic <- bad(M,S), start(M) = S;",
        "con start(M) = S <- fixed(M,S);",
        "ic <- next(M1,M2,D), start(M2) < start(M1) + D;",
        "con #count{M : inm(M,W), inplant(M,P)} <= L <- week(W), plimit(P,L);",
        "con #sum{C, M : inm(M,W), inarea(M,A), cap(M,C)} <= L <- week(W), alimit(A,L);",
        "maximize min W in week : T - K - #sum{C, M : inm(M,W), cap(M,C)} <- total(T), peak(W,K);",
    ]
    return "\n".join(lines) + "\n"


def decode_declar(problem, interp):
    if problem.kind == "queens":
        f = interp.functions["pos"]
        return tuple(f[(i,)] for i in range(1, problem.n + 1))
    if problem.kind == "coloring":
        f = interp.functions.get("col") or interp.functions["color"]
        return tuple(f[(i,)] for i in range(1, problem.graph.n + 1))
    f = interp.functions["start"]
    return tuple(f[(i,)] for i in range(1, problem.size + 1))


def encode_text(problem, paradigm: str) -> str:
    """Source text (``.lp`` or ``.dl``) of a non-fd encoding."""
    if paradigm == "stable":
        if problem.kind == "queens":
            return lp_queens(problem.n)
        if problem.kind == "coloring":
            return lp_coloring(problem.graph)
        return lp_schedule(problem.instance)
    if paradigm in ("modelgen", "abductive"):
        if problem.kind == "queens":
            return dl_queens(problem.n, paradigm)
        if problem.kind == "coloring":
            return dl_coloring(problem.graph, paradigm)
        if paradigm == "modelgen":
            raise UnsupportedEncoding("model generation has no aggregates; scheduling is unsupported")
        return dl_schedule(problem.instance)
    raise UnsupportedEncoding(f"no text encoding for paradigm {paradigm!r}")


def encode_fd(problem) -> FdEncoding:
    if problem.kind == "queens":
        return fd_queens(problem.n)
    if problem.kind == "coloring":
        return fd_coloring(problem.graph)
    return fd_schedule(problem.instance)


def supports(problem, paradigm: str) -> bool:
    if paradigm not in PARADIGMS:
        return False
    return not (problem.kind == "schedule" and paradigm == "modelgen")
