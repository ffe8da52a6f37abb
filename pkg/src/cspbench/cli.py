"""Command line interface: ``cspbench solve|ground|bench|verify|gen``.

Inputs are recognized by suffix: ``.lp`` rule programs, ``.dl``
specifications, ``.col`` DIMACS graphs and ``.sched`` schedule
instances. ``queens:N`` names the n-queens problem directly.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from cspbench.bench.encode import PARADIGMS, Coloring, Queens, Schedule, UnsupportedEncoding, supports
from cspbench.bench.graphs import DimacsError, gen_graph, read_dimacs, write_dimacs
from cspbench.bench.harness import SuiteError, run_suite
from cspbench.bench.oracle import OracleRefused, brute_force
from cspbench.bench.run import MODES, VerificationError, solve_problem
from cspbench.bench.schedule import PROFILES, ScheduleFormatError, gen_schedule, read_schedule, write_schedule
from cspbench.declar import SpecError, check_interpretation, compile_spec, objective_value, parse_spec
from cspbench.errors import SearchTimeout, StructuralError
from cspbench.fd import FdSolver
from cspbench.grounder import ground, write_ground
from cspbench.lp import ProgramError, parse_program
from cspbench.stable import StableSolver

log = logging.getLogger("cspbench")


class UsageError(Exception):
    pass


def _problem(arg: str, k: int):
    """A benchmark problem from ``queens:N``, a ``.col`` or a ``.sched`` file."""
    if arg.startswith("queens:"):
        try:
            n = int(arg.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad queens size in {arg!r}") from None
        if n < 1:
            raise UsageError("queens size must be positive")
        return Queens(n)
    path = Path(arg)
    if path.suffix == ".col":
        return Coloring(read_dimacs(path.read_text(), k=k, name=path.stem))
    if path.suffix == ".sched":
        return Schedule(read_schedule(path.read_text()))
    raise UsageError(f"unrecognized input {arg!r} (expected queens:N, .col, .sched, .lp or .dl)")


def _emit(lines, shown, limit_show):
    if limit_show is None or shown < limit_show:
        print(lines)


# -- solve ----------------------------------------------------------------------

def _solve_lp(args):
    gp = ground(parse_program(Path(args.input).read_text()))
    solver = StableSolver(gp, args.budget)
    limit = 1 if args.mode == "first" else args.limit
    n = 0
    try:
        for m in solver.models():
            n += 1
            atoms = sorted(str(gp.atoms.atom(a)) for a in m if a not in gp.facts)
            _emit(f"Answer {n}: {' '.join(atoms)}", n - 1, args.show)
            if limit is not None and n >= limit:
                break
    except SearchTimeout:
        print(f"TIMEOUT after {n} model(s)")
        return 2
    print("SATISFIABLE" if n else "UNSATISFIABLE", f"models={n}")
    return 0


def _format_interp(interp):
    parts = []
    for f in sorted(interp.functions):
        for a, v in sorted(interp.functions[f].items()):
            parts.append(f"{f}({','.join(map(str, a))})={v}")
    parts += [f"{p}({','.join(map(str, t))})" for p, t in interp.delta()]
    return " ".join(parts)


def _solve_dl(args):
    spec = parse_spec(Path(args.input).read_text())
    comp = compile_spec(spec)
    solver = FdSolver(comp.problem, args.budget)
    try:
        if args.mode == "optimize":
            if spec.objective is None:
                raise UsageError("the specification has no maximize statement")
            res = solver.maximize()
            if res is None:
                print("UNSATISFIABLE")
                return 0
            interp = comp.decompile(res[0])
            print(_format_interp(interp))
            print(f"OPTIMUM {objective_value(spec, interp)}")
            return 0
        limit = 1 if args.mode == "first" else args.limit
        sols = solver.solve_all(limit)
    except SearchTimeout:
        print("TIMEOUT")
        return 2
    for i, a in enumerate(sols, 1):
        interp = comp.decompile(a)
        if check_interpretation(spec, interp):
            raise VerificationError("compiled model violates the specification")
        _emit(f"Model {i}: {_format_interp(interp)}", i - 1, args.show)
    print("SATISFIABLE" if sols else "UNSATISFIABLE", f"models={len(sols)}")
    return 0


def cmd_solve(args):
    suffix = Path(args.input).suffix
    if suffix == ".lp":
        return _solve_lp(args)
    if suffix == ".dl":
        return _solve_dl(args)
    problem = _problem(args.input, args.colors)
    mode = args.mode or ("optimize" if problem.kind == "schedule" else "all")
    out = solve_problem(problem, args.paradigm, mode, args.limit, args.budget)
    for t, v in out.incumbents:
        print(f"incumbent {v} at {t:.3f}s")
    # in optimize mode only the best schedule is shown
    sols = out.solutions[-1:] if mode == "optimize" else out.solutions
    for i, sol in enumerate(sols, 1):
        _emit(f"Solution {i}: {' '.join(map(str, sol))}", i - 1, args.show)
    if mode == "first":
        result = ""
    elif mode == "all" and out.outcome == "timeout":
        result = f" models>={len(out.solutions)}"
    else:
        result = f" {'models' if mode == 'all' else 'value'}={out.value_or_count}"
    print(f"{out.outcome.upper()}{result} setup_ms={out.setup_s * 1000:.3f} "
          f"solve_ms={out.solve_s * 1000:.3f}")
    return 2 if out.outcome == "timeout" else 0


# -- other commands ---------------------------------------------------------------

def cmd_ground(args):
    gp = ground(parse_program(Path(args.input).read_text()))
    text = write_ground(gp)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_bench(args):
    results = run_suite(args.suite, args.out, args.plot_data, seed=args.seed)
    timeouts = sum(r.outcome == "timeout" for r in results)
    print(f"{len(results)} rows written to {args.out} ({timeouts} timeouts)")
    return 0


def cmd_verify(args):
    problem = _problem(args.input, args.colors)
    mode = args.mode or ("optimize" if problem.kind == "schedule" else "all")
    answers = {}
    for p in PARADIGMS:
        if supports(problem, p):
            out = solve_problem(problem, p, mode, budget=args.budget)
            if out.outcome == "timeout":
                print(f"{p}: timeout")
                continue
            answers[p] = out.value_or_count if mode != "first" else out.outcome
            print(f"{p}: {answers[p]}")
    if args.oracle:
        try:
            o = brute_force(problem, mode, cap=args.cap)
        except OracleRefused as e:
            print(f"oracle: refused ({e})")
            return 2
        answers["oracle"] = {"all": o.count, "optimize": o.value}.get(mode, "sat" if o.sat else "unsat")
        print(f"oracle: {answers['oracle']}")
    agree = len(set(answers.values())) <= 1
    print("AGREE" if agree else "DISAGREE")
    return 0 if agree else 1


def cmd_gen(args):
    if args.what == "graph":
        text = write_dimacs(gen_graph(args.n, args.p, args.seed, args.colors))
    else:
        text = write_schedule(gen_schedule(args.profile, args.seed))
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="random seed (generators and suites; other commands ignore it)")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    ap = argparse.ArgumentParser(prog="cspbench", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", parents=[common], help="solve one problem")
    s.add_argument("input", help="file.lp, file.dl, graph.col, instance.sched or queens:N")
    s.add_argument("--paradigm", choices=PARADIGMS, default="fd")
    s.add_argument("--mode", choices=MODES, default=None)
    s.add_argument("--limit", type=int, default=None, help="stop after N solutions")
    s.add_argument("--budget", type=float, default=None, help="time budget in seconds")
    s.add_argument("--colors", "-k", type=int, default=4, help="colors for .col inputs")
    s.add_argument("--show", type=int, default=10, help="print at most N solutions")
    s.set_defaults(func=cmd_solve)

    g = sub.add_parser("ground", parents=[common], help="print the ground program of a .lp file")
    g.add_argument("input")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_ground)

    b = sub.add_parser("bench", parents=[common], help="run a benchmark suite")
    b.add_argument("suite", help="suite configuration (INI)")
    b.add_argument("--out", required=True, help="results CSV")
    b.add_argument("--plot-data", default=None, help="directory for .dat series")
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("verify", parents=[common], help="cross-check paradigms (and the oracle)")
    v.add_argument("input", help="graph.col, instance.sched or queens:N")
    v.add_argument("--oracle", action="store_true", help="also run the brute-force oracle")
    v.add_argument("--mode", choices=MODES, default=None)
    v.add_argument("--budget", type=float, default=None)
    v.add_argument("--cap", type=int, default=10**7, help="oracle search-space cap")
    v.add_argument("--colors", "-k", type=int, default=4)
    v.set_defaults(func=cmd_verify)

    ge = sub.add_parser("gen", parents=[common], help="generate an instance")
    ge.add_argument("what", choices=("graph", "schedule"))
    ge.add_argument("--n", type=int, default=10, help="vertices (graph)")
    ge.add_argument("--p", type=float, default=0.2, help="edge probability (graph)")
    ge.add_argument("--colors", "-k", type=int, default=4)
    ge.add_argument("--profile", choices=sorted(PROFILES), default="scaled")
    ge.add_argument("-o", "--output")
    ge.set_defaults(func=cmd_gen)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "gen" and args.seed is None:
        args.seed = 0
    try:
        return args.func(args)
    except (UsageError, UnsupportedEncoding, SuiteError, OSError) as e:
        print(f"cspbench: error: {e}", file=sys.stderr)
        return 64
    except (ProgramError, SpecError, DimacsError, ScheduleFormatError, StructuralError) as e:
        print(f"cspbench: input error: {e}", file=sys.stderr)
        return 65


if __name__ == "__main__":
    sys.exit(main())
