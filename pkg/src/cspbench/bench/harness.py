"""Timed comparison harness.

A suite is an INI file::

    [suite]
    seed = 7                 ; master seed, instance seeds are drawn from it
    budget = 10              ; seconds per cell
    paradigms = fd, stable, modelgen, abductive

    [queens]
    sizes = 4..8
    modes = all

    [coloring]
    sizes = 6, 8, 10
    p = 0.2
    k = 4
    per_size = 2
    modes = first, all

    [schedule]
    profile = scaled
    count = 3
    modes = optimize

Every (instance, paradigm, mode) cell becomes one :class:`BenchResult`.
Cells run one after another; a timeout is recorded in the row and never
stops the suite. Unsupported combinations are skipped.
"""
from __future__ import annotations

import configparser
import csv
import logging
import math
import os
from dataclasses import dataclass, fields
from pathlib import Path

from cspbench.bench.encode import PARADIGMS, Coloring, Queens, Schedule, supports
from cspbench.bench.graphs import gen_graph
from cspbench.bench.rng import SplitMix64
from cspbench.bench.run import MODES, solve_problem
from cspbench.bench.schedule import gen_schedule

log = logging.getLogger(__name__)

COLUMNS = ("paradigm", "problem", "size", "mode", "outcome", "value_or_count",
           "setup_ms", "solve_ms", "nodes", "backtracks", "seed")
TIMING = ("setup_ms", "solve_ms")


class SuiteError(ValueError):
    """Malformed suite description."""


@dataclass
class BenchResult:
    paradigm: str
    problem: str
    size: int
    mode: str
    outcome: str
    value_or_count: int | None
    setup_ms: float
    solve_ms: float
    nodes: int | None
    backtracks: int | None
    seed: int

    def __post_init__(self):
        if self.setup_ms < 0 or self.solve_ms < 0:
            raise ValueError("negative time")
        self.setup_ms = round(self.setup_ms, 3)
        self.solve_ms = round(self.solve_ms, 3)

    @property
    def total_ms(self):
        return self.setup_ms + self.solve_ms


def result_from_outcome(out, seed: int) -> BenchResult:
    return BenchResult(out.paradigm, out.problem, out.size, out.mode, out.outcome,
                       out.value_or_count, out.setup_s * 1000, out.solve_s * 1000,
                       out.nodes, out.backtracks, seed)


# -- CSV ----------------------------------------------------------------------

def _cell(v):
    return "" if v is None else v


def write_csv(results, path) -> None:
    """Write ``results`` with the fixed column order; raises OSError if unwritable."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(COLUMNS)
        for r in results:
            w.writerow([_cell(getattr(r, c)) for c in COLUMNS])


def read_csv(path) -> list[BenchResult]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != COLUMNS:
        raise ValueError(f"{path}: unexpected header")
    types = {f.name: f.type for f in fields(BenchResult)}
    out = []
    for row in rows[1:]:
        vals = {}
        for name, raw in zip(COLUMNS, row):
            t = types[name]
            if raw == "":
                vals[name] = None
            elif "float" in t:
                vals[name] = float(raw)
            elif "int" in t:
                vals[name] = int(raw)
            else:
                vals[name] = raw
        out.append(BenchResult(**vals))
    return out


# -- suite --------------------------------------------------------------------

def _ints(text: str) -> list[int]:
    """Parse ``4..8`` or ``4, 6, 9`` (or a mix)."""
    out = []
    for part in text.replace(",", " ").split():
        if ".." in part:
            lo, hi = part.split("..")
            out += range(int(lo), int(hi) + 1)
        else:
            out.append(int(part))
    return out


def _words(text: str) -> list[str]:
    return [w for w in text.replace(",", " ").split() if w]


def load_suite(path) -> configparser.ConfigParser:
    cfg = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        with open(path) as fh:
            cfg.read_file(fh)
    except configparser.Error as e:
        raise SuiteError(str(e)) from None
    return cfg


def suite_instances(cfg, seed: int | None = None):
    """Yield ``(problem, modes, instance_seed)`` in a deterministic order."""
    if seed is None:
        seed = cfg.getint("suite", "seed", fallback=0)
    rng = SplitMix64(seed)
    known = {"suite", "queens", "coloring", "schedule"}
    extra = set(cfg.sections()) - known
    if extra:
        raise SuiteError(f"unknown section(s): {', '.join(sorted(extra))}")

    def modes(sec, default):
        ms = _words(cfg.get(sec, "modes", fallback=default))
        bad = [m for m in ms if m not in MODES]
        if bad:
            raise SuiteError(f"[{sec}] unknown mode {bad[0]!r}")
        return ms

    if cfg.has_section("queens"):
        ms = modes("queens", "all")
        for n in _ints(cfg.get("queens", "sizes", fallback="4..8")):
            yield Queens(n), ms, seed
    if cfg.has_section("coloring"):
        sec = cfg["coloring"]
        ms = modes("coloring", "all")
        p = sec.getfloat("p", fallback=0.2)
        k = sec.getint("k", fallback=4)
        for n in _ints(sec.get("sizes", "4..8")):
            for _ in range(sec.getint("per_size", fallback=1)):
                s = rng.next_u64()
                yield Coloring(gen_graph(n, p, s, k)), ms, s
    if cfg.has_section("schedule"):
        sec = cfg["schedule"]
        ms = modes("schedule", "optimize")
        profile = sec.get("profile", "scaled")
        for _ in range(sec.getint("count", fallback=1)):
            s = rng.next_u64()
            yield Schedule(gen_schedule(profile, s)), ms, s


def run_suite(cfg, out: str | os.PathLike | None = None, plot_dir=None,
              seed: int | None = None) -> list[BenchResult]:
    """Run every cell of ``cfg`` (a parsed suite or a path to one)."""
    if not isinstance(cfg, configparser.ConfigParser):
        cfg = load_suite(cfg)
    budget = cfg.getfloat("suite", "budget", fallback=None)
    paradigms = _words(cfg.get("suite", "paradigms", fallback=" ".join(PARADIGMS)))
    bad = [p for p in paradigms if p not in PARADIGMS]
    if bad:
        raise SuiteError(f"unknown paradigm {bad[0]!r}")
    # fail on an unwritable destination before spending time on the runs
    if out is not None:
        _check_writable(Path(out))
    results = []
    for problem, modes, s in suite_instances(cfg, seed):
        for mode in modes:
            if mode == "optimize" and problem.kind != "schedule":
                continue
            for par in paradigms:
                if not supports(problem, par):
                    log.info("skipping %s on %s", par, problem.name)
                    continue
                o = solve_problem(problem, par, mode, budget=budget)
                r = result_from_outcome(o, s)
                log.info("%s %s %s: %s %s (%.1f ms)", par, r.problem, mode, r.outcome,
                         r.value_or_count, r.total_ms)
                results.append(r)
    if out is not None:
        write_csv(results, out)
    if plot_dir is not None:
        write_plot_data(results, plot_dir)
    return results


def _check_writable(path: Path):
    parent = path.parent if str(path.parent) else Path(".")
    if not parent.is_dir() or not os.access(parent, os.W_OK) or (path.exists() and not os.access(path, os.W_OK)):
        raise OSError(f"cannot write results to {path}")


# -- plot data ------------------------------------------------------------------

def plot_series(results):
    """``{(kind, mode): {size: {paradigm: mean total ms or nan}}}``.

    A cell containing a timeout is reported as nan.
    """
    acc: dict = {}
    for r in results:
        kind = r.problem.split("-")[0]
        cell = acc.setdefault((kind, r.mode), {}).setdefault(r.size, {}).setdefault(r.paradigm, [])
        cell.append(math.nan if r.outcome == "timeout" else r.total_ms)
    return {key: {size: {p: sum(v) / len(v) for p, v in by.items()} for size, by in sizes.items()}
            for key, sizes in acc.items()}


def write_plot_data(results, directory) -> list[Path]:
    """One ``<kind>-<mode>.dat`` per series: a size column plus one column per paradigm."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    written = []
    for (kind, mode), sizes in sorted(plot_series(results).items()):
        pars = [p for p in PARADIGMS if any(p in by for by in sizes.values())]
        lines = ["# size " + " ".join(pars) + "   (mean setup+solve ms, nan = timeout)"]
        for size in sorted(sizes):
            vals = [sizes[size].get(p, math.nan) for p in pars]
            lines.append(f"{size} " + " ".join("nan" if math.isnan(v) else f"{v:.3f}" for v in vals))
        path = d / f"{kind}-{mode}.dat"
        path.write_text("\n".join(lines) + "\n")
        written.append(path)
    return written
