import subprocess
import sys
from pathlib import Path

import pytest

from cspbench.bench import read_csv, read_dimacs, read_schedule, toy_schedule, write_schedule
from cspbench.cli import main
from cspbench.grounder import read_ground

SPECS = Path(__file__).resolve().parent.parent / "specs"

QUEENS_LP = """\
d(1..4).
1 {pos(X,Y) : d(Y)} 1 :- d(X).
:- d(X1), d(Y1), d(X2), d(Y2), pos(X1,Y1), pos(X2,Y2), X1 < X2, Y1 = Y2.
:- d(X1), d(Y1), d(X2), d(Y2), pos(X1,Y1), pos(X2,Y2), X1 < X2, Y1 + X1 = Y2 + X2.
:- d(X1), d(Y1), d(X2), d(Y2), pos(X1,Y1), pos(X2,Y2), X1 < X2, Y1 - X1 = Y2 - X2.
"""


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_lp(tmp_path, capsys):
    f = tmp_path / "q.lp"
    f.write_text(QUEENS_LP)
    code, out, _ = run(capsys, "solve", f)
    assert code == 0
    assert "models=2" in out
    assert "pos(1,2) pos(2,4) pos(3,1) pos(4,3)" in out


def test_ground_lp(tmp_path, capsys):
    f = tmp_path / "q.lp"
    f.write_text(QUEENS_LP)
    code, out, _ = run(capsys, "ground", f)
    assert code == 0
    gp = read_ground(out)
    assert len(gp.rules) > 0


def test_solve_dl(capsys):
    code, out, _ = run(capsys, "solve", SPECS / "queens_modelgen.dl", "--show", "0")
    assert code == 0 and "models=92" in out
    code, out, _ = run(capsys, "solve", SPECS / "maintenance.dl", "--mode", "optimize")
    assert code == 0 and "OPTIMUM 15" in out


@pytest.mark.parametrize("paradigm", ["fd", "stable", "modelgen", "abductive"])
def test_solve_queens(capsys, paradigm):
    code, out, _ = run(capsys, "solve", "queens:6", "--paradigm", paradigm)
    assert code == 0 and "SAT models=4" in out


def test_solve_timeout_exit_code(capsys):
    code, out, _ = run(capsys, "solve", "queens:30", "--budget", "0.2", "--show", "0")
    assert code == 2 and "TIMEOUT" in out


def test_gen_and_verify(tmp_path, capsys):
    g = tmp_path / "g.col"
    assert run(capsys, "gen", "graph", "--n", "7", "--p", "0.3", "--seed", "4", "-o", g)[0] == 0
    assert read_dimacs(g.read_text()).n == 7
    code, out, _ = run(capsys, "verify", g, "--oracle")
    assert code == 0 and "AGREE" in out and "oracle:" in out
    s = tmp_path / "s.sched"
    assert run(capsys, "gen", "schedule", "--seed", "2", "-o", s)[0] == 0
    assert read_schedule(s.read_text()).meta["seed"] == 2
    code, out, _ = run(capsys, "verify", s, "--oracle")
    assert code == 0 and "AGREE" in out


def test_gen_is_seeded(capsys):
    a = run(capsys, "gen", "graph", "--n", "15", "--seed", "8")[1]
    b = run(capsys, "gen", "graph", "--n", "15", "--seed", "8")[1]
    c = run(capsys, "gen", "graph", "--n", "15", "--seed", "9")[1]
    assert a == b != c


def test_bench(tmp_path, capsys):
    cfg = tmp_path / "s.cfg"
    cfg.write_text("[suite]\nseed = 1\nparadigms = fd, stable\n[queens]\nsizes = 4..5\n")
    out_csv = tmp_path / "r.csv"
    code, out, _ = run(capsys, "bench", cfg, "--out", out_csv, "--plot-data", tmp_path / "plot", "--seed", "5")
    assert code == 0 and "4 rows" in out
    rows = read_csv(out_csv)
    assert [r.value_or_count for r in rows] == [2, 2, 10, 10]
    assert all(r.seed == 5 for r in rows)
    assert (tmp_path / "plot" / "queens-all.dat").exists()


def test_errors(tmp_path, capsys):
    code, _, err = run(capsys, "solve", tmp_path / "x.txt")
    assert code == 64 and "unrecognized" in err
    bad = tmp_path / "bad.lp"
    bad.write_text("p(X) :- not q(X).")
    code, _, err = run(capsys, "solve", bad)
    assert code == 65
    cfg = tmp_path / "s.cfg"
    cfg.write_text("[queens]\nsizes = 4\n")
    code, _, err = run(capsys, "bench", cfg, "--out", tmp_path / "no" / "r.csv")
    assert code == 64 and "cannot write" in err
    sched = tmp_path / "s.sched"
    sched.write_text(write_schedule(toy_schedule()))
    code, _, err = run(capsys, "solve", sched, "--paradigm", "modelgen")
    assert code == 64 and "modelgen" in err
    sched.write_text("HORIZON 2\n")
    code, _, err = run(capsys, "solve", sched)
    assert code == 65


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "cspbench.cli", "solve", "queens:5"],
                       capture_output=True, text=True, timeout=120)
    assert r.returncode == 0 and "models=10" in r.stdout
