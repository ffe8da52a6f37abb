"""Encodings, instance generators, brute-force oracles and the timed harness."""
from cspbench.bench.encode import (
    PARADIGMS, Coloring, Queens, Schedule, UnsupportedEncoding, encode_fd, encode_text, supports,
)
from cspbench.bench.graphs import DimacsError, GraphInstance, gen_graph, read_dimacs, write_dimacs
from cspbench.bench.harness import (
    COLUMNS, BenchResult, SuiteError, load_suite, read_csv, run_suite, write_csv, write_plot_data,
)
from cspbench.bench.oracle import OracleAnswer, OracleRefused, brute_force, check_solution
from cspbench.bench.rng import SplitMix64
from cspbench.bench.run import MODES, RunOutcome, VerificationError, solve_problem
from cspbench.bench.schedule import (
    ScheduleFormatError, ScheduleInstance, gen_schedule, read_schedule, toy_schedule, write_schedule,
)

__all__ = [
    "PARADIGMS", "Coloring", "Queens", "Schedule", "UnsupportedEncoding", "encode_fd", "encode_text",
    "supports", "DimacsError", "GraphInstance", "gen_graph", "read_dimacs", "write_dimacs",
    "COLUMNS", "BenchResult", "SuiteError", "load_suite", "read_csv", "run_suite", "write_csv",
    "write_plot_data", "OracleAnswer", "OracleRefused", "brute_force", "check_solution",
    "SplitMix64", "MODES", "RunOutcome", "VerificationError", "solve_problem",
    "ScheduleFormatError", "ScheduleInstance", "gen_schedule", "read_schedule", "toy_schedule",
    "write_schedule",
]
