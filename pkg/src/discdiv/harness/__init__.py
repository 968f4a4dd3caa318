"""Scenario definitions, comparison reports and the command line surface."""

from .report import ComparisonRow, emit_csv, fig1_series, run_scenario
from .scenario import BUILTINS, Scenario, builtin, load_scenario, parse_scenario

__all__ = [
    "BUILTINS",
    "ComparisonRow",
    "Scenario",
    "builtin",
    "emit_csv",
    "fig1_series",
    "load_scenario",
    "parse_scenario",
    "run_scenario",
]
