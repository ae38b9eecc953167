"""Weak, delay and pattern-based bisimulation for weighted transition systems."""

from .bisim import (BisimVerdict, brute_force_largest, check_bisimulation, largest_bisimulation,
                    strong_kernel_bisim)
from .fixpoint import BehaviorTable, InexactError, path_oracle, saturate, solve, solve_exact, solve_iterate
from .pattern import PatternAutomaton, build_delay, build_strong, build_weak, builtin, load_pattern
from .semiring import BOOL, INF, NAT, REAL, SemiringValue, kind_from_name
from .system import Partition, WeightedSystem, all_partitions, elaborate_process_term, parse_partition, parse_system
from .valuation import Valuation, kleisli_extend, unit

__version__ = "0.1.0"

__all__ = [
    "BOOL", "NAT", "REAL", "INF", "SemiringValue", "kind_from_name", "Valuation", "unit", "kleisli_extend",
    "PatternAutomaton", "build_strong", "build_weak", "build_delay", "builtin", "load_pattern",
    "WeightedSystem", "Partition", "all_partitions", "parse_system", "parse_partition", "elaborate_process_term",
    "BehaviorTable", "InexactError", "solve", "solve_exact", "solve_iterate", "saturate", "path_oracle",
    "BisimVerdict", "check_bisimulation", "largest_bisimulation", "brute_force_largest", "strong_kernel_bisim",
]
