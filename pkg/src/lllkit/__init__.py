"""Algorithmic Lovász Local Lemma toolkit.

Exact criteria, resampling tables, witness DAGs, and four solvers:
sequential and parallel resampling, single-MIS WD enumeration, and a
deterministic search over a k-wise independent space.
"""

from .derandomize import build_space, solve_deterministic
from .errors import (
    CapExceeded,
    CriterionUnsatisfied,
    InconsistentMerge,
    InvalidModel,
    LLLError,
    ParseError,
    UnsupportedDistribution,
)
from .events import BadEvent, EventSystem, VariableDomain, load_model, parse_dimacs, parse_native
from .instances import random_ksat, tiny_a
from .mis import UndirectedGraph, luby_mis
from .parallel import run_parallel
from .sequential import EngineStats, ExecutionLog, run_sequential
from .shearer import check_shearer, max_slack, q_polynomial, report
from .table import ResamplingTable
from .wd import WitnessDag, consistent, merge
from .wdenum import choose_cap, enumerate_wds, final_configuration, run_wdenum

__version__ = "0.1.0"
