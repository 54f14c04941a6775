"""Resampling search with a fully decodable run register.

The search assigns pre-sampled values to variables in id order; whenever an
event over fully-assigned variables fires, the free block of the
lowest-indexed firing event is erased and the step logged as (alpha, beta,
gamma).  The register plus the final configuration reconstruct the entire
run (decode), so each logged step compresses the consumed randomness
losslessly -- long runs would compress too well, which is why the search
halts at the color counts computed in the bounds module.
"""
from .api import SolveResult, solve_full, solve_extension
from .builders import (build_extension_problem, build_full_problem,
                       default_free_block, extension_capacity)
from .decode import DecodedRun, DecodedStep, decode, uncolored_sets
from .engine import (Exhausted, RunRegister, Success, available_backends,
                     backend_name, run)
from .events import (InstanceMeta, PairEvent, ProblemInstance, TableEvent,
                     detect_violations)

__all__ = [
    "SolveResult", "solve_full", "solve_extension",
    "build_full_problem", "build_extension_problem", "default_free_block",
    "extension_capacity",
    "DecodedRun", "DecodedStep", "decode", "uncolored_sets",
    "Success", "Exhausted", "RunRegister", "run", "backend_name",
    "available_backends",
    "ProblemInstance", "PairEvent", "TableEvent", "InstanceMeta",
    "detect_violations",
]
