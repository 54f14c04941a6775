"""High-level drivers tying instances, the run loop and verification together."""
from __future__ import annotations

from dataclasses import dataclass

from ..coloring import PartialColoring, ReserveSet, find_bad_pairs
from ..plane import ProjectivePlane
from .builders import (build_extension_problem, build_full_problem,
                       default_free_block, extension_capacity)
from .engine import Exhausted, RunRegister, Success, run
from .events import ProblemInstance

__all__ = ["SolveResult", "solve_full", "solve_extension"]


@dataclass(frozen=True)
class SolveResult:
    outcome: Success | Exhausted
    instance: ProblemInstance
    coloring: PartialColoring
    bad_pairs: list[tuple[int, int]] | None  # external verification, success only

    @property
    def succeeded(self) -> bool:
        return isinstance(self.outcome, Success)

    @property
    def verified(self) -> bool:
        return self.succeeded and not self.bad_pairs

    @property
    def register(self) -> RunRegister:
        return self.outcome.register


def solve_full(plane: ProjectivePlane, d: int, seed: int, m: int | None = None,
               max_steps: int = 10 ** 7, backend: str | None = None) -> SolveResult:
    """Search for a legitimate total d-coloring; the solver's own success is
    re-verified through the coloring module before being reported."""
    if m is None:
        m = default_free_block(plane)
    instance = build_full_problem(plane, d, m)
    outcome = run(instance, seed, max_steps, backend)
    if isinstance(outcome, Success):
        coloring = PartialColoring(d, list(outcome.assignment))
        return SolveResult(outcome, instance, coloring, find_bad_pairs(plane, coloring))
    coloring = PartialColoring(d, [c if c else None for c in outcome.assignment])
    return SolveResult(outcome, instance, coloring, None)


def solve_extension(plane: ProjectivePlane, reserve: ReserveSet,
                    partial: PartialColoring, d: int, seed: int,
                    m: int | None = None, a: int = 1, b: int = 4,
                    threshold: float | None = None, max_steps: int = 10 ** 7,
                    backend: str | None = None) -> SolveResult:
    """Extend a partial coloring over its reserve set; the returned coloring
    merges the fixed part with the solved reserve values."""
    if m is None:
        cap = extension_capacity(plane, reserve, partial, threshold)
        m = default_free_block(plane, a, b, cap=2 if cap is None else max(cap, 2))
    instance = build_extension_problem(plane, reserve, partial, d, m, a, b, threshold)
    outcome = run(instance, seed, max_steps, backend)
    points = instance.meta.point_ids
    merged = [c for c in partial.colors]
    assignment = outcome.assignment
    for var, p in enumerate(points):
        v = assignment[var]
        merged[p] = int(v) if v else None
    coloring = PartialColoring(d, merged)
    if isinstance(outcome, Success):
        return SolveResult(outcome, instance, coloring, find_bad_pairs(plane, coloring))
    return SolveResult(outcome, instance, coloring, None)
