"""Adapters turning plane coloring problems into resampling instances.

Full mode: one event per unordered line pair over all plane points; the
event's variable set is the symmetric difference of the two lines (the
shared point cancels from the type comparison), its sides are the two
line remainders, and it fires on equal types.

Extension mode: variables are the reserve points only; events are the
dangerous pairs of the fixed partial coloring, restricted to reserve points
in the symmetric difference, with the already-colored points folded into a
per-event count offset.  Pairs that are not dangerous need no event: a line
keeps at most 11*ln(n) reserve points, so types move by at most 22*ln(n)
during the extension.
"""
from __future__ import annotations

from ..bounds import optimal_m
from ..coloring import (PartialColoring, ReserveSet, check_degree_caps,
                        find_dangerous_pairs)
from ..errors import CapsError, InstanceError
from ..plane import ProjectivePlane
from .events import InstanceMeta, PairEvent, ProblemInstance

__all__ = ["build_full_problem", "build_extension_problem",
           "default_free_block", "extension_capacity"]


def default_free_block(plane: ProjectivePlane, a: int = 1, b: int | None = None,
                       cap: int | None = None) -> int:
    """Free-block size minimizing the color expression, clamped to what the
    instance geometry supports (full mode supports at most n per side)."""
    n = plane.order
    if b is None:
        b = n * n * (n + 1)  # full mode: events per point
    if cap is None:
        cap = n
    best = optimal_m(a, max(b, 4)).m
    return max(2, min(best, cap, 20))


def build_full_problem(plane: ProjectivePlane, d: int, m: int) -> ProblemInstance:
    """Instance searching for a legitimate total d-coloring."""
    n = plane.order
    if d < 1:
        raise InstanceError("need at least one color")
    if not 2 <= m <= min(n, 20):
        raise InstanceError(f"free block m = {m} outside [2, {min(n, 20)}]")
    line_sets = [frozenset(line) for line in plane.lines]
    events = []
    for i in range(plane.n_lines):
        for j in range(i + 1, plane.n_lines):
            events.append(PairEvent(
                lines=(i, j),
                side_a=tuple(sorted(line_sets[i] - line_sets[j])),
                side_b=tuple(sorted(line_sets[j] - line_sets[i])),
                delta=(),
                free_count=m,
            ))
    meta = InstanceMeta("full", order=n, colors=d, free_block=m)
    return ProblemInstance([d] * plane.n_points, events, meta)


def extension_capacity(plane: ProjectivePlane, reserve: ReserveSet,
                       partial: PartialColoring,
                       threshold: float | None = None) -> int | None:
    """Largest usable free block: the smallest count of reserve variables on
    a populated side of any dangerous pair.  None when no side is populated
    (then any block size works; there is nothing to erase)."""
    members = reserve.members
    line_sets = [frozenset(line) for line in plane.lines]
    cap = None
    for i, j in find_dangerous_pairs(plane, partial, threshold):
        for side in (line_sets[i] - line_sets[j], line_sets[j] - line_sets[i]):
            k = len(side & members)
            if k and (cap is None or k < cap):
                cap = k
    return cap


def build_extension_problem(plane: ProjectivePlane, reserve: ReserveSet,
                            partial: PartialColoring, d: int, m: int,
                            a: int, b: int,
                            threshold: float | None = None) -> ProblemInstance:
    """Instance extending a fixed partial coloring over the reserve points.

    Requires the degree caps (a, b) to hold for the partial coloring (the
    caps bound every reserve point to at most a*b events); raises CapsError
    otherwise.  The free block m must fit the smallest populated side of any
    dangerous pair.
    """
    if not reserve.members:
        raise InstanceError("empty reserve set: nothing to extend")
    if partial.uncolored != reserve.members:
        raise InstanceError("partial coloring must be uncolored exactly on the reserve")
    if partial.d > d:
        raise InstanceError(f"partial coloring uses up to {partial.d} colors > d = {d}")

    report = check_degree_caps(plane, partial, reserve, a, b, threshold)
    if not report.passed:
        raise CapsError(report)

    cap = extension_capacity(plane, reserve, partial, threshold)
    if cap is not None and cap < 2:
        raise InstanceError(
            "some dangerous pair keeps fewer than 2 reserve points per populated "
            "side; use full mode for this plane")
    limit = 20 if cap is None else min(cap, 20)
    if not 2 <= m <= limit:
        raise InstanceError(f"free block m = {m} outside [2, {limit}]")

    points = sorted(reserve.members)
    var_of = {p: idx for idx, p in enumerate(points)}
    line_sets = [frozenset(line) for line in plane.lines]
    events = []
    for i, j in find_dangerous_pairs(plane, partial, threshold):
        a_pts = line_sets[i] - line_sets[j]
        b_pts = line_sets[j] - line_sets[i]
        side_a = tuple(sorted(var_of[p] for p in a_pts if p in var_of))
        side_b = tuple(sorted(var_of[p] for p in b_pts if p in var_of))
        balance: dict[int, int] = {}
        for p in b_pts:
            c = partial.colors[p]
            if c is not None:
                balance[c] = balance.get(c, 0) + 1
        for p in a_pts:
            c = partial.colors[p]
            if c is not None:
                balance[c] = balance.get(c, 0) - 1
        delta = tuple(sorted((c, v) for c, v in balance.items() if v))
        if not side_a and not side_b:
            if not delta:
                raise InstanceError(
                    f"lines {i} and {j} already share a type and keep no reserve "
                    "points; the partial coloring cannot be extended")
            continue  # fixed unequal types: the pair can never fire
        events.append(PairEvent(
            lines=(i, j), side_a=side_a, side_b=side_b, delta=delta, free_count=m))

    meta = InstanceMeta("extension", order=plane.order, colors=d, free_block=m,
                        caps=(a, b), threshold=threshold, point_ids=tuple(points))
    return ProblemInstance([d] * len(points), events, meta)
