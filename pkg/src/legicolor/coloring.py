"""Colorings of plane points: line types, bad and dangerous pairs, the
uncolored reserve set, and the degree-cap check for the extension stage.

The type of a line under a (partial) coloring is the per-color count vector
of its points; uncolored points count nowhere.  Two lines with equal types
form a bad pair; a coloring is legitimate when no bad pair exists.  Under a
partial coloring, a pair whose types are within L1 distance 22*ln(n) is
dangerous: only dangerous pairs can still turn bad when the uncolored points
receive colors, because each line keeps at most 11*ln(n) reserve points.

Natural logarithm throughout.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InfeasibleError
from .plane import ProjectivePlane
from .rng import SplitMix64

__all__ = [
    "UNCOLORED", "PartialColoring", "ReserveSet", "CapsReport",
    "line_type", "all_line_types", "l1_distance", "danger_threshold",
    "find_bad_pairs", "find_dangerous_pairs", "check_degree_caps",
    "sample_reserve", "sample_partial", "default_inclusion_prob",
    "save_coloring", "load_coloring", "save_reserve", "load_reserve",
]

UNCOLORED = None  # the hole marker for unassigned points


class PartialColoring:
    """Map point id -> color in [1, d] or UNCOLORED.  Single-writer mutable."""

    __slots__ = ("d", "colors")

    def __init__(self, d: int, colors):
        if d < 1:
            raise ValueError("color count must be >= 1")
        self.d = int(d)
        self.colors = list(colors)
        for c in self.colors:
            if c is not None and not (1 <= c <= d):
                raise ValueError(f"color {c} outside [1, {d}]")

    @classmethod
    def blank(cls, d: int, n_points: int) -> "PartialColoring":
        return cls(d, [UNCOLORED] * n_points)

    @property
    def uncolored(self) -> frozenset[int]:
        return frozenset(i for i, c in enumerate(self.colors) if c is UNCOLORED)

    @property
    def is_total(self) -> bool:
        return all(c is not None for c in self.colors)

    def copy(self) -> "PartialColoring":
        return PartialColoring(self.d, self.colors)

    def __eq__(self, other):
        return (isinstance(other, PartialColoring)
                and self.d == other.d and self.colors == other.colors)

    def __repr__(self):
        holes = sum(1 for c in self.colors if c is None)
        return f"PartialColoring(d={self.d}, points={len(self.colors)}, uncolored={holes})"


def line_type(plane: ProjectivePlane, coloring: PartialColoring, line_id: int) -> tuple[int, ...]:
    """Per-color point counts of one line; uncolored points contribute nowhere."""
    counts = [0] * coloring.d
    for p in plane.lines[line_id]:
        c = coloring.colors[p]
        if c is not None:
            counts[c - 1] += 1
    return tuple(counts)


def all_line_types(plane: ProjectivePlane, coloring: PartialColoring) -> np.ndarray:
    """Types of every line as an (n_lines, d) int matrix."""
    out = np.zeros((plane.n_lines, coloring.d), dtype=np.int64)
    for li, line in enumerate(plane.lines):
        for p in line:
            c = coloring.colors[p]
            if c is not None:
                out[li, c - 1] += 1
    return out


def l1_distance(t1, t2) -> int:
    if len(t1) != len(t2):
        raise ValueError(f"type dimensions differ: {len(t1)} vs {len(t2)}")
    return int(sum(abs(a - b) for a, b in zip(t1, t2)))


def danger_threshold(order: int) -> float:
    """22*ln(n), the L1 radius within which a pair can still become bad."""
    return 22.0 * math.log(order)


def find_bad_pairs(plane: ProjectivePlane, coloring: PartialColoring) -> list[tuple[int, int]]:
    """All unordered line pairs with equal types; empty means legitimate.

    Requires a total coloring (types of partially colored lines are not
    comparable for legitimacy).
    """
    if not coloring.is_total:
        raise ValueError("bad pairs are defined for total colorings only")
    groups: dict[tuple[int, ...], list[int]] = {}
    types = all_line_types(plane, coloring)
    for li in range(plane.n_lines):
        groups.setdefault(tuple(int(x) for x in types[li]), []).append(li)
    pairs = []
    for members in groups.values():
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                pairs.append((members[i], members[j]))
    pairs.sort()
    return pairs


def find_dangerous_pairs(plane: ProjectivePlane, coloring: PartialColoring,
                         threshold: float | None = None) -> list[tuple[int, int]]:
    """Unordered line pairs with type distance <= threshold (default 22*ln n).

    Ties count as dangerous (the comparison is exact, nothing rounded).  The
    threshold override exists for experiments on small planes, where
    22*ln(n) exceeds the maximum possible distance 2(n+1) and every pair is
    dangerous.
    """
    if threshold is None:
        threshold = danger_threshold(plane.order)
    types = all_line_types(plane, coloring)
    n_lines = plane.n_lines
    pairs = []
    # row-chunked pairwise L1 keeps memory at O(chunk * n_lines * d)
    chunk = max(1, int(4e6 // max(1, n_lines * coloring.d)))
    for start in range(0, n_lines, chunk):
        stop = min(start + chunk, n_lines)
        dist = np.abs(types[start:stop, None, :] - types[None, :, :]).sum(axis=2)
        for i, j in zip(*np.nonzero(dist <= threshold)):
            gi = start + int(i)
            if gi < j:
                pairs.append((gi, int(j)))
    return pairs


@dataclass(frozen=True)
class ReserveSet:
    """Points left uncolored by the first stage; meets every line between
    ln(n) and 11*ln(n) times (enforced at construction)."""

    members: frozenset[int]
    per_line: tuple[int, ...]
    low: float
    high: float
    size_cap: float  # (n^2+n+1) * 11 ln n / (n+1); informational, often vacuous at small n

    @classmethod
    def from_members(cls, plane: ProjectivePlane, members) -> "ReserveSet":
        n = plane.order
        if n < 2:
            raise ValueError("reserve sets need order >= 2 (ln 1 = 0 voids the window)")
        members = frozenset(int(p) for p in members)
        low, high = math.log(n), 11.0 * math.log(n)
        per_line = tuple(sum(1 for p in line if p in members) for line in plane.lines)
        for li, cnt in enumerate(per_line):
            if not (low <= cnt <= high):
                raise ValueError(
                    f"line {li} meets the reserve {cnt} times, outside [{low:.3f}, {high:.3f}]")
        cap = (n * n + n + 1) * high / (n + 1)
        return cls(members, per_line, low, high, cap)

    @property
    def within_size_cap(self) -> bool:
        return len(self.members) <= self.size_cap


def default_inclusion_prob(order: int) -> float:
    """min(1, 6*ln(n)/(n+1)): midpoint of the per-line window in expectation."""
    return min(1.0, 6.0 * math.log(order) / (order + 1))


def sample_reserve(plane: ProjectivePlane, rng: SplitMix64,
                   inclusion_prob: float | None = None,
                   max_attempts: int = 1000) -> ReserveSet:
    """Randomized search for a reserve set by independent point inclusion.

    Retries until every line count lands in [ln n, 11 ln n]; raises
    InfeasibleError when the attempt budget runs out (expected for some small
    orders and extreme probabilities).
    """
    n = plane.order
    if n < 2:
        raise ValueError("reserve sampling needs order >= 2")
    if inclusion_prob is None:
        inclusion_prob = default_inclusion_prob(n)
    if not 0.0 < inclusion_prob <= 1.0:
        raise InfeasibleError(f"inclusion probability {inclusion_prob} outside (0, 1]")
    for _ in range(max_attempts):
        members = [p for p in range(plane.n_points) if rng.uniform() < inclusion_prob]
        try:
            return ReserveSet.from_members(plane, members)
        except ValueError:
            continue
    raise InfeasibleError(
        f"no reserve set within {max_attempts} attempts at inclusion {inclusion_prob:.4f}")


def sample_partial(plane: ProjectivePlane, reserve: ReserveSet | None,
                   d: int, rng: SplitMix64) -> PartialColoring:
    """Uniform i.i.d. colors outside the reserve; reserve points stay uncolored."""
    members = reserve.members if reserve is not None else frozenset()
    colors = []
    for p in range(plane.n_points):
        if p in members:
            colors.append(UNCOLORED)
        else:
            colors.append(1 + rng.randbelow(d))
    return PartialColoring(d, colors)


@dataclass(frozen=True)
class CapsReport:
    """Outcome of the dangerous-pair degree-cap check for a partial coloring.

    passed requires both: no line in a dangerous pair with more than a other
    lines, and no reserve point on more than b lines involved in dangerous
    pairs.  The derived per-point event count (pairs containing the point in
    exactly one line) is reported against the product cap a*b.
    """

    passed: bool
    line_cap: int
    max_pair_degree: int
    worst_line: int | None
    point_cap: int
    max_involved_lines: int
    worst_point: int | None
    events_cap: int
    max_events_per_point: int
    worst_event_point: int | None
    dangerous_pairs: int


def check_degree_caps(plane: ProjectivePlane, partial: PartialColoring,
                      reserve: ReserveSet, a: int, b: int,
                      threshold: float | None = None) -> CapsReport:
    """Verify the (a, b) caps that bound extension-stage event degrees."""
    holes = partial.uncolored
    if holes != reserve.members:
        raise ValueError("partial coloring must be uncolored exactly on the reserve set")

    pairs = find_dangerous_pairs(plane, partial, threshold)

    degree = [0] * plane.n_lines
    for i, j in pairs:
        degree[i] += 1
        degree[j] += 1
    max_deg, worst_line = 0, None
    for li, dg in enumerate(degree):
        if dg > max_deg:
            max_deg, worst_line = dg, li

    involved = [dg > 0 for dg in degree]
    max_inv, worst_point = 0, None
    events = {p: 0 for p in reserve.members}
    for p in sorted(reserve.members):
        cnt = sum(1 for li in plane.point_to_lines[p] if involved[li])
        if cnt > max_inv:
            max_inv, worst_point = cnt, p
    line_sets = [set(line) for line in plane.lines]
    for i, j in pairs:
        sym = line_sets[i] ^ line_sets[j]
        for p in sym:
            if p in events:
                events[p] += 1
    max_ev, worst_ev = 0, None
    for p in sorted(events):
        if events[p] > max_ev:
            max_ev, worst_ev = events[p], p

    return CapsReport(
        passed=(max_deg <= a and max_inv <= b),
        line_cap=a, max_pair_degree=max_deg, worst_line=worst_line,
        point_cap=b, max_involved_lines=max_inv, worst_point=worst_point,
        events_cap=a * b, max_events_per_point=max_ev, worst_event_point=worst_ev,
        dangerous_pairs=len(pairs),
    )


# -- JSON interchange --------------------------------------------------------

def save_coloring(coloring: PartialColoring, destination) -> None:
    doc = {"d": coloring.d, "assignment": list(coloring.colors)}
    text = json.dumps(doc)
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        Path(destination).write_text(text + "\n", encoding="utf-8")


def load_coloring(source) -> PartialColoring:
    text = source.read() if hasattr(source, "read") else Path(source).read_text(encoding="utf-8")
    doc = json.loads(text)
    return PartialColoring(int(doc["d"]),
                           [None if c is None else int(c) for c in doc["assignment"]])


def save_reserve(reserve: ReserveSet, destination) -> None:
    text = json.dumps({"members": sorted(reserve.members)})
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        Path(destination).write_text(text + "\n", encoding="utf-8")


def load_reserve(plane: ProjectivePlane, source) -> ReserveSet:
    text = source.read() if hasattr(source, "read") else Path(source).read_text(encoding="utf-8")
    doc = json.loads(text)
    return ReserveSet.from_members(plane, [int(p) for p in doc["members"]])
