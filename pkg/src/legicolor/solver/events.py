"""Resampling problem instances: variables, forbidden events, fixed orders.

Assignments at this layer are integer sequences indexed by variable id,
value 0 standing for the uncolored hole and colors running 1..domain.

Each event knows, for every pivot variable it contains, a free block of
fixed size (the variables erased when the event fires, pivot included) and
an upper bound on the number of violating completions of that block once the
remaining variables are fixed.  Those per-pivot blocks plus two fixed orders
-- events sorted by index within each (variable, erasure-size) bucket, and
violating completions sorted lexicographically over the free block -- are
exactly what makes the run register decodable.

Two event flavors cover the package:

* PairEvent: two disjoint variable groups must not realize equal per-color
  count vectors after adding a fixed sparse offset.  Both the total-coloring
  and extension instances reduce to this (the offset absorbs already-colored
  points); the free block for a pivot is the pivot plus the smallest-id
  other variables of the pivot's group, and the completion bound is l!.
* TableEvent: an explicit list of violating assignments over the event's
  variables, with optional custom free blocks; completion bounds are
  computed exactly from the table.
"""
from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from math import factorial

from ..errors import InstanceError

__all__ = ["PairEvent", "TableEvent", "ProblemInstance", "InstanceMeta",
           "detect_violations"]

HOLE = 0


def _is_sorted_unique(seq) -> bool:
    return all(seq[i] < seq[i + 1] for i in range(len(seq) - 1))


@dataclass(frozen=True)
class PairEvent:
    lines: tuple[int, int]            # owning line ids, for diagnostics
    side_a: tuple[int, ...]           # ascending variable ids
    side_b: tuple[int, ...]           # ascending, disjoint from side_a
    delta: tuple[tuple[int, int], ...]  # sparse (color, required countA-countB)
    free_count: int
    max_extensions: int = field(default=0)

    def __post_init__(self):
        if self.max_extensions == 0:
            object.__setattr__(self, "max_extensions", factorial(self.free_count))

    @property
    def vbl(self) -> tuple[int, ...]:
        return tuple(sorted(self.side_a + self.side_b))

    def validate(self, domains) -> None:
        if not self.side_a and not self.side_b:
            raise InstanceError("pair event with no variables")
        if not (_is_sorted_unique(self.side_a) and _is_sorted_unique(self.side_b)):
            raise InstanceError("pair event sides must be strictly ascending")
        if set(self.side_a) & set(self.side_b):
            raise InstanceError("pair event sides overlap")
        # pivots live on their own side, so every nonempty side must fit a block
        capacity = min(len(s) for s in (self.side_a, self.side_b) if s)
        if not 2 <= self.free_count <= capacity:
            raise InstanceError(
                f"free block {self.free_count} outside [2, {capacity}]")
        if self.free_count > 20:
            raise InstanceError("free blocks above 20 overflow the completion counters")
        for v in self.vbl:
            if not 0 <= v < len(domains):
                raise InstanceError(f"variable {v} out of range")
        d_max = max(domains)
        for color, _ in self.delta:
            if not 1 <= color <= d_max:
                raise InstanceError(f"offset color {color} outside [1, {d_max}]")

    def is_fully_assigned(self, values) -> bool:
        return all(values[v] != HOLE for v in self.side_a) and \
            all(values[v] != HOLE for v in self.side_b)

    def violated(self, values) -> bool:
        """Equal count vectors after the offset; callers ensure full assignment."""
        if not self.delta:
            return (sorted(values[v] for v in self.side_a)
                    == sorted(values[v] for v in self.side_b))
        balance: dict[int, int] = {}
        for v in self.side_a:
            balance[values[v]] = balance.get(values[v], 0) + 1
        for v in self.side_b:
            balance[values[v]] = balance.get(values[v], 0) - 1
        for color, need in self.delta:
            balance[color] = balance.get(color, 0) - need
        return all(x == 0 for x in balance.values())

    def _side_of(self, pivot):
        if pivot in self.side_a:
            return self.side_a
        if pivot in self.side_b:
            return self.side_b
        raise InstanceError(f"variable {pivot} not in event")

    def free_set(self, pivot: int) -> tuple[int, ...]:
        """Pivot plus the smallest-id other variables of the pivot's group."""
        side = self._side_of(pivot)
        l = self.free_count
        pos = bisect_left(side, pivot)
        if pos < l:
            return side[:l]
        return side[:l - 1] + (pivot,)

    def required_multiset(self, pivot: int, values) -> dict[int, int] | None:
        """Color multiset the free block must realize for the event to fire,
        given the values of all other event variables.  None if impossible."""
        free = set(self.free_set(pivot))
        pivot_in_a = pivot in set(self.side_a)
        need: dict[int, int] = {}
        sign = 1 if pivot_in_a else -1
        for color, dv in self.delta:
            need[color] = need.get(color, 0) + sign * dv
        other = self.side_b if pivot_in_a else self.side_a
        own = self.side_a if pivot_in_a else self.side_b
        for v in other:
            need[values[v]] = need.get(values[v], 0) + 1
        for v in own:
            if v not in free:
                need[values[v]] = need.get(values[v], 0) - 1
        need = {c: k for c, k in need.items() if k != 0}
        if any(k < 0 for k in need.values()) or sum(need.values()) != self.free_count:
            return None
        if any(c < 1 for c in need):
            return None
        return need

    def violating_extensions(self, pivot: int, values) -> list[tuple[int, ...]]:
        """All violating completions of the free block, ascending-var order,
        lexicographically sorted; at most free_count! of them."""
        need = self.required_multiset(pivot, values)
        if need is None:
            return []
        out: list[tuple[int, ...]] = []
        colors = sorted(need)
        counts = dict(need)
        prefix: list[int] = []

        def emit(remaining: int):
            if remaining == 0:
                out.append(tuple(prefix))
                return
            for c in colors:
                if counts[c]:
                    counts[c] -= 1
                    prefix.append(c)
                    emit(remaining - 1)
                    prefix.pop()
                    counts[c] += 1

        emit(self.free_count)
        return out


@dataclass(frozen=True)
class TableEvent:
    vbl: tuple[int, ...]                      # ascending variable ids
    violating: tuple[tuple[int, ...], ...]    # lex-sorted assignments over vbl
    free_sets: tuple[tuple[int, ...], ...] = ()  # parallel to vbl; default all-of-vbl
    free_count: int = 0
    max_extensions: int = 0

    def __post_init__(self):
        if not self.free_sets:
            object.__setattr__(self, "free_sets", tuple(self.vbl for _ in self.vbl))
        object.__setattr__(self, "violating", tuple(sorted(self.violating)))
        if self.free_count == 0 and self.free_sets:
            object.__setattr__(self, "free_count", len(self.free_sets[0]))
        if self.max_extensions == 0:
            object.__setattr__(self, "max_extensions", self._computed_max_extensions())

    def _computed_max_extensions(self) -> int:
        worst = 0
        for slot, _ in enumerate(self.vbl):
            free = set(self.free_sets[slot])
            groups: dict[tuple[int, ...], int] = {}
            for row in self.violating:
                key = tuple(c for v, c in zip(self.vbl, row) if v not in free)
                groups[key] = groups.get(key, 0) + 1
            if groups:
                worst = max(worst, max(groups.values()))
        return worst

    def validate(self, domains) -> None:
        if not self.vbl:
            raise InstanceError("event without variables")
        if not _is_sorted_unique(self.vbl):
            raise InstanceError("event variables must be strictly ascending")
        for v in self.vbl:
            if not 0 <= v < len(domains):
                raise InstanceError(f"variable {v} out of range")
        seen = set()
        for row in self.violating:
            if len(row) != len(self.vbl):
                raise InstanceError("violating row length mismatch")
            if row in seen:
                raise InstanceError("duplicate violating row")
            seen.add(row)
            for v, c in zip(self.vbl, row):
                if not 1 <= c <= domains[v]:
                    raise InstanceError(f"row value {c} outside domain of variable {v}")
        if len(self.free_sets) != len(self.vbl):
            raise InstanceError("one free block per pivot variable required")
        for slot, v in enumerate(self.vbl):
            fs = self.free_sets[slot]
            if v not in fs:
                raise InstanceError(f"free block of pivot {v} must contain it")
            if not set(fs) <= set(self.vbl):
                raise InstanceError("free block leaves the event")
            if not _is_sorted_unique(fs):
                raise InstanceError("free blocks must be strictly ascending")
            if len(fs) != self.free_count:
                raise InstanceError("free blocks must share one erasure size")
        if self.max_extensions < self._computed_max_extensions():
            raise InstanceError("declared completion bound below the actual count")

    def is_fully_assigned(self, values) -> bool:
        return all(values[v] != HOLE for v in self.vbl)

    def violated(self, values) -> bool:
        current = tuple(values[v] for v in self.vbl)
        return current in self.violating

    def free_set(self, pivot: int) -> tuple[int, ...]:
        slot = bisect_left(self.vbl, pivot)
        if slot >= len(self.vbl) or self.vbl[slot] != pivot:
            raise InstanceError(f"variable {pivot} not in event")
        return self.free_sets[slot]

    def violating_extensions(self, pivot: int, values) -> list[tuple[int, ...]]:
        """Completions of the free block consistent with the other variables'
        current values, projected to the free block, in table (lex) order."""
        free = self.free_set(pivot)
        free_set = set(free)
        out = []
        for row in self.violating:
            if all(values[v] == c for v, c in zip(self.vbl, row) if v not in free_set):
                out.append(tuple(c for v, c in zip(self.vbl, row) if v in free_set))
        return out


@dataclass(frozen=True)
class InstanceMeta:
    """How the instance was produced; enough to rebuild it for decoding."""

    mode: str                      # "full" | "extension" | "custom"
    order: int | None = None
    colors: int | None = None
    free_block: int | None = None
    caps: tuple[int, int] | None = None
    threshold: float | None = None
    point_ids: tuple[int, ...] | None = None  # variable -> plane point (extension mode)


class ProblemInstance:
    """Immutable bundle of variables, events and the fixed orders."""

    def __init__(self, domains, events, meta: InstanceMeta | None = None):
        self.domains = tuple(int(d) for d in domains)
        if any(d < 1 for d in self.domains):
            raise InstanceError("every variable needs a nonempty domain")
        self.events = tuple(events)
        self.meta = meta or InstanceMeta("custom")
        for ev in self.events:
            ev.validate(self.domains)

        per_var: list[list[int]] = [[] for _ in self.domains]
        for ei, ev in enumerate(self.events):
            for v in ev.vbl:
                per_var[v].append(ei)
        self.var_events = tuple(tuple(lst) for lst in per_var)

        # beta: 1-based rank of an event within its (variable, erasure-size)
        # bucket, events ascending by index
        self._beta: dict[tuple[int, int], int] = {}
        self._buckets: dict[tuple[int, int], list[int]] = {}
        for v, lst in enumerate(self.var_events):
            ranks: dict[int, int] = {}
            for ei in lst:
                l = self.events[ei].free_count
                ranks[l] = ranks.get(l, 0) + 1
                self._beta[(ei, v)] = ranks[l]
                self._buckets.setdefault((v, l), []).append(ei)

        self._compiled = None

    @property
    def n_vars(self) -> int:
        return len(self.domains)

    @property
    def n_events(self) -> int:
        return len(self.events)

    def beta(self, event_id: int, pivot: int) -> int:
        return self._beta[(event_id, pivot)]

    def bucket(self, pivot: int, l: int) -> tuple[int, ...]:
        return tuple(self._buckets.get((pivot, l), ()))

    def degree_per_size(self) -> dict[int, int]:
        """d_l: largest per-variable event count at each erasure size l."""
        out: dict[int, int] = {}
        for (_, l), lst in self._buckets.items():
            out[l] = max(out.get(l, 0), len(lst))
        return out

    def exponent_profile(self):
        """Profile consumed by bounds.color_bound: per l, (d_l, max bound m)."""
        from ..bounds import ExponentProfile
        d_l = self.degree_per_size()
        m_l: dict[int, int] = {}
        for ev in self.events:
            l = ev.free_count
            m_l[l] = max(m_l.get(l, 0), ev.max_extensions)
        return ExponentProfile({l: (d_l[l], m_l[l]) for l in d_l})

    def violated_events(self, values) -> list[int]:
        """Full scan: every fully-assigned violated event, ascending."""
        return [ei for ei, ev in enumerate(self.events)
                if ev.is_fully_assigned(values) and ev.violated(values)]

    def compiled(self):
        if self._compiled is None:
            from .engine import compile_instance
            self._compiled = compile_instance(self)
        return self._compiled


def detect_violations(instance: ProblemInstance, values, pivot: int) -> list[int]:
    """Events containing the pivot, fully assigned and violated, in the
    instance's fixed (ascending-index) order."""
    out = []
    for ei in instance.var_events[pivot]:
        ev = instance.events[ei]
        if ev.is_fully_assigned(values) and ev.violated(values):
            out.append(ei)
    return out
