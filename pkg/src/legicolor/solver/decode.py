"""Reconstruct a full run from its register and final configuration.

Nothing here reads the recorded tape values: the (alpha, beta, gamma)
entries plus the final configuration determine which variable was touched at
every step and which color it received, which is the whole point of logging
them.  The forward pass rebuilds the uncolored sets (and thereby each step's
pivot) from the entries alone; the backward pass then peels the final
configuration step by step, using gamma to look up the erased values among
the event's lexicographically ordered violating completions.

Callers prove losslessness by comparing the decoded color sequence with the
register's recorded tape, bit for bit.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from ..errors import DecodeError
from .engine import RunRegister
from .events import ProblemInstance

__all__ = ["DecodedStep", "DecodedRun", "decode", "uncolored_sets"]


@dataclass(frozen=True)
class DecodedStep:
    step: int                       # 1-based
    var: int
    color: int
    event: int | None
    freed: tuple[int, ...] | None


@dataclass(frozen=True)
class DecodedRun:
    steps: tuple[DecodedStep, ...]

    @property
    def color_sequence(self) -> np.ndarray:
        return np.asarray([s.color for s in self.steps], dtype=np.int32)

    @property
    def pivot_sequence(self) -> np.ndarray:
        return np.asarray([s.var for s in self.steps], dtype=np.int32)

    def tapes(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for s in self.steps:
            out.setdefault(s.var, []).append(s.color)
        return out


def _forward_structure(instance: ProblemInstance, register: RunRegister):
    """Pivot, event and free block of every step, from the entries alone."""
    n = instance.n_vars
    in_x = [True] * n
    heap = list(range(n))
    structure = []
    for i in range(register.n_steps):
        step = i + 1
        while heap and not in_x[heap[0]]:
            heapq.heappop(heap)
        if not heap:
            raise DecodeError(step, "no uncolored variable remains")
        j = heap[0]
        alpha = int(register.alpha[i])
        if alpha == 0:
            in_x[j] = False
            heapq.heappop(heap)
            structure.append((j, None, None))
            continue
        bucket = instance.bucket(j, alpha)
        beta = int(register.beta[i])
        if not 1 <= beta <= len(bucket):
            raise DecodeError(
                step, f"beta {beta} outside the ({j}, {alpha}) bucket of size {len(bucket)}")
        y = bucket[beta - 1]
        recorded = int(register.event[i])
        if recorded >= 0 and recorded != y:
            raise DecodeError(step, f"entry decodes to event {y}, file says {recorded}")
        ev = instance.events[y]
        if ev.free_count != alpha:
            raise DecodeError(step, f"alpha {alpha} but event {y} erases {ev.free_count}")
        free = ev.free_set(j)
        for v in free:
            if not in_x[v]:
                in_x[v] = True
                heapq.heappush(heap, v)
        structure.append((j, y, free))
    return structure


def uncolored_sets(instance: ProblemInstance, register: RunRegister) -> list[frozenset[int]]:
    """The uncolored set after each step, reconstructed from entries alone."""
    x = set(range(instance.n_vars))
    out = []
    for (j, _, free) in _forward_structure(instance, register):
        if free is None:
            x.discard(j)
        else:
            x.update(free)
        out.append(frozenset(x))
    return out


def decode(instance: ProblemInstance, register: RunRegister) -> DecodedRun:
    """Full history recovery; raises DecodeError on any inconsistency."""
    structure = _forward_structure(instance, register)
    values = [int(v) for v in register.final]
    if len(values) != instance.n_vars:
        raise DecodeError(0, "final configuration length mismatch")
    colors = [0] * len(structure)

    for i in range(len(structure) - 1, -1, -1):
        step = i + 1
        j, y, free = structure[i]
        if y is None:
            c = values[j]
            if c == 0:
                raise DecodeError(step, f"variable {j} should be colored at this point")
            colors[i] = c
            values[j] = 0
            continue
        ev = instance.events[y]
        for v in free:
            if values[v] != 0:
                raise DecodeError(step, f"freed variable {v} is colored after the step")
        for v in ev.vbl:
            if v not in free and values[v] == 0:
                raise DecodeError(step, f"fixed variable {v} lost its color")
        completions = ev.violating_extensions(j, values)
        gamma = int(register.gamma[i])
        if not 1 <= gamma <= len(completions):
            raise DecodeError(
                step, f"gamma {gamma} outside the {len(completions)} consistent completions")
        if gamma > ev.max_extensions:
            raise DecodeError(step, f"gamma {gamma} above the event bound {ev.max_extensions}")
        erased = completions[gamma - 1]
        for v, c in zip(free, erased):
            values[v] = c
        colors[i] = erased[free.index(j)]
        values[j] = 0

    if any(values):
        raise DecodeError(1, "initial configuration does not rewind to all-uncolored")

    steps = tuple(
        DecodedStep(i + 1, j, colors[i], y, free)
        for i, (j, y, free) in enumerate(structure))
    return DecodedRun(steps)
