"""Run loop driving the resampling kernels, and the run register.

The kernel executes the step rule: assign the lowest-id hole its next tape
value; if some event over fully-assigned variables fires, erase the free
block of the lowest-indexed firing event and log the step as (alpha, beta,
gamma) -- erasure size, event position in the pivot's bucket, and the rank of
the erased values among the event's violating completions.  Steps that fire
nothing leave the register entry empty.  The register plus the final
configuration determine the whole run (see decode), which is what bounds the
search: a run that wrote many entries has compressed too much randomness.

Two interchangeable kernels exist: a compiled Cython extension and a pure
Python twin.  Both consume the splitmix64 tape identically, so registers are
bit-for-bit equal across backends; selection happens at import, the
LEGICOLOR_PURE environment variable forces the fallback.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from math import factorial
from pathlib import Path

import numpy as np

from ..errors import InstanceError
from ..rng import MASK64
from .events import ProblemInstance

__all__ = ["RunRegister", "Success", "Exhausted", "run", "backend_name",
           "compile_instance", "CompiledInstance", "available_backends"]

_CHUNK = 1 << 15


def _load_backend():
    if not os.environ.get("LEGICOLOR_PURE"):
        try:
            from . import _kernel
            return _kernel, "compiled"
        except ImportError:
            pass
    from . import _kernel_py
    return _kernel_py, "python"


_BACKEND, _BACKEND_NAME = _load_backend()


def backend_name() -> str:
    return _BACKEND_NAME


def available_backends() -> dict[str, object]:
    out = {}
    try:
        from . import _kernel
        out["compiled"] = _kernel
    except ImportError:
        pass
    from . import _kernel_py
    out["python"] = _kernel_py
    return out


@dataclass
class CompiledInstance:
    """Array form of a ProblemInstance shared by both kernels."""

    n_vars: int
    n_events: int
    domains: np.ndarray      # int32[n_vars]
    var_ptr: np.ndarray      # int64[n_vars+1]
    var_events: np.ndarray   # int32
    ev_kind: np.ndarray      # int8: 0 pair, 1 table
    ev_l: np.ndarray         # int32
    ev_size: np.ndarray      # int32: |vbl|
    ev_ptr: np.ndarray       # int64[n_events+1]
    ev_vars: np.ndarray      # int32, ascending within an event
    ev_beta: np.ndarray      # int32, parallel to ev_vars
    pa_ptr: np.ndarray
    pa_vars: np.ndarray
    pb_ptr: np.ndarray
    pb_vars: np.ndarray
    dl_ptr: np.ndarray
    dl_color: np.ndarray
    dl_val: np.ndarray
    tb_ptr: np.ndarray       # int64: offset of each event's row block in tb_vals
    tb_rows: np.ndarray      # int32: row count
    tb_vals: np.ndarray      # int32, row-major, row width = ev_size
    fs_ptr: np.ndarray       # int64 parallel to ev_vars slots
    fs_vars: np.ndarray      # int32
    d_max: int
    max_l: int
    max_touched: int
    fact: np.ndarray         # int64[21]


def _csr(seqs, dtype=np.int32):
    ptr = np.zeros(len(seqs) + 1, dtype=np.int64)
    for i, s in enumerate(seqs):
        ptr[i + 1] = ptr[i] + len(s)
    flat = np.fromiter((x for s in seqs for x in s), dtype=dtype, count=int(ptr[-1]))
    return ptr, flat


def compile_instance(inst: ProblemInstance) -> CompiledInstance:
    from .events import PairEvent, TableEvent

    var_ptr, var_events = _csr(inst.var_events)
    ev_vbl = [ev.vbl for ev in inst.events]
    ev_ptr, ev_vars = _csr(ev_vbl)
    ev_beta = np.fromiter(
        (inst.beta(ei, v) for ei, vbl in enumerate(ev_vbl) for v in vbl),
        dtype=np.int32, count=len(ev_vars))

    pa, pb, dl, tuples, free_sets = [], [], [], [], []
    kinds, ls, sizes, rows = [], [], [], []
    for ev in inst.events:
        ls.append(ev.free_count)
        sizes.append(len(ev.vbl))
        if isinstance(ev, PairEvent):
            kinds.append(0)
            pa.append(ev.side_a)
            pb.append(ev.side_b)
            dl.append(ev.delta)
            tuples.append(())
            rows.append(0)
            free_sets.extend(() for _ in ev.vbl)
        elif isinstance(ev, TableEvent):
            kinds.append(1)
            pa.append(())
            pb.append(())
            dl.append(())
            tuples.append(tuple(x for row in ev.violating for x in row))
            rows.append(len(ev.violating))
            free_sets.extend(ev.free_sets)
        else:
            raise InstanceError(f"unknown event type {type(ev).__name__}")

    pa_ptr, pa_vars = _csr(pa)
    pb_ptr, pb_vars = _csr(pb)
    dl_ptr, _ = _csr([[c for c, _ in d] for d in dl])
    dl_color = np.fromiter((c for d in dl for c, _ in d), dtype=np.int32,
                           count=int(dl_ptr[-1]))
    dl_val = np.fromiter((v for d in dl for _, v in d), dtype=np.int32,
                         count=int(dl_ptr[-1]))
    tb_ptr, tb_vals = _csr(tuples)
    fs_ptr, fs_vars = _csr(free_sets)

    fact = np.ones(21, dtype=np.int64)
    for i in range(1, 21):
        fact[i] = fact[i - 1] * i

    max_l = max(ls, default=1)
    max_delta = max((len(d) for d in dl), default=0)
    return CompiledInstance(
        n_vars=inst.n_vars, n_events=inst.n_events,
        domains=np.asarray(inst.domains, dtype=np.int32),
        var_ptr=var_ptr, var_events=var_events,
        ev_kind=np.asarray(kinds, dtype=np.int8),
        ev_l=np.asarray(ls, dtype=np.int32),
        ev_size=np.asarray(sizes, dtype=np.int32),
        ev_ptr=ev_ptr, ev_vars=ev_vars, ev_beta=ev_beta,
        pa_ptr=pa_ptr, pa_vars=pa_vars, pb_ptr=pb_ptr, pb_vars=pb_vars,
        dl_ptr=dl_ptr, dl_color=dl_color, dl_val=dl_val,
        tb_ptr=tb_ptr, tb_rows=np.asarray(rows, dtype=np.int32), tb_vals=tb_vals,
        fs_ptr=fs_ptr, fs_vars=fs_vars,
        d_max=int(max(inst.domains)), max_l=max_l,
        max_touched=max(sizes, default=1) + max_delta,
        fact=fact,
    )


class RunRegister:
    """Complete per-step log of one run: pivot, tape value, and for firing
    steps the (alpha, beta, gamma) record plus the event id; final
    configuration attached.  Arrays make bit-equality checks trivial."""

    __slots__ = ("vars", "tape", "alpha", "beta", "gamma", "event",
                 "final", "seed", "meta")

    def __init__(self, vars_, tape, alpha, beta, gamma, event, final, seed, meta=None):
        self.vars = np.asarray(vars_, dtype=np.int32)
        self.tape = np.asarray(tape, dtype=np.int32)
        self.alpha = np.asarray(alpha, dtype=np.int32)
        self.beta = np.asarray(beta, dtype=np.int32)
        self.gamma = np.asarray(gamma, dtype=np.int64)
        self.event = np.asarray(event, dtype=np.int32)
        self.final = np.asarray(final, dtype=np.int32)
        self.seed = seed
        self.meta = dict(meta or {})

    @property
    def n_steps(self) -> int:
        return len(self.vars)

    @property
    def n_resamples(self) -> int:
        return int(np.count_nonzero(self.alpha))

    def tapes(self) -> dict[int, list[int]]:
        """Per-variable sample vectors, in consumption order."""
        out: dict[int, list[int]] = {}
        for v, t in zip(self.vars.tolist(), self.tape.tolist()):
            out.setdefault(v, []).append(t)
        return out

    def __eq__(self, other):
        return (isinstance(other, RunRegister)
                and all(np.array_equal(getattr(self, f), getattr(other, f))
                        for f in ("vars", "tape", "alpha", "beta", "gamma",
                                  "event", "final")))

    def to_jsonl(self, destination) -> None:
        """Header line with the run metadata, then one record per step."""
        header = {"format": "legicolor-register", "version": 1,
                  "seed": self.seed, "steps": self.n_steps, **self.meta}
        lines = [json.dumps(header)]
        for i in range(self.n_steps):
            rec = {"step": i + 1, "var": int(self.vars[i]), "tapeValue": int(self.tape[i])}
            if self.alpha[i]:
                rec.update(alpha=int(self.alpha[i]), beta=int(self.beta[i]),
                           gamma=int(self.gamma[i]), event=int(self.event[i]))
            lines.append(json.dumps(rec))
        text = "\n".join(lines) + "\n"
        if hasattr(destination, "write"):
            destination.write(text)
        else:
            Path(destination).write_text(text, encoding="utf-8")

    @classmethod
    def from_jsonl(cls, source, final) -> "RunRegister":
        text = source.read() if hasattr(source, "read") else Path(source).read_text(encoding="utf-8")
        lines = [json.loads(x) for x in text.splitlines() if x.strip()]
        if not lines or lines[0].get("format") != "legicolor-register":
            raise ValueError("not a register file (missing header line)")
        header, records = lines[0], lines[1:]
        n = len(records)
        vars_ = np.zeros(n, dtype=np.int32)
        tape = np.zeros(n, dtype=np.int32)
        alpha = np.zeros(n, dtype=np.int32)
        beta = np.zeros(n, dtype=np.int32)
        gamma = np.zeros(n, dtype=np.int64)
        event = np.full(n, -1, dtype=np.int32)
        for i, rec in enumerate(records):
            if rec.get("step") != i + 1:
                raise ValueError(f"register line {i + 2}: expected step {i + 1}")
            vars_[i] = rec["var"]
            tape[i] = rec["tapeValue"]
            if "alpha" in rec:
                alpha[i] = rec["alpha"]
                beta[i] = rec["beta"]
                gamma[i] = rec["gamma"]
                event[i] = rec.get("event", -1)
        meta = {k: v for k, v in header.items()
                if k not in ("format", "version", "seed", "steps")}
        return cls(vars_, tape, alpha, beta, gamma, event, final,
                   header.get("seed"), meta)


@dataclass(frozen=True)
class Success:
    assignment: tuple[int, ...]      # total, colors 1..d
    register: RunRegister


@dataclass(frozen=True)
class Exhausted:
    assignment: tuple[int | None, ...]  # None marks holes at stop time
    register: RunRegister


def run(instance: ProblemInstance, seed: int, max_steps: int = 10 ** 7,
        backend: str | None = None):
    """Execute the resampling search; Success or Exhausted, never raises for
    a well-formed instance.

    A Success assignment is re-checked against every event via the object
    layer before returning (the kernel's bookkeeping is not trusted).
    Identical (instance, seed, max_steps) yield bit-identical registers.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    if instance.n_vars == 0:
        empty = np.zeros(0, dtype=np.int32)
        meta = _register_meta(instance, max_steps)
        meta["outcome"] = "success"
        register = RunRegister(empty, empty, empty, empty, empty, empty,
                               empty, seed, meta)
        return Success((), register)
    kernel = _BACKEND if backend is None else available_backends()[backend]
    ci = instance.compiled()

    values = np.zeros(ci.n_vars, dtype=np.int32)
    ev_assigned = np.zeros(max(1, ci.n_events), dtype=np.int32)
    scan_from, uncolored = 0, ci.n_vars
    rng_state = seed & MASK64

    bufs = tuple(np.zeros(_CHUNK, dtype=np.int64 if i == 4 else np.int32)
                 for i in range(6))
    chunks: list[tuple[np.ndarray, ...]] = []
    done = 0
    status = 0
    while done < max_steps and status == 0:
        limit = min(_CHUNK, max_steps - done)
        status, steps, scan_from, uncolored, rng_state = kernel.run_chunk(
            ci, values, ev_assigned, scan_from, uncolored, rng_state, bufs, limit)
        chunks.append(tuple(b[:steps].copy() for b in bufs))
        done += steps

    def cat(i):
        return np.concatenate([c[i] for c in chunks]) if chunks else np.zeros(0, dtype=np.int32)

    meta = _register_meta(instance, max_steps)
    meta["outcome"] = "success" if status == 1 else "exhausted"
    register = RunRegister(cat(0), cat(1), cat(2), cat(3), cat(4), cat(5),
                           values.copy(), seed, meta)

    if status == 1:
        leftovers = instance.violated_events(values)
        if leftovers or uncolored != 0:
            raise InstanceError(
                f"kernel reported success but verification found violated "
                f"events {leftovers[:5]} / {uncolored} holes")
        return Success(tuple(int(v) for v in values), register)
    holes = tuple(None if v == 0 else int(v) for v in values)
    return Exhausted(holes, register)


def _register_meta(instance: ProblemInstance, max_steps: int) -> dict:
    meta = {"mode": instance.meta.mode, "maxSteps": max_steps,
            "variables": instance.n_vars}
    if instance.meta.order is not None:
        meta["order"] = instance.meta.order
    if instance.meta.colors is not None:
        meta["colors"] = instance.meta.colors
    if instance.meta.free_block is not None:
        meta["freeBlock"] = instance.meta.free_block
    if instance.meta.caps is not None:
        meta["caps"] = list(instance.meta.caps)
    if instance.meta.threshold is not None:
        meta["threshold"] = instance.meta.threshold
    return meta
