#!/usr/bin/env python3
"""Compare the compiled and pure-Python resampling kernels.

Two workloads bracket the kernel's behavior: an infeasible instance that
fires an event every few steps (erase-heavy), and a comfortable instance
solved over and over (assign-heavy).  Registers are checked for bit equality
between backends before timing.

Usage: python benchmarks/bench_backends.py [--steps N] [--repeats R]
"""
import argparse
import time

from legicolor.gf import gf_build
from legicolor.plane import build_pg2
from legicolor.solver import available_backends, build_full_problem, run


def time_exhaust(inst, backend, steps):
    t0 = time.perf_counter()
    out = run(inst, seed=7, max_steps=steps, backend=backend)
    dt = time.perf_counter() - t0
    return out.register.n_steps / dt, out.register


def time_successes(inst, backend, repeats):
    t0 = time.perf_counter()
    total = 0
    for seed in range(1, repeats + 1):
        out = run(inst, seed=seed, max_steps=10 ** 6, backend=backend)
        total += out.register.n_steps
    dt = time.perf_counter() - t0
    return total / dt, repeats / dt


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=300_000,
                    help="budget for the erase-heavy workload")
    ap.add_argument("--repeats", type=int, default=40,
                    help="solves for the assign-heavy workload")
    args = ap.parse_args()

    backends = sorted(available_backends())
    print(f"backends available: {', '.join(backends)}\n")

    fano2 = build_full_problem(build_pg2(gf_build(2, 1)), d=2, m=2)
    pg9 = build_full_problem(build_pg2(gf_build(3, 2)), d=15, m=3)

    regs = {}
    rates = {}
    for backend in backends:
        rate, reg = time_exhaust(fano2, backend, args.steps)
        regs[backend] = reg
        rates[backend] = rate
    if len(backends) == 2:
        match = regs[backends[0]] == regs[backends[1]]
        print(f"register parity over {args.steps} steps: {'OK' if match else 'MISMATCH'}")
        if not match:
            raise SystemExit(1)

    print(f"\nerase-heavy: order-2 plane, 2 colors, {args.steps} steps")
    for backend in backends:
        print(f"  {backend:>8}: {rates[backend] / 1e6:7.2f} M steps/s")
    if len(backends) == 2:
        print(f"  speedup: {rates['compiled'] / rates['python']:.1f}x")

    print(f"\nassign-heavy: order-9 plane, 15 colors, {args.repeats} solves")
    rates2 = {}
    for backend in backends:
        sps, solves = time_successes(pg9, backend, args.repeats)
        rates2[backend] = sps
        print(f"  {backend:>8}: {sps / 1e3:7.1f} k steps/s ({solves:.0f} solves/s)")
    if len(backends) == 2:
        print(f"  speedup: {rates2['compiled'] / rates2['python']:.1f}x")


if __name__ == "__main__":
    main()
