"""Command-line interface.

Subcommands: plane gen|validate, color sample|verify, solve full|extend,
bounds, region, decode.  Every command prints a one-object JSON summary on
stdout and uses exit codes 0 (success), 1 (domain failure: exhausted search,
infeasible region, invalid plane, failed verification) and 2 (usage errors).
All randomness flows from the --seed flag through splitmix64; repeated runs
with the same flags produce byte-identical artifact files.  Formats and the
summary schema are documented in docs/cli.md.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time

from . import bounds as bounds_mod
from . import coloring as col
from . import feasibility as feas
from .errors import LegicolorError
from .gf import factor_prime_power, gf_build
from .plane import build_pg2, load_plane, save_plane, validate_plane
from .rng import SplitMix64
from . import solver

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


def _emit(summary: dict) -> None:
    print(json.dumps(summary))


def _plane_from_file(path, require_valid=True):
    plane = load_plane(path)
    if require_valid and plane.validation is not None and not plane.validation.passed:
        raise LegicolorError(f"invalid plane: {plane.validation.summary()}")
    return plane


# -- plane ---------------------------------------------------------------

def _cmd_plane_gen(args) -> int:
    t0 = time.perf_counter()
    p, k = factor_prime_power(args.q)
    fld = gf_build(p, k, max_order=args.max_order)
    plane = build_pg2(fld)
    report = validate_plane(plane)
    if not report.passed:
        raise LegicolorError(f"constructed plane failed validation: {report.summary()}")
    save_plane(plane, args.output)
    _emit({"command": "plane gen", "q": args.q, "points": plane.n_points,
           "lines": plane.n_lines, "output": args.output,
           "wallTimeSec": round(time.perf_counter() - t0, 6)})
    return EXIT_OK


def _cmd_plane_validate(args) -> int:
    t0 = time.perf_counter()
    plane = load_plane(args.plane)
    report = plane.validation
    _emit({"command": "plane validate", "plane": args.plane,
           "passed": report.passed,
           "violations": [
               {"axiom": i.axiom, "ids": list(i.ids), "detail": i.detail}
               for i in report.issues[:50]],
           "violationCount": len(report.issues),
           "wallTimeSec": round(time.perf_counter() - t0, 6)})
    return EXIT_OK if report.passed else EXIT_DOMAIN


# -- color ---------------------------------------------------------------

def _cmd_color_sample(args) -> int:
    t0 = time.perf_counter()
    plane = _plane_from_file(args.plane)
    rng = SplitMix64(args.seed)
    reserve = None
    if not args.total:
        reserve = col.sample_reserve(plane, rng, args.inclusion_prob, args.max_attempts)
        if args.reserve_out:
            col.save_reserve(reserve, args.reserve_out)
    partial = col.sample_partial(plane, reserve, args.colors, rng)
    col.save_coloring(partial, args.output)
    summary = {"command": "color sample", "seed": args.seed, "colors": args.colors,
               "output": args.output,
               "uncolored": len(partial.uncolored),
               "wallTimeSec": round(time.perf_counter() - t0, 6)}
    if reserve is not None:
        summary["reserveSize"] = len(reserve.members)
        summary["reserveSizeCap"] = round(reserve.size_cap, 3)
        summary["reserveOut"] = args.reserve_out
    _emit(summary)
    return EXIT_OK


def _cmd_color_verify(args) -> int:
    t0 = time.perf_counter()
    plane = _plane_from_file(args.plane)
    coloring = col.load_coloring(args.coloring)
    summary = {"command": "color verify", "plane": args.plane, "coloring": args.coloring}
    if args.dangerous:
        dangerous = col.find_dangerous_pairs(plane, coloring, args.threshold)
        summary["dangerousPairs"] = len(dangerous)
        summary["legitimate"] = None
        code = EXIT_OK
    else:
        bad = col.find_bad_pairs(plane, coloring)
        summary["badPairs"] = len(bad)
        summary["firstBadPairs"] = [list(p) for p in bad[:10]]
        summary["legitimate"] = not bad
        code = EXIT_OK if not bad else EXIT_DOMAIN
    summary["wallTimeSec"] = round(time.perf_counter() - t0, 6)
    _emit(summary)
    return code


# -- solve ---------------------------------------------------------------

def _solve_summary(command, args, result, t0):
    reg = result.register
    return {
        "command": command, "seed": args.seed, "colors": args.colors,
        "freeBlock": result.instance.meta.free_block,
        "steps": reg.n_steps, "violations": reg.n_resamples,
        "outcome": "success" if result.succeeded else "exhausted",
        "verified": bool(result.verified) if result.succeeded else None,
        "backend": solver.backend_name(),
        "wallTimeSec": round(time.perf_counter() - t0, 6),
    }


def _finish_solve(command, args, plane, result, t0) -> int:
    summary = _solve_summary(command, args, result, t0)
    if args.output:
        col.save_coloring(result.coloring, args.output)
        summary["output"] = args.output
    if args.register:
        result.register.to_jsonl(args.register)
        summary["register"] = args.register
    if result.succeeded and not result.verified:
        summary["badPairs"] = [list(p) for p in result.bad_pairs[:10]]
        summary["error"] = "solver succeeded but verification found bad pairs"
        _emit(summary)
        return EXIT_DOMAIN
    _emit(summary)
    return EXIT_OK if result.succeeded else EXIT_DOMAIN


def _cmd_solve_full(args) -> int:
    t0 = time.perf_counter()
    plane = _plane_from_file(args.plane)
    result = solver.solve_full(plane, args.colors, args.seed, args.m, args.max_steps)
    return _finish_solve("solve full", args, plane, result, t0)


def _cmd_solve_extend(args) -> int:
    t0 = time.perf_counter()
    plane = _plane_from_file(args.plane)
    reserve = col.load_reserve(plane, args.reserve)
    partial = col.load_coloring(args.base)
    result = solver.solve_extension(
        plane, reserve, partial, args.colors, args.seed, args.m,
        args.a, args.b, args.threshold, args.max_steps)
    return _finish_solve("solve extend", args, plane, result, t0)


# -- bounds / region -----------------------------------------------------

def _cmd_bounds(args) -> int:
    best = bounds_mod.optimal_m(args.a, args.b, args.m_max)
    profile = bounds_mod.ExponentProfile(
        {best.m: (args.a * args.b, math.factorial(best.m))})
    res = bounds_mod.color_bound(profile)
    _emit({"command": "bounds", "a": args.a, "b": args.b,
           "tau": res.tau, "gamma": res.gamma, "colors": res.colors,
           "m_opt": best.m, "value": best.value})
    return EXIT_OK


def _cmd_region(args) -> int:
    t0 = time.perf_counter()
    rows = feas.region_table(
        args.d_min, args.d_max,
        a_range=(1, args.a_max), b_range=(4, args.b_max),
        m_range=(2, args.m_max), tol=args.tol)
    feas.write_region_csv(rows, args.output)
    summary = {"command": "region", "dMin": args.d_min, "dMax": args.d_max,
               "rows": len(rows),
               "feasibleRows": sum(1 for r in rows if r.log10_n_min is not None),
               "output": args.output,
               "wallTimeSec": round(time.perf_counter() - t0, 6)}
    if args.svg:
        feas.write_region_svg(rows, args.svg)
        summary["svg"] = args.svg
    _emit(summary)
    return EXIT_OK if summary["feasibleRows"] else EXIT_DOMAIN


# -- decode --------------------------------------------------------------

def _rebuild_instance(args, plane, final, meta):
    mode = meta.get("mode")
    colors = int(meta.get("colors", final.d))
    m = int(meta["freeBlock"])
    if mode == "full":
        return solver.build_full_problem(plane, colors, m)
    if mode == "extension":
        if not args.reserve or not args.base:
            raise LegicolorError("extension registers need --reserve and --base")
        reserve = col.load_reserve(plane, args.reserve)
        base = col.load_coloring(args.base)
        caps = meta.get("caps") or [1, 4]
        return solver.build_extension_problem(
            plane, reserve, base, colors, m, caps[0], caps[1], meta.get("threshold"))
    raise LegicolorError(f"cannot rebuild instance for mode {mode!r}")


def _cmd_decode(args) -> int:
    t0 = time.perf_counter()
    plane = _plane_from_file(args.plane)
    final = col.load_coloring(args.final)
    if len(final.colors) != plane.n_points:
        raise LegicolorError("final coloring does not match the plane size")

    import numpy as np
    header = json.loads(open(args.register, encoding="utf-8").readline())
    if header.get("format") != "legicolor-register":
        raise LegicolorError("register file lacks the header line")
    if header.get("mode") == "extension":
        instance = _rebuild_instance(args, plane, final, header)
        points = instance.meta.point_ids
        final_vals = np.array(
            [final.colors[p] if final.colors[p] else 0 for p in points], dtype=np.int32)
    else:
        instance = _rebuild_instance(args, plane, final, header)
        final_vals = np.array([c if c else 0 for c in final.colors], dtype=np.int32)
    register = solver.RunRegister.from_jsonl(args.register, final_vals)

    decoded = solver.decode(instance, register)
    tape_match = bool(np.array_equal(decoded.color_sequence, register.tape))
    pivot_match = bool(np.array_equal(decoded.pivot_sequence, register.vars))
    _emit({"command": "decode", "register": args.register,
           "steps": register.n_steps, "violations": register.n_resamples,
           "colorsMatchTape": tape_match, "pivotsMatchLog": pivot_match,
           "wallTimeSec": round(time.perf_counter() - t0, 6)})
    return EXIT_OK if tape_match and pivot_match else EXIT_DOMAIN


# -- parser ----------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="legicolor", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    plane_p = sub.add_parser("plane", help="plane construction and validation")
    plane_sub = plane_p.add_subparsers(dest="subcommand", required=True)
    g = plane_sub.add_parser("gen", help="construct PG(2,q) and write it as JSON")
    g.add_argument("--q", type=int, required=True, help="prime power order")
    g.add_argument("--max-order", type=int, default=1 << 16)
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=_cmd_plane_gen)
    v = plane_sub.add_parser("validate", help="audit the plane axioms of a file")
    v.add_argument("plane")
    v.set_defaults(func=_cmd_plane_validate)

    color_p = sub.add_parser("color", help="sample and verify colorings")
    color_sub = color_p.add_subparsers(dest="subcommand", required=True)
    s = color_sub.add_parser("sample", help="sample a reserve set and partial coloring")
    s.add_argument("--plane", required=True)
    s.add_argument("--colors", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--inclusion-prob", type=float, default=None)
    s.add_argument("--max-attempts", type=int, default=1000)
    s.add_argument("--total", action="store_true",
                   help="skip the reserve set; color every point")
    s.add_argument("--reserve-out", default=None)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=_cmd_color_sample)
    c = color_sub.add_parser("verify", help="check a coloring for bad pairs")
    c.add_argument("--plane", required=True)
    c.add_argument("--coloring", required=True)
    c.add_argument("--dangerous", action="store_true",
                   help="count dangerous pairs of a partial coloring instead")
    c.add_argument("--threshold", type=float, default=None)
    c.set_defaults(func=_cmd_color_verify)

    solve_p = sub.add_parser("solve", help="run the resampling search")
    solve_sub = solve_p.add_subparsers(dest="subcommand", required=True)
    f = solve_sub.add_parser("full", help="search for a legitimate total coloring")
    f.add_argument("--plane", required=True)
    f.add_argument("--colors", type=int, required=True)
    f.add_argument("--seed", type=int, required=True)
    f.add_argument("--m", type=int, default=None, help="free-block size")
    f.add_argument("--max-steps", type=int, default=10 ** 7)
    f.add_argument("-o", "--output", default=None)
    f.add_argument("--register", default=None, help="write the run register (JSONL)")
    f.set_defaults(func=_cmd_solve_full)
    e = solve_sub.add_parser("extend", help="extend a partial coloring over its reserve")
    e.add_argument("--plane", required=True)
    e.add_argument("--base", required=True, help="partial coloring JSON")
    e.add_argument("--reserve", required=True, help="reserve set JSON")
    e.add_argument("--colors", type=int, required=True)
    e.add_argument("--seed", type=int, required=True)
    e.add_argument("--a", type=int, default=1, help="dangerous pairs per line cap")
    e.add_argument("--b", type=int, default=4, help="involved lines per reserve point cap")
    e.add_argument("--m", type=int, default=None)
    e.add_argument("--threshold", type=float, default=None,
                   help="override the 22 ln(n) dangerous-pair radius (experiments)")
    e.add_argument("--max-steps", type=int, default=10 ** 7)
    e.add_argument("-o", "--output", default=None)
    e.add_argument("--register", default=None)
    e.set_defaults(func=_cmd_solve_extend)

    b = sub.add_parser("bounds", help="color-count guarantee for caps (a, b)")
    b.add_argument("--a", type=int, required=True)
    b.add_argument("--b", type=int, required=True)
    b.add_argument("--m-max", type=int, default=50)
    b.set_defaults(func=_cmd_bounds)

    r = sub.add_parser("region", help="feasibility region sweep (CSV and SVG)")
    r.add_argument("--d-min", type=int, required=True)
    r.add_argument("--d-max", type=int, required=True)
    r.add_argument("--a-max", type=int, default=feas.DEFAULT_A_RANGE[1])
    r.add_argument("--b-max", type=int, default=feas.DEFAULT_B_RANGE[1])
    r.add_argument("--m-max", type=int, default=feas.DEFAULT_M_RANGE[1])
    r.add_argument("--tol", type=float, default=0.01)
    r.add_argument("-o", "--output", required=True)
    r.add_argument("--svg", default=None)
    r.set_defaults(func=_cmd_region)

    d = sub.add_parser("decode", help="replay a run register and verify losslessness")
    d.add_argument("--register", required=True)
    d.add_argument("--final", required=True, help="final configuration (coloring JSON)")
    d.add_argument("--plane", required=True)
    d.add_argument("--reserve", default=None)
    d.add_argument("--base", default=None)
    d.set_defaults(func=_cmd_decode)

    return top


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (LegicolorError, ValueError, OSError) as exc:
        _emit({"command": args.command, "error": f"{type(exc).__name__}: {exc}"})
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
