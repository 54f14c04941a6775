import numpy as np
import pytest

from legicolor import coloring as col
from legicolor.errors import DecodeError
from legicolor.rng import SplitMix64
from legicolor.solver import (Exhausted, ProblemInstance, RunRegister, Success,
                              TableEvent, available_backends, build_full_problem,
                              decode, detect_violations, run, solve_extension,
                              solve_full, uncolored_sets)

from conftest import plane_of_order
from oracles import exhaustive_bad_pairs, reference_run

HAS_COMPILED = "compiled" in available_backends()


def toy_equal_pair():
    """Two variables, one event firing on equal colors."""
    return ProblemInstance([2, 2], [TableEvent((0, 1), ((1, 1), (2, 2)))])


def toy_overlapping():
    """Three variables; equal-colors events on (0,1) and on (0,1,2)."""
    return ProblemInstance(
        [2, 2, 2],
        [TableEvent((0, 1), ((1, 1), (2, 2))),
         TableEvent((0, 1, 2), ((1, 1, 1), (2, 2, 2)))])


# -- run ---------------------------------------------------------------------

def test_event_free_instance_assigns_in_order():
    inst = ProblemInstance([3] * 5, [])
    out = run(inst, seed=42, max_steps=100)
    assert isinstance(out, Success)
    assert out.register.n_steps == 5
    assert list(out.register.vars) == [0, 1, 2, 3, 4]
    assert not out.register.alpha.any()
    assert all(1 <= v <= 3 for v in out.assignment)


def test_single_color_fano_exhausts(fano):
    inst = build_full_problem(fano, d=1, m=2)
    out = run(inst, seed=9, max_steps=3000)
    assert isinstance(out, Exhausted)
    assert out.register.n_steps == 3000


def test_pg3_42_colors_succeeds_and_verifies(pg3):
    result = solve_full(pg3, 42, seed=1, max_steps=10 ** 6)
    assert result.succeeded
    assert col.find_bad_pairs(pg3, result.coloring) == []
    assert exhaustive_bad_pairs(pg3, result.coloring) == []


def test_success_assignment_total_and_in_range(pg3):
    result = solve_full(pg3, 8, seed=3, max_steps=10 ** 6)
    assert result.succeeded
    assert all(1 <= c <= 8 for c in result.outcome.assignment)


def test_runs_are_deterministic(fano):
    inst = build_full_problem(fano, d=2, m=2)
    a = run(inst, seed=77, max_steps=5000)
    b = run(inst, seed=77, max_steps=5000)
    assert a.register == b.register
    c = run(inst, seed=78, max_steps=5000)
    assert a.register != c.register


@pytest.mark.skipif(not HAS_COMPILED, reason="compiled kernel unavailable")
@pytest.mark.parametrize("seed", [1, 2, 3])
def test_backend_parity_full_mode(fano, seed):
    inst = build_full_problem(fano, d=2, m=2)
    a = run(inst, seed=seed, max_steps=20000, backend="compiled")
    b = run(inst, seed=seed, max_steps=20000, backend="python")
    assert a.register == b.register


@pytest.mark.skipif(not HAS_COMPILED, reason="compiled kernel unavailable")
def test_backend_parity_table_events():
    inst = toy_overlapping()
    a = run(inst, seed=5, max_steps=500, backend="compiled")
    b = run(inst, seed=5, max_steps=500, backend="python")
    assert a.register == b.register


@pytest.mark.parametrize("seed", range(6))
def test_kernel_matches_reference_stepper(fano, seed):
    # independent restatement of the step rule on the object layer
    inst = build_full_problem(fano, d=3, m=2)
    ref = reference_run(inst, seed, 400)
    out = run(inst, seed=seed, max_steps=400)
    reg = out.register
    assert list(reg.vars) == ref.vars
    assert list(reg.tape) == ref.tape
    assert list(reg.alpha) == ref.alpha
    assert list(reg.beta) == ref.beta
    assert list(reg.gamma) == ref.gamma
    assert list(reg.event) == ref.event
    assert list(reg.final) == ref.final


def test_kernel_matches_reference_on_toys():
    for inst in (toy_equal_pair(), toy_overlapping()):
        ref = reference_run(inst, 12, 64)
        out = run(inst, seed=12, max_steps=64)
        assert list(out.register.tape) == ref.tape
        assert list(out.register.gamma) == ref.gamma
        assert isinstance(out, Success) == ref.success


# -- detect_violations ---------------------------------------------------------

def test_detect_nothing_when_neighbors_unassigned(fano):
    inst = build_full_problem(fano, d=2, m=2)
    values = [0] * inst.n_vars
    values[0] = 1
    assert detect_violations(inst, values, 0) == []


def test_detect_equal_complete_lines(fano):
    inst = build_full_problem(fano, d=2, m=2)
    values = [1] * inst.n_vars  # every pair of lines shares a type
    hits = detect_violations(inst, values, 0)
    assert hits
    assert all(0 in inst.events[e].vbl for e in hits)
    assert hits == sorted(hits)


def test_detect_overlapping_events_in_fixed_order():
    inst = toy_overlapping()
    values = [1, 1, 1]
    assert detect_violations(inst, values, 0) == [0, 1]


# -- decode ---------------------------------------------------------------------

def test_decode_violation_free_run():
    inst = ProblemInstance([4] * 6, [])
    out = run(inst, seed=8, max_steps=100)
    dec = decode(inst, out.register)
    assert np.array_equal(dec.color_sequence, out.register.tape)
    assert np.array_equal(dec.pivot_sequence, np.arange(6))


def test_decode_hand_traced_toy():
    # vars (0, 1), domain 2, the event fires on equal colors; trace by hand:
    # each step assigns the lowest hole, a fire erases both variables and
    # logs gamma as the rank of the erased pair among ((1,1), (2,2))
    inst = toy_equal_pair()
    rng = SplitMix64(3)
    draws = []
    state = [0, 0]
    expected = []  # (var, value, fired)
    for _ in range(64):
        pivot = 0 if state[0] == 0 else 1
        v = 1 + rng.randbelow(2)
        draws.append(v)
        state[pivot] = v
        fired = state[0] == state[1] and state[0] != 0
        expected.append((pivot, v, fired))
        if fired:
            state = [0, 0]
        elif state[0] and state[1]:
            break
    out = run(inst, seed=3, max_steps=64)
    reg = out.register
    assert [(int(a), int(b)) for a, b in zip(reg.vars, reg.tape)] == \
        [(p, v) for p, v, _ in expected]
    assert [bool(a) for a in reg.alpha] == [f for _, _, f in expected]
    for i, (_, v, fired) in enumerate(expected):
        if fired:
            assert int(reg.gamma[i]) == v  # rank 1 for (1,1), 2 for (2,2)
    dec = decode(inst, reg)
    assert np.array_equal(dec.color_sequence, reg.tape)


@pytest.mark.parametrize("d", [1, 2, 4])
@pytest.mark.parametrize("seed", [10, 11])
def test_decode_round_trip_full_mode(fano, d, seed):
    inst = build_full_problem(fano, d=d, m=2)
    out = run(inst, seed=seed, max_steps=4000)
    dec = decode(inst, out.register)
    assert np.array_equal(dec.color_sequence, out.register.tape)
    assert np.array_equal(dec.pivot_sequence, out.register.vars)
    assert dec.tapes() == out.register.tapes()


def test_decode_round_trip_extension_mode(fano):
    rng = SplitMix64(6)
    reserve = col.sample_reserve(fano, rng)
    partial = col.sample_partial(fano, reserve, 4, rng)
    result = solve_extension(fano, reserve, partial, d=4, seed=15, m=2, a=21, b=4)
    assert result.succeeded and result.verified
    dec = decode(result.instance, result.register)
    assert np.array_equal(dec.color_sequence, result.register.tape)


def test_uncolored_sets_match_reference(fano):
    inst = build_full_problem(fano, d=2, m=2)
    ref = reference_run(inst, 21, 300)
    out = run(inst, seed=21, max_steps=300)
    assert uncolored_sets(inst, out.register) == ref.uncolored_after


def test_per_step_progress_accounting(fano):
    # after step i: colored = i - sum of alphas over the entry prefix
    inst = build_full_problem(fano, d=2, m=2)
    out = run(inst, seed=22, max_steps=500)
    erased = 0
    for i, x in enumerate(uncolored_sets(inst, out.register), start=1):
        erased += int(out.register.alpha[i - 1])
        assert inst.n_vars - len(x) == i - erased


def test_decode_rejects_corrupted_register(fano):
    inst = build_full_problem(fano, d=2, m=2)
    out = run(inst, seed=33, max_steps=500)
    reg = out.register
    fired = np.nonzero(reg.alpha)[0]
    assert len(fired)
    i = int(fired[0])

    bad_beta = RunRegister(reg.vars, reg.tape, reg.alpha, reg.beta.copy(),
                           reg.gamma, reg.event, reg.final, reg.seed)
    bad_beta.beta[i] = 10 ** 6
    with pytest.raises(DecodeError) as info:
        decode(inst, bad_beta)
    assert info.value.step == i + 1

    bad_gamma = RunRegister(reg.vars, reg.tape, reg.alpha, reg.beta,
                            reg.gamma.copy(), reg.event, reg.final, reg.seed)
    bad_gamma.gamma[i] = 10 ** 6
    with pytest.raises(DecodeError):
        decode(inst, bad_gamma)


# -- register invariants ---------------------------------------------------------

def register_accounting_ok(inst, out):
    reg = out.register
    colored = int(np.count_nonzero(reg.final))
    # every step consumes one tape value; erased blocks return alpha holes
    assert reg.n_steps == len(reg.tape)
    assert colored == reg.n_steps - int(reg.alpha.sum())
    # entry ranges: 1 <= beta <= bucket size, 1 <= gamma <= event bound
    for i in np.nonzero(reg.alpha)[0]:
        e = int(reg.event[i])
        v = int(reg.vars[i])
        ev = inst.events[e]
        assert int(reg.alpha[i]) == ev.free_count
        assert 1 <= int(reg.beta[i]) <= len(inst.bucket(v, ev.free_count))
        assert 1 <= int(reg.gamma[i]) <= ev.max_extensions
    return True


@pytest.mark.parametrize("d,seed", [(1, 4), (2, 5), (4, 6)])
def test_register_accounting(fano, d, seed):
    inst = build_full_problem(fano, d=d, m=2)
    out = run(inst, seed=seed, max_steps=2500)
    assert register_accounting_ok(inst, out)
    if isinstance(out, Success):
        assert np.count_nonzero(out.register.final) == inst.n_vars


def test_register_jsonl_round_trip(tmp_path, fano):
    inst = build_full_problem(fano, d=2, m=2)
    out = run(inst, seed=50, max_steps=800)
    path = tmp_path / "r.jsonl"
    out.register.to_jsonl(path)
    loaded = RunRegister.from_jsonl(path, out.register.final)
    assert loaded == out.register
    assert loaded.seed == 50
    assert loaded.meta["mode"] == "full"
    assert loaded.meta["colors"] == 2
    dec = decode(inst, loaded)
    assert np.array_equal(dec.color_sequence, out.register.tape)


def test_zero_variable_instance():
    inst = ProblemInstance([], [])
    out = run(inst, seed=1, max_steps=10)
    assert isinstance(out, Success)
    assert out.assignment == ()
    assert out.register.n_steps == 0
