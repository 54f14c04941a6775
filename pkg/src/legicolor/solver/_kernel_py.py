"""Pure-Python resampling kernel; the semantic twin of the compiled one.

Every decision point (tape draw, rejection loop, event scan order, free-block
rule, completion ranking) mirrors _kernel.pyx exactly, so the two backends
produce bit-identical registers for the same seed.  Python integers make the
ranking arithmetic trivially exact; the compiled kernel keeps it inside
int64, which the instance validator guarantees by capping free blocks at 20.
"""
from __future__ import annotations

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def _next_u64(state: int) -> tuple[int, int]:
    state = (state + _GOLDEN) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return state, z ^ (z >> 31)


def _draw(state: int, n: int) -> tuple[int, int]:
    """One tape value in [0, n) by rejection; identical to the C path."""
    rem = (1 << 64) % n
    state, u = _next_u64(state)
    if rem:
        limit = (1 << 64) - rem
        while u >= limit:
            state, u = _next_u64(state)
    return state, u % n


def _py_arrays(ci):
    cached = getattr(ci, "_py_arrays", None)
    if cached is None:
        names = ("domains", "var_ptr", "var_events", "ev_kind", "ev_l", "ev_size",
                 "ev_ptr", "ev_vars", "ev_beta", "pa_ptr", "pa_vars", "pb_ptr",
                 "pb_vars", "dl_ptr", "dl_color", "dl_val", "tb_ptr", "tb_rows",
                 "tb_vals", "fs_ptr", "fs_vars")
        cached = {n: getattr(ci, n).tolist() for n in names}
        ci._py_arrays = cached
    return cached


def run_chunk(ci, values_arr, ev_assigned_arr, scan_from, uncolored, rng_state,
              bufs, limit):
    a = _py_arrays(ci)
    domains, var_ptr, var_events = a["domains"], a["var_ptr"], a["var_events"]
    ev_kind, ev_l, ev_size = a["ev_kind"], a["ev_l"], a["ev_size"]
    ev_ptr, ev_vars, ev_beta = a["ev_ptr"], a["ev_vars"], a["ev_beta"]
    pa_ptr, pa_vars = a["pa_ptr"], a["pa_vars"]
    pb_ptr, pb_vars = a["pb_ptr"], a["pb_vars"]
    dl_ptr, dl_color, dl_val = a["dl_ptr"], a["dl_color"], a["dl_val"]
    tb_ptr, tb_rows, tb_vals = a["tb_ptr"], a["tb_rows"], a["tb_vals"]
    fs_ptr, fs_vars = a["fs_ptr"], a["fs_vars"]

    values = values_arr.tolist()
    ev_assigned = ev_assigned_arr.tolist()
    cnt = [0] * (ci.d_max + 2)

    def pair_violated(e: int) -> bool:
        touched = []
        for i in range(pa_ptr[e], pa_ptr[e + 1]):
            c = values[pa_vars[i]]
            cnt[c] += 1
            touched.append(c)
        for i in range(pb_ptr[e], pb_ptr[e + 1]):
            c = values[pb_vars[i]]
            cnt[c] -= 1
            touched.append(c)
        for i in range(dl_ptr[e], dl_ptr[e + 1]):
            c = dl_color[i]
            cnt[c] -= dl_val[i]
            touched.append(c)
        ok = True
        for c in touched:
            if cnt[c] != 0:
                ok = False
        for c in touched:
            cnt[c] = 0
        return ok

    def table_violated(e: int) -> bool:
        size, base = ev_size[e], tb_ptr[e]
        vb = ev_ptr[e]
        for r in range(tb_rows[e]):
            off = base + r * size
            for s in range(size):
                if tb_vals[off + s] != values[ev_vars[vb + s]]:
                    break
            else:
                return True
        return False

    def violated(e: int) -> bool:
        return pair_violated(e) if ev_kind[e] == 0 else table_violated(e)

    def slot_of(e: int, var: int) -> int:
        lo, hi = ev_ptr[e], ev_ptr[e + 1]
        while lo < hi:
            mid = (lo + hi) // 2
            if ev_vars[mid] < var:
                lo = mid + 1
            else:
                hi = mid
        return lo

    def pair_free_set(e: int, pivot: int) -> list[int]:
        lo, hi = pa_ptr[e], pa_ptr[e + 1]
        side, sp = pa_vars, lo
        pos = -1
        for i in range(lo, hi):
            if pa_vars[i] == pivot:
                pos = i - lo
                break
        if pos < 0:
            lo, hi = pb_ptr[e], pb_ptr[e + 1]
            side, sp = pb_vars, lo
            for i in range(lo, hi):
                if pb_vars[i] == pivot:
                    pos = i - lo
                    break
        l = ev_l[e]
        if pos < l:
            return [side[sp + i] for i in range(l)]
        return [side[sp + i] for i in range(l - 1)] + [pivot]

    def pair_gamma(e: int, free: list[int]) -> int:
        # rank of the erased tuple among lexicographic arrangements of its
        # own color multiset (the only violating completions)
        l = len(free)
        vals = [values[v] for v in free]
        colors = sorted(set(vals))
        count = {c: 0 for c in colors}
        for v in vals:
            count[v] += 1
        fact = [1] * (l + 1)
        for i in range(1, l + 1):
            fact[i] = fact[i - 1] * i
        denom = 1
        for c in colors:
            denom *= fact[count[c]]
        rank = 1
        for pos, v in enumerate(vals):
            rem = l - pos
            for c in colors:
                if c >= v:
                    break
                if count[c]:
                    rank += fact[rem - 1] // (denom // count[c])
            denom //= count[v]
            count[v] -= 1
        return rank

    def table_free_set(e: int, pivot: int) -> list[int]:
        slot = slot_of(e, pivot)
        return fs_vars[fs_ptr[slot]:fs_ptr[slot + 1]]

    def table_gamma(e: int, free: list[int]) -> int:
        size, base, vb = ev_size[e], tb_ptr[e], ev_ptr[e]
        free_mask = set(free)
        is_free = [ev_vars[vb + s] in free_mask for s in range(size)]
        matches = 0
        for r in range(tb_rows[e]):
            off = base + r * size
            k_ok = full_ok = True
            for s in range(size):
                same = tb_vals[off + s] == values[ev_vars[vb + s]]
                if not same:
                    full_ok = False
                    if not is_free[s]:
                        k_ok = False
                        break
            if k_ok:
                matches += 1
                if full_ok:
                    return matches
        raise AssertionError("violating row vanished during ranking")

    b_var, b_tape, b_alpha, b_beta, b_gamma, b_event = bufs
    steps = 0
    status = 0
    while steps < limit:
        j = scan_from
        while values[j] != 0:
            j += 1
        rng_state, v0 = _draw(rng_state, domains[j])
        v = v0 + 1
        values[j] = v
        uncolored -= 1
        for i in range(var_ptr[j], var_ptr[j + 1]):
            ev_assigned[var_events[i]] += 1
        hit = -1
        for i in range(var_ptr[j], var_ptr[j + 1]):
            e = var_events[i]
            if ev_assigned[e] == ev_size[e] and violated(e):
                hit = e
                break

        b_var[steps] = j
        b_tape[steps] = v
        if hit < 0:
            b_alpha[steps] = 0
            b_beta[steps] = 0
            b_gamma[steps] = 0
            b_event[steps] = -1
            scan_from = j + 1
            steps += 1
            if uncolored == 0:
                status = 1
                break
        else:
            l = ev_l[hit]
            beta = ev_beta[slot_of(hit, j)]
            if ev_kind[hit] == 0:
                free = pair_free_set(hit, j)
                gamma = pair_gamma(hit, free)
            else:
                free = table_free_set(hit, j)
                gamma = table_gamma(hit, free)
            b_alpha[steps] = l
            b_beta[steps] = beta
            b_gamma[steps] = gamma
            b_event[steps] = hit
            for fv in free:
                values[fv] = 0
                for i in range(var_ptr[fv], var_ptr[fv + 1]):
                    ev_assigned[var_events[i]] -= 1
            uncolored += l
            scan_from = free[0]
            steps += 1

    values_arr[:] = values
    ev_assigned_arr[:] = ev_assigned
    return status, steps, scan_from, uncolored, rng_state
