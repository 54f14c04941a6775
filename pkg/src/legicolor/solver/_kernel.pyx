# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled resampling kernel; semantic twin of _kernel_py.run_chunk.

Keep every decision point aligned with the Python fallback: tape draws and
the rejection loop, ascending event scan, the smallest-id free-block rule,
and the completion-rank arithmetic.  Registers must match bit for bit.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, int32_t, int8_t

cnp.import_array()

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t MIX1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t MIX2 = 0x94D049BB133111EBULL
cdef uint64_t U64_MAX = 0xFFFFFFFFFFFFFFFFULL

DEF MAX_FREE = 24


cdef inline uint64_t _mix(uint64_t state) noexcept nogil:
    cdef uint64_t z = state
    z = (z ^ (z >> 30)) * MIX1
    z = (z ^ (z >> 27)) * MIX2
    return z ^ (z >> 31)


cdef inline uint64_t _draw(uint64_t* state, uint64_t n) noexcept nogil:
    cdef uint64_t rem = (U64_MAX % n + 1) % n
    cdef uint64_t limit = 0 - rem
    cdef uint64_t u
    state[0] = state[0] + GOLDEN
    u = _mix(state[0])
    if rem != 0:
        while u >= limit:
            state[0] = state[0] + GOLDEN
            u = _mix(state[0])
    return u % n


def run_chunk(ci, cnp.ndarray[int32_t, ndim=1] values_arr,
              cnp.ndarray[int32_t, ndim=1] ev_assigned_arr,
              int scan_from, int uncolored, object rng_state_obj,
              bufs, int limit):
    cdef int32_t[:] values = values_arr
    cdef int32_t[:] ev_assigned = ev_assigned_arr

    cdef int32_t[:] domains = ci.domains
    cdef int64_t[:] var_ptr = ci.var_ptr
    cdef int32_t[:] var_events = ci.var_events
    cdef int8_t[:] ev_kind = ci.ev_kind
    cdef int32_t[:] ev_l = ci.ev_l
    cdef int32_t[:] ev_size = ci.ev_size
    cdef int64_t[:] ev_ptr = ci.ev_ptr
    cdef int32_t[:] ev_vars = ci.ev_vars
    cdef int32_t[:] ev_beta = ci.ev_beta
    cdef int64_t[:] pa_ptr = ci.pa_ptr
    cdef int32_t[:] pa_vars = ci.pa_vars
    cdef int64_t[:] pb_ptr = ci.pb_ptr
    cdef int32_t[:] pb_vars = ci.pb_vars
    cdef int64_t[:] dl_ptr = ci.dl_ptr
    cdef int32_t[:] dl_color = ci.dl_color
    cdef int32_t[:] dl_val = ci.dl_val
    cdef int64_t[:] tb_ptr = ci.tb_ptr
    cdef int32_t[:] tb_rows = ci.tb_rows
    cdef int32_t[:] tb_vals = ci.tb_vals
    cdef int64_t[:] fs_ptr = ci.fs_ptr
    cdef int32_t[:] fs_vars = ci.fs_vars
    cdef int64_t[:] fact = ci.fact

    cdef int32_t[:] b_var = bufs[0]
    cdef int32_t[:] b_tape = bufs[1]
    cdef int32_t[:] b_alpha = bufs[2]
    cdef int32_t[:] b_beta = bufs[3]
    cdef int64_t[:] b_gamma = bufs[4]
    cdef int32_t[:] b_event = bufs[5]

    cdef cnp.ndarray[int32_t, ndim=1] cnt_arr = np.zeros(ci.d_max + 2, dtype=np.int32)
    cdef cnp.ndarray[int32_t, ndim=1] touched_arr = np.zeros(ci.max_touched + 2, dtype=np.int32)
    cdef int32_t[:] cnt = cnt_arr
    cdef int32_t[:] touched = touched_arr

    cdef uint64_t rng_state = <uint64_t> (<object> rng_state_obj)
    cdef int status = 0
    cdef int steps = 0
    cdef int j, v, hit, e, l, beta, i, s, pos, rem_len, t, tv, slot
    cdef int64_t k, row, off, base, gamma, denom, rank
    cdef int n_touched, ok, size, vb, k_ok, full_ok, n_distinct, fi
    cdef int free_buf[MAX_FREE]
    cdef int vals_buf[MAX_FREE]
    cdef int sorted_buf[MAX_FREE]
    cdef int ms_colors[MAX_FREE]
    cdef int ms_counts[MAX_FREE]
    cdef int c, cc, swap

    while steps < limit:
        # pivot: lowest-id hole
        j = scan_from
        while values[j] != 0:
            j += 1
        v = <int> _draw(&rng_state, <uint64_t> domains[j]) + 1
        values[j] = v
        uncolored -= 1
        for k in range(var_ptr[j], var_ptr[j + 1]):
            ev_assigned[var_events[k]] += 1

        # lowest-index firing event among those containing the pivot
        hit = -1
        for k in range(var_ptr[j], var_ptr[j + 1]):
            e = var_events[k]
            if ev_assigned[e] != ev_size[e]:
                continue
            if ev_kind[e] == 0:
                n_touched = 0
                for i in range(pa_ptr[e], pa_ptr[e + 1]):
                    c = values[pa_vars[i]]
                    cnt[c] += 1
                    touched[n_touched] = c
                    n_touched += 1
                for i in range(pb_ptr[e], pb_ptr[e + 1]):
                    c = values[pb_vars[i]]
                    cnt[c] -= 1
                    touched[n_touched] = c
                    n_touched += 1
                for i in range(dl_ptr[e], dl_ptr[e + 1]):
                    c = dl_color[i]
                    cnt[c] -= dl_val[i]
                    touched[n_touched] = c
                    n_touched += 1
                ok = 1
                for i in range(n_touched):
                    if cnt[touched[i]] != 0:
                        ok = 0
                for i in range(n_touched):
                    cnt[touched[i]] = 0
            else:
                ok = 0
                size = ev_size[e]
                base = tb_ptr[e]
                vb = <int> ev_ptr[e]
                for row in range(tb_rows[e]):
                    off = base + row * size
                    full_ok = 1
                    for s in range(size):
                        if tb_vals[off + s] != values[ev_vars[vb + s]]:
                            full_ok = 0
                            break
                    if full_ok:
                        ok = 1
                        break
            if ok:
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
            continue

        l = ev_l[hit]
        # beta: binary search the pivot's slot in the event's variable list
        i = <int> ev_ptr[hit]
        s = <int> ev_ptr[hit + 1]
        while i < s:
            t = (i + s) >> 1
            if ev_vars[t] < j:
                i = t + 1
            else:
                s = t
        slot = i
        beta = ev_beta[slot]

        if ev_kind[hit] == 0:
            # free block: pivot plus smallest-id others on the pivot's side
            pos = -1
            for i in range(pa_ptr[hit], pa_ptr[hit + 1]):
                if pa_vars[i] == j:
                    pos = i - <int> pa_ptr[hit]
                    break
            if pos >= 0:
                if pos < l:
                    for i in range(l):
                        free_buf[i] = pa_vars[pa_ptr[hit] + i]
                else:
                    for i in range(l - 1):
                        free_buf[i] = pa_vars[pa_ptr[hit] + i]
                    free_buf[l - 1] = j
            else:
                for i in range(pb_ptr[hit], pb_ptr[hit + 1]):
                    if pb_vars[i] == j:
                        pos = i - <int> pb_ptr[hit]
                        break
                if pos < l:
                    for i in range(l):
                        free_buf[i] = pb_vars[pb_ptr[hit] + i]
                else:
                    for i in range(l - 1):
                        free_buf[i] = pb_vars[pb_ptr[hit] + i]
                    free_buf[l - 1] = j

            # gamma: rank among lexicographic arrangements of the erased multiset
            for i in range(l):
                vals_buf[i] = values[free_buf[i]]
                sorted_buf[i] = vals_buf[i]
            for i in range(1, l):  # insertion sort
                c = sorted_buf[i]
                s = i - 1
                while s >= 0 and sorted_buf[s] > c:
                    sorted_buf[s + 1] = sorted_buf[s]
                    s -= 1
                sorted_buf[s + 1] = c
            n_distinct = 0
            for i in range(l):
                if n_distinct > 0 and ms_colors[n_distinct - 1] == sorted_buf[i]:
                    ms_counts[n_distinct - 1] += 1
                else:
                    ms_colors[n_distinct] = sorted_buf[i]
                    ms_counts[n_distinct] = 1
                    n_distinct += 1
            denom = 1
            for t in range(n_distinct):
                denom *= fact[ms_counts[t]]
            rank = 1
            for pos in range(l):
                c = vals_buf[pos]
                rem_len = l - pos
                tv = -1
                for t in range(n_distinct):
                    cc = ms_colors[t]
                    if cc >= c:
                        if cc == c:
                            tv = t
                        break
                    if ms_counts[t] > 0:
                        rank += fact[rem_len - 1] / (denom / ms_counts[t])
                denom /= ms_counts[tv]
                ms_counts[tv] -= 1
            gamma = rank
        else:
            # stored free block for this pivot slot
            fi = 0
            for k in range(fs_ptr[slot], fs_ptr[slot + 1]):
                free_buf[fi] = fs_vars[k]
                fi += 1
            # gamma: position among rows matching the fixed variables
            size = ev_size[hit]
            base = tb_ptr[hit]
            vb = <int> ev_ptr[hit]
            gamma = 0
            for row in range(tb_rows[hit]):
                off = base + row * size
                k_ok = 1
                full_ok = 1
                for s in range(size):
                    if tb_vals[off + s] != values[ev_vars[vb + s]]:
                        full_ok = 0
                        swap = 0
                        for t in range(l):
                            if free_buf[t] == ev_vars[vb + s]:
                                swap = 1
                                break
                        if swap == 0:
                            k_ok = 0
                            break
                if k_ok:
                    gamma += 1
                    if full_ok:
                        break

        b_alpha[steps] = l
        b_beta[steps] = beta
        b_gamma[steps] = gamma
        b_event[steps] = hit
        for i in range(l):
            t = free_buf[i]
            values[t] = 0
            for k in range(var_ptr[t], var_ptr[t + 1]):
                ev_assigned[var_events[k]] -= 1
        uncolored += l
        scan_from = free_buf[0]
        steps += 1

    return status, steps, scan_from, uncolored, int(rng_state)
