# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Rule-sweep kernel, compiled backend.

Same algorithm and outputs as heliplan._sweep_py (the reference); the test
suite and the kernel benchmark hold the two to identical results. Keep the
section structure in sync with the reference when editing either.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "compiled"


def _compress_usage(list series):
    # no negative list indexing here: wraparound is compiled out
    runs = []
    last = None
    cdef Py_ssize_t t
    cdef long v
    for t in range(len(series)):
        v = series[t]
        if v < 0:
            continue
        if last is not None and last[0] == v:
            last[2] = t
        else:
            last = [v, t, t]
            runs.append(last)
    return runs


def sweep(enc, loc_arr):
    cdef Py_ssize_t T = enc.horizon
    cdef Py_ssize_t A = enc.n_helis
    cdef Py_ssize_t N = enc.n_nodes
    cdef cnp.int64_t[:, ::1] loc = np.ascontiguousarray(loc_arr, dtype=np.int64)
    cdef cnp.int8_t[::1] ev = np.ascontiguousarray(enc.ev, dtype=np.int8)

    cdef Py_ssize_t water_lo = enc.water_lo
    cdef Py_ssize_t water_hi = enc.water_hi
    cdef Py_ssize_t fire_lo = enc.fire_lo
    cdef Py_ssize_t fire_hi = enc.fire_hi
    cdef Py_ssize_t base_lo = enc.base_lo
    cdef Py_ssize_t base_hi = enc.base_hi
    cdef Py_ssize_t n_water = water_hi - water_lo

    cdef cnp.int64_t[::1] wc = np.ascontiguousarray(enc.wc, dtype=np.int64)
    cdef cnp.int64_t[::1] mr = np.ascontiguousarray(enc.mr, dtype=np.int64)
    cdef cnp.int64_t[::1] mcf = np.ascontiguousarray(enc.mcf, dtype=np.int64)
    cdef cnp.int64_t[::1] mtf = np.ascontiguousarray(enc.mtf, dtype=np.int64)
    cdef cnp.int64_t[::1] cfi = np.ascontiguousarray(enc.cfi, dtype=np.int64)
    cdef cnp.int64_t[::1] tf0 = np.ascontiguousarray(enc.tf0, dtype=np.int64)
    cdef cnp.int64_t[::1] ri = np.ascontiguousarray(enc.ri, dtype=np.int64)
    cdef cnp.int64_t[::1] wli = np.ascontiguousarray(enc.wli, dtype=np.int64)
    cdef cnp.int64_t[::1] sp = np.ascontiguousarray(enc.sp, dtype=np.int64)
    cdef cnp.int64_t[::1] traj = np.ascontiguousarray(enc.traj, dtype=np.int64)
    cdef cnp.int64_t[:, ::1] alpha = np.ascontiguousarray(enc.alpha, dtype=np.int64)
    cdef cnp.int64_t[::1] edge_tail = np.ascontiguousarray(enc.edge_tail, dtype=np.int64)
    cdef cnp.int64_t[::1] edge_head = np.ascontiguousarray(enc.edge_head, dtype=np.int64)
    cdef cnp.int64_t[::1] water_cap = np.ascontiguousarray(enc.water_cap, dtype=np.int64)
    cdef cnp.int64_t[::1] water_slots = np.ascontiguousarray(enc.water_slots, dtype=np.int64)
    cdef cnp.int64_t[::1] base_cap = np.ascontiguousarray(enc.base_cap, dtype=np.int64)
    cdef cnp.float64_t[:, ::1] ef = np.ascontiguousarray(enc.ef, dtype=np.float64)

    violations = []

    # ---- parse runs per helicopter -----------------------------------------
    node_runs = [[] for _ in range(A)]
    flight_runs = [[] for _ in range(A)]
    cdef Py_ssize_t a, t, u
    cdef long v
    for a in range(A):
        t = 0
        while t < T:
            v = loc[a, t]
            u = t
            while u + 1 < T and loc[a, u + 1] == v:
                u += 1
            if 0 <= v < N:
                node_runs[a].append((v, t, u))
            elif v >= N:
                flight_runs[a].append((v - N, t, u))
            t = u + 1

    # ---- events -------------------------------------------------------------
    load_events = []
    drop_events = []
    rest_events = []
    ec_sets = [dict() for _ in range(A)]
    ed_sets = [dict() for _ in range(A)]
    cdef long node
    cdef Py_ssize_t s, te
    for a in range(A):
        for node, s, u in node_runs[a]:
            if water_lo <= node < fire_hi:
                te = s + alpha[a, node]
                if te > T - 1:
                    te = T - 1
                if node < water_hi:
                    load_events.append((a, node, te))
                    ec_sets[a].setdefault(node, set()).add(te)
                else:
                    drop_events.append((a, node, te))
                    ed_sets[a].setdefault(node, set()).add(te)
            elif base_lo <= node < base_hi:
                if u < T - 1:
                    rest_events.append((a, node, u))

    # ---- occupancy counts: rules 1, 2 ---------------------------------------
    count_np = np.zeros((N, T), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] count_at = count_np
    for a in range(A):
        for t in range(T):
            v = loc[a, t]
            if 0 <= v < N:
                count_at[v, t] += 1
    cdef Py_ssize_t b, c
    for b in range(base_lo, base_hi):
        for t in range(T):
            if count_at[b, t] > base_cap[b - base_lo]:
                violations.append((1, b, -1, -1, t + 1))
    for c in range(water_lo, water_hi):
        for t in range(T):
            if count_at[c, t] > water_slots[c - water_lo]:
                violations.append((2, c, -1, -1, t + 1))

    # ---- water ledger + rules 3, 4 ------------------------------------------
    drawn_np = np.zeros((n_water, T), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] drawn = drawn_np
    for a, node, te in load_events:
        drawn[node - water_lo, te] += wc[a]
    cdef Py_ssize_t ci
    cdef long long acc
    for ci in range(n_water):
        acc = 0
        for t in range(T):
            acc += drawn[ci, t]
            drawn[ci, t] = acc
    remaining_np = np.zeros((n_water, T), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] remaining = remaining_np
    for ci in range(n_water):
        remaining[ci, 0] = water_cap[ci]
        for t in range(1, T):
            remaining[ci, t] = water_cap[ci] - drawn[ci, t - 1]
    cdef long long present
    for c in range(water_lo, water_hi):
        ci = c - water_lo
        for t in range(T):
            present = 0
            for a in range(A):
                if loc[a, t] == c:
                    present += wc[a]
            if t == 0:
                if present > water_cap[ci]:
                    violations.append((4, c, -1, -1, 1))
            elif present > remaining[ci, t]:
                violations.append((3, c, -1, -1, t + 1))

    # ---- carried-water ledger + rules 5, 6 ----------------------------------
    carried_np = np.zeros((A, T), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] carried = carried_np
    delta_np = np.zeros((A, T), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] delta = delta_np
    for a, node, te in load_events:
        delta[a, te] += 1
    for a, node, te in drop_events:
        delta[a, te] -= 1
    cdef long long z
    for a in range(A):
        z = wli[a]
        for t in range(T):
            if t > 0:
                z += delta[a, t]
            carried[a, t] = z
            v = loc[a, t]
            if fire_lo <= v < fire_hi and z < 1:
                violations.append((5, v, a, -1, t + 1))
            elif water_lo <= v < water_hi and z > 0:
                violations.append((6, v, a, -1, t + 1))

    # ---- stay-length and event-placement rules 7, 13-18 ---------------------
    cdef long dur
    cdef Py_ssize_t required_end
    cdef bint is_water
    for a in range(A):
        for node, s, u in node_runs[a]:
            if not (water_lo <= node < fire_hi):
                continue
            is_water = node < water_hi
            dur = alpha[a, node]
            if dur > 1:
                required_end = s + dur - 1
                if required_end > T - 1:
                    required_end = T - 1
                if u < required_end:
                    violations.append((7, node, a, -1, s + 1))
            if u + 1 <= T - 1:
                events = (ec_sets[a] if is_water else ed_sets[a]).get(node, ())
                if (u + 1) not in events:
                    violations.append((13 if is_water else 16, node, a, -1, u + 2))
        for node, te_set in ec_sets[a].items():
            for te in sorted(te_set):
                if loc[a, te - 1] != node:
                    violations.append((14, node, a, -1, te + 1))
                if loc[a, te] == node:
                    violations.append((15, node, a, -1, te + 1))
        for node, te_set in ed_sets[a].items():
            for te in sorted(te_set):
                if loc[a, te - 1] != node:
                    violations.append((17, node, a, -1, te + 1))
                if loc[a, te] == node:
                    violations.append((18, node, a, -1, te + 1))

    # ---- work accounting: rules 19, 20 with the pad ledger -------------------
    work_np = np.zeros((A, T), dtype=np.int8)
    cdef cnp.int8_t[:, ::1] work = work_np
    for a in range(A):
        for t in range(T):
            v = loc[a, t]
            if v >= N or (water_lo <= v < fire_hi):
                work[a, t] = 1
    rest_marks_np = np.zeros((A, T), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] rest_marks = rest_marks_np
    for a, node, te in rest_events:
        rest_marks[a, te] += 1

    consec_np = np.zeros((A, T), dtype=np.float64)
    pad_np = np.zeros((A, T), dtype=np.float64)
    cdef cnp.float64_t[:, ::1] consec = consec_np
    cdef cnp.float64_t[:, ::1] pad = pad_np
    cdef long long total_work, resets
    cdef double p, deficit
    for a in range(A):
        total_work = 0
        resets = 0
        p = 0.0
        for t in range(T):
            total_work += work[a, t]
            resets += rest_marks[a, t]
            deficit = <double> (mcf[a] * resets - cfi[a] - total_work)
            if deficit > p:
                p = deficit
            pad[a, t] = p
            consec[a, t] = cfi[a] + total_work + p - mcf[a] * resets
            if consec[a, t] > mcf[a]:
                violations.append((20, -1, a, -1, t + 1))
        if tf0[a] + total_work > mtf[a]:
            violations.append((19, -1, a, -1, -1))

    # ---- rest rules 22, 23 ----------------------------------------------------
    cdef Py_ssize_t need, l
    for a in range(A):
        for node, s, u in node_runs[a]:
            if not (base_lo <= node < base_hi) or s == 0:
                continue
            required_end = s + mr[a] - 1
            if required_end > T - 1:
                required_end = T - 1
            if u < required_end:
                violations.append((22, node, a, -1, s + 1))
        if 0 < ri[a] < mr[a]:
            need = mr[a] - ri[a]
            if need > T:
                need = T
            for l in range(need):
                if loc[a, l] != sp[a]:
                    violations.append((23, sp[a], a, -1, l + 1))
                    break

    # ---- endpoints: rules 24, 25 ----------------------------------------------
    for a in range(A):
        v = loc[a, T - 1]
        if not (base_lo <= v < base_hi):
            violations.append((24, -1, a, -1, T))
        if loc[a, 0] != sp[a]:
            violations.append((25, sp[a], a, -1, 1))

    # ---- rule 31: arrivals at work nodes must be flown out again --------------
    cdef long e2
    cdef Py_ssize_t s2, j
    cdef bint departed
    for a in range(A):
        for e, s, u in flight_runs[a]:
            j = edge_head[e]
            if not (water_lo <= j < fire_hi):
                continue
            departed = False
            for e2, s2, _u2 in flight_runs[a]:
                if s2 > u and edge_tail[e2] == j:
                    departed = True
                    break
            if not departed:
                violations.append((31, j, a, -1, s + 1))

    # ---- trajectory rules 34-41 + change ledger --------------------------------
    cdef Py_ssize_t n_traj = enc.n_traj
    r_water_np = np.full((n_traj, T), -1, dtype=np.int64)
    r_fire_np = np.full((n_traj, T), -1, dtype=np.int64)
    cw_np = np.zeros((n_traj, T), dtype=np.int8)
    aux_np = np.zeros((n_traj, T), dtype=np.int8)
    cdef cnp.int64_t[:, ::1] r_water = r_water_np
    cdef cnp.int64_t[:, ::1] r_fire = r_fire_np
    cdef cnp.int8_t[:, ::1] cw = cw_np
    cdef cnp.int8_t[:, ::1] aux = aux_np

    cdef Py_ssize_t w, ptr_w, ptr_f
    cdef long cur_w, cur_f, assoc_w, assoc_f
    cdef bint must_w, must_f, can_w, can_f, do_w, do_f, window
    for w in range(n_traj):
        members = [a for a in range(A) if traj[a] == w]
        # the window recurrence runs even for memberless trajectories (their
        # windows open at evolutions and are never consumed)
        for t in range(T):
            seen = {}
            for a in members:
                v = loc[a, t]
                if water_lo <= v < fire_hi:
                    seen[v] = seen.get(v, 0) + 1
            for v, cnt in seen.items():
                if cnt > 1:
                    violations.append((40, v, -1, w, t + 1))

        series_w = [-1] * T
        series_f = [-1] * T
        cur_w = -1
        cur_f = -1
        for t in range(T):
            used_w = sorted({loc[a, t] for a in members if water_lo <= loc[a, t] < water_hi})
            used_f = sorted({loc[a, t] for a in members if fire_lo <= loc[a, t] < fire_hi})
            if used_w:
                cur_w = cur_w if cur_w in used_w else used_w[0]
                series_w[t] = cur_w
            if used_f:
                cur_f = cur_f if cur_f in used_f else used_f[0]
                series_f[t] = cur_f

        runs_w = _compress_usage(series_w)
        runs_f = _compress_usage(series_f)

        ptr_w = 1
        ptr_f = 1
        assoc_w = runs_w[0][0] if runs_w else -1
        assoc_f = runs_f[0][0] if runs_f else -1
        for t in range(T):
            if t >= 1:
                cw[w, t] = 1 if ev[t] == 1 else (1 if (cw[w, t - 1] and not aux[w, t - 1]) else 0)
            must_w = ptr_w < len(runs_w) and runs_w[ptr_w][1] == t
            must_f = ptr_f < len(runs_f) and runs_f[ptr_f][1] == t
            if must_w or must_f:
                can_w = ptr_w < len(runs_w) and runs_w[ptr_w - 1][2] < t
                can_f = ptr_f < len(runs_f) and runs_f[ptr_f - 1][2] < t
                do_w = must_w or (must_f and can_w)
                do_f = must_f or (must_w and can_f)
                window = cw[w, t] == 1
                if do_w:
                    if not window:
                        violations.append((35, runs_w[ptr_w][0], -1, w, t + 1))
                    assoc_w = runs_w[ptr_w][0]
                    ptr_w += 1
                if do_f:
                    if not window:
                        violations.append((35, runs_f[ptr_f][0], -1, w, t + 1))
                    assoc_f = runs_f[ptr_f][0]
                    ptr_f += 1
                if not window and t + 1 < T:
                    # consuming a window that was never open also breaks the
                    # window-accounting recurrence on the next interval
                    violations.append((37, -1, -1, w, t + 2))
                aux[w, t] = 1
            r_water[w, t] = assoc_w
            r_fire[w, t] = assoc_f

        for t in range(T):
            for a in members:
                v = loc[a, t]
                if water_lo <= v < water_hi and v != r_water[w, t]:
                    violations.append((41, v, a, w, t + 1))
                elif fire_lo <= v < fire_hi and v != r_fire[w, t]:
                    violations.append((41, v, a, w, t + 1))

    # ---- objective terms -------------------------------------------------------
    cdef double efficiency_raw = 0.0
    cdef long long flights_raw = 0
    cdef long long hover_raw = 0
    for a in range(A):
        for t in range(T):
            v = loc[a, t]
            if v >= N:
                flights_raw += 1
            elif water_lo <= v < fire_hi:
                hover_raw += 1
                if v >= fire_lo:
                    efficiency_raw += ef[v - fire_lo, t] * wc[a]
    cdef long long changes_raw = 0
    for w in range(n_traj):
        for t in range(T):
            changes_raw += aux[w, t]
    h1_np = np.zeros(T, dtype=np.int8)
    cdef cnp.int8_t[::1] h1 = h1_np
    cdef bint any_work
    cdef long long h1_sum = 0
    for t in range(1, T - 1):
        any_work = False
        for a in range(A):
            if work[a, t]:
                any_work = True
                break
        if not any_work:
            h1[t] = 1
            h1_sum += 1
    cdef double faux_sum = 0.0
    for a in range(A):
        faux_sum += pad[a, T - 1]

    violations.sort(key=lambda q: (q[0], q[4], q[2], q[1], q[3]))

    return {
        "violations": violations,
        "terms": (
            efficiency_raw, int(flights_raw), int(hover_raw), int(changes_raw),
            int(h1_sum), faux_sum,
        ),
        "load_events": [(a, n, te + 1) for a, n, te in load_events],
        "drop_events": [(a, n, te + 1) for a, n, te in drop_events],
        "rest_events": [(a, n, te + 1) for a, n, te in rest_events],
        "drawn": drawn_np,
        "remaining": remaining_np,
        "carried": carried_np,
        "consec": consec_np,
        "pad": pad_np,
        "h1": h1_np,
        "r_water": r_water_np,
        "r_fire": r_fire_np,
        "cw": cw_np,
        "aux": aux_np,
    }
