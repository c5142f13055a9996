"""Rule-sweep kernel, pure-Python backend.

Evaluates every schedule rule against an encoded timeline in one pass and
returns violations, objective terms, derived events and ledgers. The compiled
backend (_sweep_cy) implements the same algorithm; tests hold the two to
identical output.

Rule numbers refer to the engine rulebook (docs/RULEBOOK.md). Rules that are
satisfied by construction on structurally valid timelines (event definitions,
movement continuity, counter definitions) are not re-checked here; the LP
oracle still carries them as explicit rows.

All interval indices in the returned structures are 1-based; internal loops
are 0-based.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def _compress_usage(series):
    """Collapse a per-interval usage series (node index or -1) into runs of
    distinct consecutive nodes: [(node, first_use, last_use)], gaps ignored."""
    runs = []
    for t, v in enumerate(series):
        if v < 0:
            continue
        if runs and runs[-1][0] == v:
            runs[-1][2] = t
        else:
            runs.append([v, t, t])
    return runs


def sweep(enc, loc_arr):
    T = enc.horizon
    A = enc.n_helis
    N = enc.n_nodes
    loc = [[int(v) for v in row] for row in loc_arr]
    ev = [int(v) for v in enc.ev]

    water_lo, water_hi = enc.water_lo, enc.water_hi
    fire_lo, fire_hi = enc.fire_lo, enc.fire_hi
    base_lo, base_hi = enc.base_lo, enc.base_hi
    n_water = water_hi - water_lo
    n_base = base_hi - base_lo
    wc = [int(v) for v in enc.wc]
    mr = [int(v) for v in enc.mr]
    mcf = [int(v) for v in enc.mcf]
    mtf = [int(v) for v in enc.mtf]
    cfi = [int(v) for v in enc.cfi]
    tf0 = [int(v) for v in enc.tf0]
    ri = [int(v) for v in enc.ri]
    wli = [int(v) for v in enc.wli]
    sp = [int(v) for v in enc.sp]
    traj = [int(v) for v in enc.traj]
    alpha = enc.alpha
    edge_tail = enc.edge_tail
    edge_head = enc.edge_head

    violations = []

    # ---- parse runs per helicopter -----------------------------------------
    # (a, node, s, u) 0-based inclusive bounds
    node_runs = [[] for _ in range(A)]
    flight_runs = [[] for _ in range(A)]
    for a in range(A):
        row = loc[a]
        t = 0
        while t < T:
            v = row[t]
            u = t
            while u + 1 < T and row[u + 1] == v:
                u += 1
            if 0 <= v < N:
                node_runs[a].append((v, t, u))
            elif v >= N:
                flight_runs[a].append((v - N, t, u))
            t = u + 1

    # ---- events -------------------------------------------------------------
    load_events = []  # (a, node, te) 0-based te
    drop_events = []
    rest_events = []
    ec_sets = [{} for _ in range(A)]  # node -> set of te
    ed_sets = [{} for _ in range(A)]
    for a in range(A):
        for node, s, u in node_runs[a]:
            if water_lo <= node < water_hi or fire_lo <= node < fire_hi:
                te = s + int(alpha[a, node])
                if te > T - 1:
                    te = T - 1
                if water_lo <= node < water_hi:
                    load_events.append((a, node, te))
                    ec_sets[a].setdefault(node, set()).add(te)
                else:
                    drop_events.append((a, node, te))
                    ed_sets[a].setdefault(node, set()).add(te)
            elif base_lo <= node < base_hi:
                if u < T - 1:
                    rest_events.append((a, node, u))

    # ---- occupancy counts: rules 1, 2 ---------------------------------------
    count_at = [[0] * T for _ in range(N)]
    for a in range(A):
        row = loc[a]
        for t in range(T):
            v = row[t]
            if 0 <= v < N:
                count_at[v][t] += 1
    for b in range(base_lo, base_hi):
        cap = int(enc.base_cap[b - base_lo])
        for t in range(T):
            if count_at[b][t] > cap:
                violations.append((1, b, -1, -1, t + 1))
    for c in range(water_lo, water_hi):
        slots = int(enc.water_slots[c - water_lo])
        for t in range(T):
            if count_at[c][t] > slots:
                violations.append((2, c, -1, -1, t + 1))

    # ---- water ledger + rules 3, 4 ------------------------------------------
    # Each completed load draws the helicopter's capacity once, at the load
    # completion interval.
    drawn = np.zeros((n_water, T), dtype=np.int64)
    for a, node, te in load_events:
        drawn[node - water_lo, te] += wc[a]
    drawn = np.cumsum(drawn, axis=1)
    remaining = np.zeros((n_water, T), dtype=np.int64)
    for ci in range(n_water):
        remaining[ci, 0] = enc.water_cap[ci]
        for t in range(1, T):
            remaining[ci, t] = enc.water_cap[ci] - drawn[ci, t - 1]
    for c in range(water_lo, water_hi):
        ci = c - water_lo
        for t in range(T):
            present = 0
            for a in range(A):
                if loc[a][t] == c:
                    present += wc[a]
            if t == 0:
                if present > int(enc.water_cap[ci]):
                    violations.append((4, c, -1, -1, 1))
            elif present > int(remaining[ci, t]):
                # with the stock overdrawn this fires even with nobody present
                violations.append((3, c, -1, -1, t + 1))

    # ---- carried-water ledger + rules 5, 6 ----------------------------------
    carried = np.zeros((A, T), dtype=np.int64)
    delta = [[0] * T for _ in range(A)]
    for a, _node, te in load_events:
        delta[a][te] += 1
    for a, _node, te in drop_events:
        delta[a][te] -= 1
    for a in range(A):
        z = wli[a]
        for t in range(T):
            if t > 0:
                z += delta[a][t]
            carried[a, t] = z
            v = loc[a][t]
            if fire_lo <= v < fire_hi and z < 1:
                violations.append((5, v, a, -1, t + 1))
            elif water_lo <= v < water_hi and z > 0:
                violations.append((6, v, a, -1, t + 1))

    # ---- stay-length and event-placement rules 7, 13-18 ---------------------
    for a in range(A):
        for node, s, u in node_runs[a]:
            is_water = water_lo <= node < water_hi
            is_fire = fire_lo <= node < fire_hi
            if not (is_water or is_fire):
                continue
            dur = int(alpha[a, node])
            if dur > 1:
                required_end = min(T - 1, s + dur - 1)
                if u < required_end:
                    violations.append((7, node, a, -1, s + 1))
            if u + 1 <= T - 1:  # departure interval exists
                events = (ec_sets if is_water else ed_sets)[a].get(node, ())
                if (u + 1) not in events:
                    violations.append((13 if is_water else 16, node, a, -1, u + 2))
        for node, te_set in ec_sets[a].items():
            for te in sorted(te_set):
                if loc[a][te - 1] != node:
                    violations.append((14, node, a, -1, te + 1))
                if loc[a][te] == node:
                    violations.append((15, node, a, -1, te + 1))
        for node, te_set in ed_sets[a].items():
            for te in sorted(te_set):
                if loc[a][te - 1] != node:
                    violations.append((17, node, a, -1, te + 1))
                if loc[a][te] == node:
                    violations.append((18, node, a, -1, te + 1))

    # ---- work accounting: rules 19, 20 with the pad ledger -------------------
    work = [[0] * T for _ in range(A)]
    for a in range(A):
        row = loc[a]
        for t in range(T):
            v = row[t]
            if v >= N or water_lo <= v < fire_hi:
                work[a][t] = 1
    rest_marks = [[0] * T for _ in range(A)]
    for a, _node, te in rest_events:
        rest_marks[a][te] += 1

    consec = np.zeros((A, T), dtype=np.float64)
    pad = np.zeros((A, T), dtype=np.float64)
    for a in range(A):
        total_work = 0
        resets = 0
        p = 0.0
        for t in range(T):
            total_work += work[a][t]
            resets += rest_marks[a][t]
            deficit = mcf[a] * resets - cfi[a] - total_work
            if deficit > p:
                p = float(deficit)
            pad[a, t] = p
            consec[a, t] = cfi[a] + total_work + p - mcf[a] * resets
            if consec[a, t] > mcf[a]:
                violations.append((20, -1, a, -1, t + 1))
        if tf0[a] + total_work > mtf[a]:
            violations.append((19, -1, a, -1, -1))

    # ---- rest rules 22, 23 ----------------------------------------------------
    for a in range(A):
        for node, s, u in node_runs[a]:
            if not (base_lo <= node < base_hi) or s == 0:
                continue
            required_end = min(T - 1, s + mr[a] - 1)
            if u < required_end:
                violations.append((22, node, a, -1, s + 1))
        if 0 < ri[a] < mr[a]:
            need = min(T, mr[a] - ri[a])
            for t in range(need):
                if loc[a][t] != sp[a]:
                    violations.append((23, sp[a], a, -1, t + 1))
                    break

    # ---- endpoints: rules 24, 25 ----------------------------------------------
    for a in range(A):
        v = loc[a][T - 1]
        if not (base_lo <= v < base_hi):
            violations.append((24, -1, a, -1, T))
        if loc[a][0] != sp[a]:
            violations.append((25, sp[a], a, -1, 1))

    # ---- rule 31: arrivals at work nodes must be flown out again --------------
    for a in range(A):
        for e, s, u in flight_runs[a]:
            j = int(edge_head[e])
            if not (water_lo <= j < fire_hi):
                continue
            departed = False
            for e2, s2, _u2 in flight_runs[a]:
                if s2 > u and int(edge_tail[e2]) == j:
                    departed = True
                    break
            if not departed:
                violations.append((31, j, a, -1, s + 1))

    # ---- trajectory rules 34-41 + change ledger --------------------------------
    n_traj = enc.n_traj
    r_water = np.full((n_traj, T), -1, dtype=np.int64)
    r_fire = np.full((n_traj, T), -1, dtype=np.int64)
    cw = np.zeros((n_traj, T), dtype=np.int8)
    aux = np.zeros((n_traj, T), dtype=np.int8)

    for w in range(n_traj):
        members = [a for a in range(A) if traj[a] == w]
        # the window recurrence runs even for memberless trajectories (their
        # windows open at evolutions and are never consumed)
        # rule 40: two members of one trajectory on the same work node
        for t in range(T):
            seen: dict[int, int] = {}
            for a in members:
                v = loc[a][t]
                if water_lo <= v < fire_hi:
                    seen[v] = seen.get(v, 0) + 1
            for v, cnt in seen.items():
                if cnt > 1:
                    violations.append((40, v, -1, w, t + 1))

        # canonical usage series per node class
        series_w = [-1] * T
        series_f = [-1] * T
        cur_w = -1
        cur_f = -1
        for t in range(T):
            used_w = sorted({loc[a][t] for a in members if water_lo <= loc[a][t] < water_hi})
            used_f = sorted({loc[a][t] for a in members if fire_lo <= loc[a][t] < fire_hi})
            if used_w:
                cur_w = cur_w if cur_w in used_w else used_w[0]
                series_w[t] = cur_w
            if used_f:
                cur_f = cur_f if cur_f in used_f else used_f[0]
                series_f[t] = cur_f

        runs_w = _compress_usage(series_w)
        runs_f = _compress_usage(series_f)

        # replay associations; a change of node is only legal inside an open
        # change window, and simultaneous pending changes share one window
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

        # rule 41: members must use the trajectory's associated nodes
        for t in range(T):
            for a in members:
                v = loc[a][t]
                if water_lo <= v < water_hi and v != r_water[w, t]:
                    violations.append((41, v, a, w, t + 1))
                elif fire_lo <= v < fire_hi and v != r_fire[w, t]:
                    violations.append((41, v, a, w, t + 1))

    # ---- objective terms -------------------------------------------------------
    efficiency_raw = 0.0
    flights_raw = 0
    hover_raw = 0
    for a in range(A):
        row = loc[a]
        for t in range(T):
            v = row[t]
            if v >= N:
                flights_raw += 1
            elif water_lo <= v < fire_hi:
                hover_raw += 1
                if v >= fire_lo:
                    efficiency_raw += float(enc.ef[v - fire_lo, t]) * wc[a]
    changes_raw = int(aux.sum())
    h1 = np.zeros(T, dtype=np.int8)
    for t in range(1, T - 1):
        if not any(work[a][t] for a in range(A)):
            h1[t] = 1
    h1_sum = int(h1.sum())
    faux_sum = float(pad[:, T - 1].sum()) if A else 0.0

    violations.sort(key=lambda v: (v[0], v[4], v[2], v[1], v[3]))

    return {
        "violations": violations,
        "terms": (efficiency_raw, flights_raw, hover_raw, changes_raw, h1_sum, faux_sum),
        "load_events": [(a, n, te + 1) for a, n, te in load_events],
        "drop_events": [(a, n, te + 1) for a, n, te in drop_events],
        "rest_events": [(a, n, te + 1) for a, n, te in rest_events],
        "drawn": drawn,
        "remaining": remaining,
        "carried": carried,
        "consec": consec,
        "pad": pad,
        "h1": h1,
        "r_water": r_water,
        "r_fire": r_fire,
        "cw": cw,
        "aux": aux,
    }
