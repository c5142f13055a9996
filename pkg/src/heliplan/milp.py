"""Symbolic mixed-integer model of the full rulebook, LP-format emission, and
mechanical row checking of explicit variable assignments.

This module is the independent oracle: build_milp lays down every rule as a
linear row (plus the counter definitions as AUX-tagged equalities), and
check_assignment evaluates an assignment against each row with no knowledge
of schedule semantics. Cross-checking it against feasibility.check_schedule
is the core correctness property of the engine.

Conventions shared with the direct checker so the two describe the same
feasible set:
  - water draw is charged once per completed load (the counter definition
    uses load-completion events, not raw presence);
  - load/drop completion events sit on the departure interval, clamped to
    the horizon;
  - the minimum-rest row scales its requirement down when the rest window is
    cut off by the end of the horizon (interior rests keep the full minimum);
  - the node-association cap (rule 34) is one row per node class;
  - rule 22 drops the stray trailing factor from its reference form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from . import engine
from .encode import EncodedInstance, encode_instance, encode_schedule
from .feasibility import Violation, ViolationReport
from .model import Instance, Schedule, StructuralError, structural_errors

DEFAULT_ROW_LIMIT = 2_000_000
CHECK_TOLERANCE = 1e-6

LE, GE, EQ = "<=", ">=", "="


@dataclass
class Row:
    name: str
    rule: object  # int rule number or "AUX1".."AUX6"
    terms: list  # [(var_index, coef)]
    sense: str
    rhs: float


@dataclass
class MilpModel:
    var_names: list[str]
    var_kinds: list[str]  # "binary" | "continuous" | "free"
    var_index: dict[str, int]
    rows: list[Row]
    objective: list  # [(var_index, coef)]
    enc: EncodedInstance
    _matrix: Optional[tuple] = field(default=None, repr=False)

    @property
    def n_variables(self) -> int:
        return len(self.var_names)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def matrix(self):
        """Flat coefficient arrays for fast mechanical evaluation."""
        if self._matrix is None:
            row_ids = []
            cols = []
            coefs = []
            rhs = np.zeros(len(self.rows))
            for k, row in enumerate(self.rows):
                for idx, co in row.terms:
                    row_ids.append(k)
                    cols.append(idx)
                    coefs.append(co)
                rhs[k] = row.rhs
            self._matrix = (
                np.array(row_ids, dtype=np.int64),
                np.array(cols, dtype=np.int64),
                np.array(coefs, dtype=np.float64),
                rhs,
            )
        return self._matrix


class ModelSizeError(RuntimeError):
    pass


def _safe(token: str) -> str:
    return re.sub(r"[^A-Za-z0-9]", "_", token)


def build_milp(instance: Instance, row_limit: int = DEFAULT_ROW_LIMIT) -> MilpModel:
    """Lay down every variable and rule row for the instance."""
    enc = encode_instance(instance)
    T = enc.horizon
    A = enc.n_helis
    N = enc.n_nodes
    E = enc.n_edges
    W = enc.n_traj
    node = [_safe(n) for n in enc.node_ids]
    heli = [_safe(h) for h in enc.heli_ids]
    trajn = [_safe(w) for w in enc.traj_ids]
    if len(set(node)) != len(node) or len(set(heli)) != len(heli) or len(set(trajn)) != len(trajn):
        raise ValueError("node/helicopter/trajectory ids collide after name sanitizing")

    waters = range(enc.water_lo, enc.water_hi)
    fires = range(enc.fire_lo, enc.fire_hi)
    bases = range(enc.base_lo, enc.base_hi)
    work_nodes = range(enc.water_lo, enc.fire_hi)

    # rough row estimate before allocating anything big
    est = (
        N * T + 4 * (enc.water_hi - enc.water_lo) * T
        + 14 * (enc.fire_hi - enc.water_lo) * A * T
        + 3 * (enc.base_hi - enc.base_lo) * A * T
        + 4 * E * A * T
        + int(enc.lam.sum()) * T if E else 0
    )
    est += 2 * N * A * T + (enc.fire_hi - enc.water_lo) * W * T * 3 + 8 * W * T + 6 * A * T
    if est > row_limit:
        raise ModelSizeError(
            f"estimated {est} rows exceeds the limit of {row_limit}; "
            f"instance has {A} helicopters, {N} nodes, {E} edges, {T} intervals"
        )

    var_names: list[str] = []
    var_kinds: list[str] = []
    var_index: dict[str, int] = {}

    def add_var(name: str, kind: str) -> int:
        var_index[name] = len(var_names)
        var_names.append(name)
        var_kinds.append(kind)
        return var_index[name]

    # variable registry (1-based t in names)
    y = np.empty((N, A, T), dtype=np.int64)
    for i in range(N):
        for a in range(A):
            for t in range(T):
                y[i, a, t] = add_var(f"y_{node[i]}_{heli[a]}_{t + 1}", "binary")
    x = np.empty((E, A, T), dtype=np.int64)
    for e in range(E):
        en = f"{node[enc.edge_tail[e]]}_{node[enc.edge_head[e]]}"
        for a in range(A):
            for t in range(T):
                x[e, a, t] = add_var(f"x_{en}_{heli[a]}_{t + 1}", "binary")
    ev_rest = np.full((N, A, T), -1, dtype=np.int64)
    for b in bases:
        for a in range(A):
            for t in range(T):
                ev_rest[b, a, t] = add_var(f"e_{node[b]}_{heli[a]}_{t + 1}", "binary")
    ev_load = np.full((N, A, T), -1, dtype=np.int64)
    for c in waters:
        for a in range(A):
            for t in range(T):
                ev_load[c, a, t] = add_var(f"ec_{node[c]}_{heli[a]}_{t + 1}", "binary")
    ev_drop = np.full((N, A, T), -1, dtype=np.int64)
    for i in fires:
        for a in range(A):
            for t in range(T):
                ev_drop[i, a, t] = add_var(f"ed_{node[i]}_{heli[a]}_{t + 1}", "binary")
    r = np.full((N, W, T), -1, dtype=np.int64)
    for i in work_nodes:
        for w in range(W):
            for t in range(T):
                r[i, w, t] = add_var(f"r_{node[i]}_{trajn[w]}_{t + 1}", "binary")
    cw = np.empty((W, T), dtype=np.int64)
    aux = np.empty((W, T), dtype=np.int64)
    for w in range(W):
        for t in range(T):
            cw[w, t] = add_var(f"cw_{trajn[w]}_{t + 1}", "binary")
    for w in range(W):
        for t in range(T):
            aux[w, t] = add_var(f"aux_{trajn[w]}_{t + 1}", "binary")
    h1 = np.array([add_var(f"h1_{t + 1}", "continuous") for t in range(T)], dtype=np.int64)
    faux = np.empty((A, T), dtype=np.int64)
    for a in range(A):
        for t in range(T):
            faux[a, t] = add_var(f"faux_{heli[a]}_{t + 1}", "continuous")
    cnta = np.empty((enc.water_hi - enc.water_lo, T), dtype=np.int64)
    ca = np.empty_like(cnta)
    for c in waters:
        ci = c - enc.water_lo
        for t in range(T):
            cnta[ci, t] = add_var(f"cnta_{node[c]}_{t + 1}", "continuous")
    for c in waters:
        ci = c - enc.water_lo
        for t in range(T):
            ca[ci, t] = add_var(f"ca_{node[c]}_{t + 1}", "free")
    z = np.empty((A, T), dtype=np.int64)
    cntv = np.empty((A, T), dtype=np.int64)
    for a in range(A):
        for t in range(T):
            z[a, t] = add_var(f"z_{heli[a]}_{t + 1}", "free")
    for a in range(A):
        for t in range(T):
            cntv[a, t] = add_var(f"cntv_{heli[a]}_{t + 1}", "free")

    rows: list[Row] = []

    def add(name, rule, terms, sense, rhs):
        rows.append(Row(name=name, rule=rule, terms=terms, sense=sense, rhs=float(rhs)))

    wc = enc.wc
    mr = enc.mr
    mcf = enc.mcf
    mtf = enc.mtf
    cfi = enc.cfi
    tf0 = enc.tf0
    ri = enc.ri
    alpha = enc.alpha
    ev = enc.ev

    in_edges = [[] for _ in range(N)]
    out_edges = [[] for _ in range(N)]
    for e in range(E):
        out_edges[enc.edge_tail[e]].append(e)
        in_edges[enc.edge_head[e]].append(e)

    # 1-2: node capacities
    for b in bases:
        for t in range(T):
            add(f"c1_{node[b]}_t{t + 1}", 1, [(int(y[b, a, t]), 1.0) for a in range(A)],
                LE, enc.base_cap[b - enc.base_lo])
    for c in waters:
        for t in range(T):
            add(f"c2_{node[c]}_t{t + 1}", 2, [(int(y[c, a, t]), 1.0) for a in range(A)],
                LE, enc.water_slots[c - enc.water_lo])

    # 3-4: water stock
    for c in waters:
        ci = c - enc.water_lo
        for t in range(1, T):
            terms = [(int(y[c, a, t]), float(wc[a])) for a in range(A)]
            terms.append((int(ca[ci, t]), -1.0))
            add(f"c3_{node[c]}_t{t + 1}", 3, terms, LE, 0.0)
        add(f"c4_{node[c]}", 4, [(int(y[c, a, 0]), float(wc[a])) for a in range(A)],
            LE, enc.water_cap[ci])

    # 5-6: water on board vs node kind
    for a in range(A):
        for t in range(T):
            for i in fires:
                add(f"c5_{node[i]}_{heli[a]}_t{t + 1}", 5,
                    [(int(y[i, a, t]), 1.0), (int(z[a, t]), -1.0)], LE, 0.0)
            for c in waters:
                add(f"c6_{node[c]}_{heli[a]}_t{t + 1}", 6,
                    [(int(y[c, a, t]), 1.0), (int(z[a, t]), 1.0)], LE, 1.0)

    # 7-9: stay lengths and completion events
    for a in range(A):
        for i in work_nodes:
            dur = int(alpha[a, i])
            evar = ev_load if enc.is_water(i) else ev_drop
            rule_ev = 9 if enc.is_water(i) else 8
            for t in range(1, T):
                if dur > 1:
                    for l in range(t + 1, min(T - 1, t + dur - 1) + 1):
                        add(f"c7_{node[i]}_{heli[a]}_t{t + 1}_l{l + 1}", 7,
                            [(int(y[i, a, t]), 1.0), (int(y[i, a, t - 1]), -1.0),
                             (int(y[i, a, l]), -1.0)], LE, 0.0)
                te = min(T - 1, t + dur)
                add(f"c{rule_ev}_{node[i]}_{heli[a]}_t{t + 1}", rule_ev,
                    [(int(y[i, a, t]), 1.0), (int(y[i, a, t - 1]), -1.0),
                     (int(evar[i, a, te]), -1.0)], LE, 0.0)

    # 10-12: rest events
    for b in bases:
        for a in range(A):
            for t in range(1, T):
                add(f"c10_{node[b]}_{heli[a]}_t{t + 1}", 10,
                    [(int(y[b, a, t - 1]), 1.0), (int(y[b, a, t]), -1.0),
                     (int(ev_rest[b, a, t - 1]), -1.0)], LE, 0.0)
                add(f"c12_{node[b]}_{heli[a]}_t{t + 1}", 12,
                    [(int(y[b, a, t]), 1.0), (int(ev_rest[b, a, t - 1]), 1.0)], LE, 1.0)
            for t in range(T):
                add(f"c11_{node[b]}_{heli[a]}_t{t + 1}", 11,
                    [(int(ev_rest[b, a, t]), 1.0), (int(y[b, a, t]), -1.0)], LE, 0.0)

    # 13-18: load/drop event placement
    for kind, nodes_r, evar, base_rule in (("c", waters, ev_load, 13), ("i", fires, ev_drop, 16)):
        for i in nodes_r:
            for a in range(A):
                for t in range(1, T):
                    add(f"c{base_rule}_{node[i]}_{heli[a]}_t{t + 1}", base_rule,
                        [(int(y[i, a, t - 1]), 1.0), (int(y[i, a, t]), -1.0),
                         (int(evar[i, a, t]), -1.0)], LE, 0.0)
                    add(f"c{base_rule + 1}_{node[i]}_{heli[a]}_t{t + 1}", base_rule + 1,
                        [(int(evar[i, a, t]), 1.0), (int(y[i, a, t - 1]), -1.0)], LE, 0.0)
                    add(f"c{base_rule + 2}_{node[i]}_{heli[a]}_t{t + 1}", base_rule + 2,
                        [(int(y[i, a, t]), 1.0), (int(evar[i, a, t]), 1.0)], LE, 1.0)

    # 19: daily budget
    for a in range(A):
        terms = [(int(x[e, a, t]), 1.0) for e in range(E) for t in range(T)]
        terms += [(int(y[i, a, t]), 1.0) for i in work_nodes for t in range(T)]
        add(f"c19_{heli[a]}", 19, terms, LE, mtf[a] - tf0[a])

    # 20-21: consecutive-work counter window
    for a in range(A):
        for t in range(T):
            add(f"c20_{heli[a]}_t{t + 1}", 20, [(int(cntv[a, t]), 1.0)], LE, mcf[a])
            add(f"c21_{heli[a]}_t{t + 1}", 21, [(int(cntv[a, t]), 1.0)], GE, 0.0)

    # 22: minimum rest once a stay begins (window clipped at the horizon)
    for b in bases:
        for a in range(A):
            for t in range(1, T):
                m = min(int(mr[a]), T - t)
                terms = [(int(y[b, a, l]), 1.0) for l in range(t, t + m)]
                terms.append((int(y[b, a, t]), -float(m)))
                terms.append((int(y[b, a, t - 1]), float(m)))
                terms.append((int(ev_rest[b, a, t - 1]), -float(m)))
                add(f"c22_{node[b]}_{heli[a]}_t{t + 1}", 22, terms, GE, 0.0)

    # 23: pending initial rest completes at the start position
    for a in range(A):
        if 0 < ri[a] < mr[a]:
            need = min(T, int(mr[a] - ri[a]))
            add(f"c23_{heli[a]}", 23,
                [(int(y[enc.sp[a], a, l]), 1.0) for l in range(need)], GE, mr[a] - ri[a])

    # 24-25: endpoints
    for a in range(A):
        add(f"c24_{heli[a]}", 24, [(int(y[b, a, T - 1]), 1.0) for b in bases], GE, 1.0)
        add(f"c25_{heli[a]}", 25, [(int(y[enc.sp[a], a, 0]), 1.0)], EQ, 1.0)

    # 26-33: movement continuity
    for e in range(E):
        i, j = int(enc.edge_tail[e]), int(enc.edge_head[e])
        for a in range(A):
            lam = int(enc.lam[a, e])
            for t in range(1, T):
                add(f"c26_{node[i]}_{node[j]}_{heli[a]}_t{t + 1}", 26,
                    [(int(y[j, a, min(T - 1, t + lam)]), 1.0), (int(x[e, a, t]), -1.0),
                     (int(x[e, a, t - 1]), 1.0)], GE, 0.0)
                add(f"c27_{node[i]}_{node[j]}_{heli[a]}_t{t + 1}", 27,
                    [(int(x[e, a, t]), 1.0), (int(x[e, a, t - 1]), -1.0),
                     (int(y[i, a, t - 1]), -1.0)], LE, 0.0)
                for l in range(t, min(T - 1, t + lam - 1) + 1):
                    add(f"c30_{node[i]}_{node[j]}_{heli[a]}_t{t + 1}_l{l + 1}", 30,
                        [(int(x[e, a, t]), 1.0), (int(x[e, a, t - 1]), -1.0),
                         (int(x[e, a, l]), -1.0)], LE, 0.0)
    for j in range(enc.start_hi, N):  # every node except start positions
        for a in range(A):
            for t in range(1, T):
                terms = [(int(y[j, a, t]), 1.0), (int(y[j, a, t - 1]), -1.0)]
                terms += [(int(x[e, a, t - 1]), -1.0) for e in in_edges[j]]
                add(f"c28_{node[j]}_{heli[a]}_t{t + 1}", 28, terms, LE, 0.0)
    for i in range(N):
        for a in range(A):
            for t in range(T - 1):
                terms = [(int(y[i, a, t]), 1.0), (int(y[i, a, t + 1]), -1.0)]
                terms += [(int(x[e, a, t + 1]), -1.0) for e in out_edges[i]]
                add(f"c29_{node[i]}_{heli[a]}_t{t + 1}", 29, terms, LE, 0.0)
    for j in range(N):
        is_work = enc.water_lo <= j < enc.fire_hi
        is_base = enc.base_lo <= j < enc.base_hi
        if not (is_work or is_base):
            continue
        rule = 32 if is_base else 31
        for a in range(A):
            for t in range(T):
                terms = [(int(x[e, a, t]), 1.0) for e in in_edges[j]]
                if not terms:
                    continue
                for e in out_edges[j]:
                    for l in range(t + 1, T):
                        terms.append((int(x[e, a, l]), -1.0))
                if is_base:
                    for l in range(t + 1, T):
                        terms.append((int(y[j, a, l]), -1.0))
                add(f"c{rule}_{node[j]}_{heli[a]}_t{t + 1}", rule, terms, LE, 0.0)
    for a in range(A):
        for t in range(T):
            terms = [(int(y[i, a, t]), 1.0) for i in range(N)]
            terms += [(int(x[e, a, t]), 1.0) for e in range(E)]
            add(f"c33_{heli[a]}_t{t + 1}", 33, terms, LE, 1.0)

    # 34-41: trajectory machinery (association cap split per node class)
    for w in range(W):
        for t in range(T):
            add(f"c34w_{trajn[w]}_t{t + 1}", 34,
                [(int(r[c, w, t]), 1.0) for c in waters], LE, 1.0)
            add(f"c34f_{trajn[w]}_t{t + 1}", 34,
                [(int(r[i, w, t]), 1.0) for i in fires], LE, 1.0)
        for i in work_nodes:
            for t in range(1, T):
                add(f"c35_{node[i]}_{trajn[w]}_t{t + 1}", 35,
                    [(int(r[i, w, t - 1]), 1.0), (int(r[i, w, t]), -1.0),
                     (int(cw[w, t]), -1.0)], LE, 0.0)
                add(f"c36_{node[i]}_{trajn[w]}_t{t + 1}", 36,
                    [(int(r[i, w, t]), 1.0), (int(r[i, w, t - 1]), -1.0),
                     (int(aux[w, t]), -1.0)], LE, 0.0)
        for t in range(1, T):
            add(f"c37_{trajn[w]}_t{t + 1}", 37,
                [(int(cw[w, t]), 1.0), (int(cw[w, t - 1]), -1.0),
                 (int(aux[w, t - 1]), 1.0)], LE, float(ev[t]))
            add(f"c38_{trajn[w]}_t{t + 1}", 38,
                [(int(cw[w, t]), 1.0), (int(cw[w, t - 1]), -1.0),
                 (int(aux[w, t - 1]), 1.0)], GE, 0.0)
            add(f"c39_{trajn[w]}_t{t + 1}", 39, [(int(cw[w, t]), 1.0)], GE, float(ev[t]))
    members = [[a for a in range(A) if enc.traj[a] == w] for w in range(W)]
    for w in range(W):
        for i in work_nodes:
            for t in range(T):
                add(f"c40_{node[i]}_{trajn[w]}_t{t + 1}", 40,
                    [(int(y[i, a, t]), 1.0) for a in members[w]], LE, 1.0)
                for a in members[w]:
                    add(f"c41_{node[i]}_{trajn[w]}_{heli[a]}_t{t + 1}", 41,
                        [(int(y[i, a, t]), 1.0), (int(r[i, w, t]), -1.0)], LE, 0.0)

    # 42: somebody should be working (soft via the h1 slack)
    for t in range(1, T - 1):
        terms = [(int(x[e, a, t]), 1.0) for e in range(E) for a in range(A)]
        terms += [(int(y[k, a, t]), 1.0) for k in work_nodes for a in range(A)]
        terms.append((int(h1[t]), 1.0))
        add(f"c42_t{t + 1}", 42, terms, GE, 1.0)

    # 43: pad is nondecreasing
    for a in range(A):
        for t in range(1, T):
            add(f"c43_{heli[a]}_t{t + 1}", 43,
                [(int(faux[a, t]), 1.0), (int(faux[a, t - 1]), -1.0)], GE, 0.0)

    # 44-48: initial values
    for b in bases:
        for a in range(A):
            add(f"c44_{node[b]}_{heli[a]}", 44, [(int(ev_rest[b, a, 0]), 1.0)], EQ, 0.0)
    for c in waters:
        for a in range(A):
            add(f"c45_{node[c]}_{heli[a]}", 45, [(int(ev_load[c, a, 0]), 1.0)], EQ, 0.0)
    for i in fires:
        for a in range(A):
            add(f"c46_{node[i]}_{heli[a]}", 46, [(int(ev_drop[i, a, 0]), 1.0)], EQ, 0.0)
    for w in range(W):
        add(f"c47_{trajn[w]}", 47, [(int(aux[w, 0]), 1.0)], EQ, 0.0)
        add(f"c48_{trajn[w]}", 48, [(int(cw[w, 0]), 1.0)], EQ, 0.0)

    # AUX1-AUX6: counter definitions (incremental equalities)
    for c in waters:
        ci = c - enc.water_lo
        t0 = [(int(cnta[ci, 0]), 1.0)] + [(int(ev_load[c, a, 0]), -float(wc[a])) for a in range(A)]
        add(f"aux1_{node[c]}_t1", "AUX1", t0, EQ, 0.0)
        for t in range(1, T):
            terms = [(int(cnta[ci, t]), 1.0), (int(cnta[ci, t - 1]), -1.0)]
            terms += [(int(ev_load[c, a, t]), -float(wc[a])) for a in range(A)]
            add(f"aux1_{node[c]}_t{t + 1}", "AUX1", terms, EQ, 0.0)
        add(f"aux3_{node[c]}", "AUX3", [(int(ca[ci, 0]), 1.0)], EQ, enc.water_cap[ci])
        for t in range(1, T):
            add(f"aux2_{node[c]}_t{t + 1}", "AUX2",
                [(int(ca[ci, t]), 1.0), (int(cnta[ci, t - 1]), 1.0)], EQ, enc.water_cap[ci])
    for a in range(A):
        add(f"aux5_{heli[a]}", "AUX5", [(int(z[a, 0]), 1.0)], EQ, enc.wli[a])
        for t in range(1, T):
            terms = [(int(z[a, t]), 1.0), (int(z[a, t - 1]), -1.0)]
            terms += [(int(ev_load[c, a, t]), -1.0) for c in waters]
            terms += [(int(ev_drop[i, a, t]), 1.0) for i in fires]
            add(f"aux4_{heli[a]}_t{t + 1}", "AUX4", terms, EQ, 0.0)
    for a in range(A):
        t0 = [(int(cntv[a, 0]), 1.0), (int(faux[a, 0]), -1.0)]
        t0 += [(int(x[e, a, 0]), -1.0) for e in range(E)]
        t0 += [(int(y[i, a, 0]), -1.0) for i in work_nodes]
        t0 += [(int(ev_rest[b, a, 0]), float(mcf[a])) for b in bases]
        add(f"aux6_{heli[a]}_t1", "AUX6", t0, EQ, float(cfi[a]))
        for t in range(1, T):
            terms = [(int(cntv[a, t]), 1.0), (int(cntv[a, t - 1]), -1.0)]
            terms += [(int(faux[a, t]), -1.0), (int(faux[a, t - 1]), 1.0)]
            terms += [(int(x[e, a, t]), -1.0) for e in range(E)]
            terms += [(int(y[i, a, t]), -1.0) for i in work_nodes]
            terms += [(int(ev_rest[b, a, t]), float(mcf[a])) for b in bases]
            add(f"aux6_{heli[a]}_t{t + 1}", "AUX6", terms, EQ, 0.0)

    # objective: maximize normalized efficiency minus weighted penalties
    from .objective import compute_normalizers

    weights = instance.weights
    norms = weights.normalizers or compute_normalizers(instance)
    objective = []
    for i in fires:
        fi = i - enc.fire_lo
        for a in range(A):
            for t in range(T):
                coef = float(enc.ef[fi, t]) * wc[a] / norms.efficiency
                if coef:
                    objective.append((int(y[i, a, t]), coef))
    for e in range(E):
        for a in range(A):
            for t in range(T):
                objective.append((int(x[e, a, t]), -weights.flights / norms.flights))
    for i in work_nodes:
        for a in range(A):
            for t in range(T):
                objective.append((int(y[i, a, t]), -weights.hover / norms.hover))
    for w in range(W):
        for t in range(T):
            objective.append((int(aux[w, t]), -weights.changes / norms.changes))
    for t in range(T):
        objective.append((int(h1[t]), -weights.idle))
    for a in range(A):
        objective.append((int(faux[a, T - 1]), -weights.pad))

    return MilpModel(
        var_names=var_names,
        var_kinds=var_kinds,
        var_index=var_index,
        rows=rows,
        objective=objective,
        enc=enc,
    )


def emit_lp(model: MilpModel) -> str:
    """Serialize to LP format (Maximize / Subject To / Bounds / Binaries).

    Deterministic: emitting the same model twice yields identical bytes.
    """
    out = []
    out.append("\\ heliplan model export")
    out.append("\\ rule numbering follows docs/RULEBOOK.md; row names embed the rule")
    out.append("\\ rule 22 uses the corrected form (stray trailing factor removed)")
    out.append("Maximize")
    obj_acc: dict[int, float] = {}
    for idx, coef in model.objective:
        obj_acc[idx] = obj_acc.get(idx, 0.0) + coef
    parts = [" obj:"]
    for idx in sorted(obj_acc):
        coef = obj_acc[idx]
        if coef == 0.0:
            continue
        parts.append(f" {coef:+.17g} {model.var_names[idx]}")
    out.append("".join(parts))
    out.append("Subject To")
    for row in model.rows:
        acc: dict[int, float] = {}
        for idx, coef in row.terms:
            acc[idx] = acc.get(idx, 0.0) + coef
        body = " ".join(
            f"{acc[idx]:+.17g} {model.var_names[idx]}" for idx in sorted(acc) if acc[idx] != 0.0
        )
        if not body:
            body = "0 " + model.var_names[0]
        out.append(f" {row.name}: {body} {row.sense} {row.rhs:.17g}")
    out.append("Bounds")
    for name, kind in zip(model.var_names, model.var_kinds):
        if kind == "free":
            out.append(f" {name} free")
    out.append("Binaries")
    line: list[str] = []
    for name, kind in zip(model.var_names, model.var_kinds):
        if kind != "binary":
            continue
        line.append(name)
        if len(line) == 8:
            out.append(" " + " ".join(line))
            line = []
    if line:
        out.append(" " + " ".join(line))
    out.append("End")
    return "\n".join(out) + "\n"


def schedule_to_assignment(
    instance: Instance, schedule: Schedule, model: MilpModel | None = None
) -> dict[str, float]:
    """Map a structurally valid schedule onto the model's variables.

    Presence and flight variables come straight from the timeline; events,
    node associations, change windows, slacks and every counter come from the
    same derivations the direct checker uses, so the two oracles always see
    the same candidate.
    """
    if model is None:
        model = build_milp(instance)
    enc = model.enc
    errs = structural_errors(instance, schedule)
    if errs:
        raise StructuralError("; ".join(errs))
    loc = encode_schedule(enc, schedule)
    res = engine.sweep(enc, loc)

    T = enc.horizon
    node = [_safe(n) for n in enc.node_ids]
    heli = [_safe(h) for h in enc.heli_ids]
    trajn = [_safe(w) for w in enc.traj_ids]
    vals: dict[str, float] = {}

    for a in range(enc.n_helis):
        for t in range(T):
            v = int(loc[a, t])
            if v < enc.n_nodes:
                vals[f"y_{node[v]}_{heli[a]}_{t + 1}"] = 1.0
            else:
                e = v - enc.n_nodes
                en = f"{node[enc.edge_tail[e]]}_{node[enc.edge_head[e]]}"
                vals[f"x_{en}_{heli[a]}_{t + 1}"] = 1.0
    for a, n, t1 in res["rest_events"]:
        vals[f"e_{node[n]}_{heli[a]}_{t1}"] = 1.0
    for a, n, t1 in res["load_events"]:
        vals[f"ec_{node[n]}_{heli[a]}_{t1}"] = 1.0
    for a, n, t1 in res["drop_events"]:
        vals[f"ed_{node[n]}_{heli[a]}_{t1}"] = 1.0
    for w in range(enc.n_traj):
        for t in range(T):
            rw = int(res["r_water"][w, t])
            rf = int(res["r_fire"][w, t])
            if rw >= 0:
                vals[f"r_{node[rw]}_{trajn[w]}_{t + 1}"] = 1.0
            if rf >= 0:
                vals[f"r_{node[rf]}_{trajn[w]}_{t + 1}"] = 1.0
            if res["cw"][w, t]:
                vals[f"cw_{trajn[w]}_{t + 1}"] = 1.0
            if res["aux"][w, t]:
                vals[f"aux_{trajn[w]}_{t + 1}"] = 1.0
    for t in range(T):
        if res["h1"][t]:
            vals[f"h1_{t + 1}"] = 1.0
    for a in range(enc.n_helis):
        for t in range(T):
            p = float(res["pad"][a, t])
            if p:
                vals[f"faux_{heli[a]}_{t + 1}"] = p
            cv = float(res["consec"][a, t])
            if cv:
                vals[f"cntv_{heli[a]}_{t + 1}"] = cv
            zz = float(res["carried"][a, t])
            if zz:
                vals[f"z_{heli[a]}_{t + 1}"] = zz
    for c in range(enc.water_hi - enc.water_lo):
        cid = node[enc.water_lo + c]
        for t in range(T):
            d = float(res["drawn"][c, t])
            if d:
                vals[f"cnta_{cid}_{t + 1}"] = d
            rem = float(res["remaining"][c, t])
            if rem:
                vals[f"ca_{cid}_{t + 1}"] = rem
    return vals


def _assignment_vector(model: MilpModel, assignment: Mapping[str, float]) -> np.ndarray:
    v = np.zeros(model.n_variables)
    for name, value in assignment.items():
        idx = model.var_index.get(name)
        if idx is not None:
            v[idx] = value
    return v


def check_assignment(
    model: MilpModel,
    assignment: Mapping[str, float],
    tolerance: float = CHECK_TOLERANCE,
) -> ViolationReport:
    """Evaluate every row mechanically; missing variables read as 0.

    Rows for the soft idle slack (rule 42) are excluded from the report, as
    is the slack itself on the direct checker's side. Binary variables out of
    {0,1} (beyond tolerance) are reported under the tag "BND".
    """
    v = _assignment_vector(model, assignment)
    row_ids, cols, coefs, rhs = model.matrix()
    entries = []
    if len(cols):
        sums = np.bincount(row_ids, weights=coefs * v[cols], minlength=model.n_rows)
    else:
        sums = np.zeros(model.n_rows)
    for k, row in enumerate(model.rows):
        if row.rule == 42:
            continue
        lhs = float(sums[k])
        ok = (
            lhs <= row.rhs + tolerance
            if row.sense == LE
            else lhs >= row.rhs - tolerance
            if row.sense == GE
            else abs(lhs - row.rhs) <= tolerance
        )
        if not ok:
            entries.append(
                Violation(
                    rule=row.rule,
                    node=None,
                    helicopter=None,
                    trajectory=None,
                    interval=None,
                    message=f"row {row.name}: lhs {lhs:g} not {row.sense} {row.rhs:g}",
                )
            )
    for name, kind in zip(model.var_names, model.var_kinds):
        if kind != "binary":
            continue
        val = assignment.get(name, 0.0)
        if min(abs(val), abs(val - 1.0)) > tolerance:
            entries.append(
                Violation(
                    rule="BND", node=None, helicopter=None, trajectory=None,
                    interval=None, message=f"binary {name} has value {val:g}",
                )
            )
    entries.sort(key=lambda e: (str(e.rule), e.message))
    return ViolationReport(entries=tuple(entries))


def objective_value(model: MilpModel, assignment: Mapping[str, float]) -> float:
    v = _assignment_vector(model, assignment)
    return float(sum(coef * v[idx] for idx, coef in model.objective))
