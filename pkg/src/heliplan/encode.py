"""Numeric encoding of instances and schedules for the rule-sweep kernels.

Node indices are assigned contiguously in partition order: start positions,
water points, wildfire points, rest bases. A timeline cell holds the node
index when the helicopter sits at a node, n_nodes + edge index while it flies
that edge, and -1 for an unplaced hole.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import AtNode, Flying, Instance, Schedule


@dataclass(frozen=True)
class EncodedInstance:
    horizon: int
    n_nodes: int
    start_lo: int
    start_hi: int  # exclusive, and so on for the other partitions
    water_lo: int
    water_hi: int
    fire_lo: int
    fire_hi: int
    base_lo: int
    base_hi: int
    node_ids: tuple[str, ...]
    node_index: dict[str, int]
    ef: np.ndarray  # (n_fire, horizon) float64
    water_cap: np.ndarray  # (n_water,) int64, liters
    water_slots: np.ndarray  # (n_water,) int64
    base_cap: np.ndarray  # (n_base,) int64
    n_helis: int
    heli_ids: tuple[str, ...]
    wc: np.ndarray
    wli: np.ndarray
    cfi: np.ndarray
    tf0: np.ndarray
    mcf: np.ndarray
    mtf: np.ndarray
    ri: np.ndarray
    mr: np.ndarray
    sp: np.ndarray  # start node index per helicopter
    traj: np.ndarray  # trajectory index per helicopter
    n_traj: int
    traj_ids: tuple[str, ...]
    alpha: np.ndarray  # (n_helis, n_nodes) int64, 0 where not a load/drop node
    n_edges: int
    edge_tail: np.ndarray
    edge_head: np.ndarray
    lam: np.ndarray  # (n_helis, n_edges) int64
    edge_index: dict[tuple[int, int], int]
    ev: np.ndarray  # (horizon,) int8

    def is_water(self, v: int) -> bool:
        return self.water_lo <= v < self.water_hi

    def is_fire(self, v: int) -> bool:
        return self.fire_lo <= v < self.fire_hi

    def is_base(self, v: int) -> bool:
        return self.base_lo <= v < self.base_hi

    def is_start(self, v: int) -> bool:
        return self.start_lo <= v < self.start_hi


def encode_instance(inst: Instance) -> EncodedInstance:
    nodes = inst.all_nodes()
    node_ids = tuple(n.id for n in nodes)
    node_index = {nid: k for k, nid in enumerate(node_ids)}
    ns, nw, nf, nb = (
        len(inst.start_positions),
        len(inst.water_points),
        len(inst.wildfire_points),
        len(inst.rest_bases),
    )
    horizon = inst.grid.horizon_intervals
    n_nodes = ns + nw + nf + nb

    ef = np.zeros((nf, horizon), dtype=np.float64)
    for k, f in enumerate(inst.wildfire_points):
        ef[k, :] = f.efficiency_by_interval

    helis = inst.helicopters
    n_helis = len(helis)
    traj_ids = tuple(inst.trajectories)
    traj_pos = {w: k for k, w in enumerate(traj_ids)}

    alpha = np.zeros((n_helis, n_nodes), dtype=np.int64)
    for a, h in enumerate(helis):
        for nid, dur in h.load_or_drop_time.items():
            if nid in node_index:
                alpha[a, node_index[nid]] = dur

    n_edges = len(inst.edges)
    edge_tail = np.zeros(n_edges, dtype=np.int64)
    edge_head = np.zeros(n_edges, dtype=np.int64)
    lam = np.zeros((n_helis, n_edges), dtype=np.int64)
    edge_index: dict[tuple[int, int], int] = {}
    for k, e in enumerate(inst.edges):
        ti, hi = node_index[e.tail], node_index[e.head]
        edge_tail[k], edge_head[k] = ti, hi
        edge_index[(ti, hi)] = k
        for a, h in enumerate(helis):
            lam[a, k] = e.flight_time[h.id]

    return EncodedInstance(
        horizon=horizon,
        n_nodes=n_nodes,
        start_lo=0,
        start_hi=ns,
        water_lo=ns,
        water_hi=ns + nw,
        fire_lo=ns + nw,
        fire_hi=ns + nw + nf,
        base_lo=ns + nw + nf,
        base_hi=n_nodes,
        node_ids=node_ids,
        node_index=node_index,
        ef=ef,
        water_cap=np.array([w.initial_capacity_liters for w in inst.water_points], dtype=np.int64),
        water_slots=np.array(
            [w.simultaneous_helicopters for w in inst.water_points], dtype=np.int64
        ),
        base_cap=np.array([b.capacity for b in inst.rest_bases], dtype=np.int64),
        n_helis=n_helis,
        heli_ids=tuple(h.id for h in helis),
        wc=np.array([h.water_capacity_liters for h in helis], dtype=np.int64),
        wli=np.array([h.initial_water_loaded for h in helis], dtype=np.int64),
        cfi=np.array([h.consecutive_flight_so_far for h in helis], dtype=np.int64),
        tf0=np.array([h.total_flight_today for h in helis], dtype=np.int64),
        mcf=np.array([h.max_consecutive_flight for h in helis], dtype=np.int64),
        mtf=np.array([h.max_total_flight for h in helis], dtype=np.int64),
        ri=np.array([h.consecutive_rest_so_far for h in helis], dtype=np.int64),
        mr=np.array([h.min_rest for h in helis], dtype=np.int64),
        sp=np.array([node_index[h.start_node] for h in helis], dtype=np.int64),
        traj=np.array([traj_pos[h.trajectory_id] for h in helis], dtype=np.int64),
        n_traj=len(traj_ids),
        traj_ids=traj_ids,
        alpha=alpha,
        n_edges=n_edges,
        edge_tail=edge_tail,
        edge_head=edge_head,
        lam=lam,
        edge_index=edge_index,
        ev=np.array(inst.evolution, dtype=np.int8),
    )


def encode_schedule(enc: EncodedInstance, schedule: Schedule) -> np.ndarray:
    loc = np.full((enc.n_helis, enc.horizon), -1, dtype=np.int64)
    for a, row in enumerate(schedule.activities):
        for t, act in enumerate(row):
            if isinstance(act, AtNode):
                loc[a, t] = enc.node_index[act.node]
            elif isinstance(act, Flying):
                key = (enc.node_index[act.tail], enc.node_index[act.head])
                loc[a, t] = enc.n_nodes + enc.edge_index[key]
    return loc


def decode_schedule(enc: EncodedInstance, loc: np.ndarray) -> Schedule:
    from .model import UNPLACED, Schedule as Sched

    rows = []
    for a in range(enc.n_helis):
        cells = []
        for t in range(enc.horizon):
            v = int(loc[a, t])
            if v < 0:
                cells.append(UNPLACED)
            elif v < enc.n_nodes:
                cells.append(AtNode(enc.node_ids[v]))
            else:
                k = v - enc.n_nodes
                cells.append(Flying(enc.node_ids[enc.edge_tail[k]], enc.node_ids[enc.edge_head[k]]))
        rows.append(tuple(cells))
    return Sched(activities=tuple(rows))
