"""The B12 reference plan: a 10-helicopter, 8-hour, 5-minute-grid scenario
with a fully worked schedule whose score decomposition is pinned by the
published reference values. It anchors the objective calibration and the
Gantt/work-window rendering format.

The published work windows put each helicopter through three stints separated
by 40-minute rests. One window (h5's second) is shortened by one interval
here: the printed clock windows total 612 active intervals while the printed
term decomposition (349 flight + 262 hover intervals, pad 38) is only
consistent with 611, so the one-interval trim reconciles the two.
"""

from __future__ import annotations

import bisect

from .model import (
    AtNode,
    Edge,
    Flying,
    Helicopter,
    Instance,
    Normalizers,
    ObjectiveWeights,
    RestBase,
    Schedule,
    StartPosition,
    TimeGrid,
    WaterPoint,
    WildfireNode,
)

HORIZON = 96
INTERVAL_MINUTES = 5
START_CLOCK = "10:00"

#: published raw score terms and total for the reference plan
PUBLISHED_TERMS = {
    "efficiency_raw": 2_162_400,
    "flights_raw": 349,
    "hover_raw": 262,
    "changes_raw": 11,
    "faux_sum": 38,
    "total": 9.7548,
}

#: published drops per helicopter (sums to 131)
PUBLISHED_DROPS = {
    "h1": 14, "h2": 15, "h3": 14, "h4": 10, "h5": 12,
    "h6": 13, "h7": 12, "h8": 13, "h9": 14, "h10": 14,
}

#: work windows as (start interval, end interval, drops), 1-based inclusive;
#: the spans include the outbound and return flights
WINDOWS = {
    "h1": ((6, 29, 5), (38, 59, 5), (68, 88, 4)),
    "h2": ((12, 35, 5), (44, 64, 5), (73, 93, 5)),
    "h3": ((18, 41, 5), (50, 70, 5), (79, 95, 4)),
    "h4": ((29, 50, 5), (59, 80, 4), (89, 95, 1)),
    "h5": ((21, 42, 5), (51, 70, 4), (80, 92, 3)),
    "h6": ((19, 41, 5), (50, 70, 5), (79, 95, 3)),
    "h7": ((22, 44, 5), (53, 73, 5), (82, 95, 2)),
    "h8": ((17, 39, 5), (48, 68, 5), (77, 93, 3)),
    "h9": ((5, 27, 5), (36, 56, 5), (65, 85, 4)),
    "h10": ((2, 24, 5), (35, 55, 5), (64, 84, 4)),
}

HELI_IDS = tuple(WINDOWS)
TRAJ_OF = {h: ("w1" if k < 4 else "w2" if k < 8 else "w3") for k, h in enumerate(HELI_IDS)}
LOAD_OF = {"w1": "c1", "w2": "c2", "w3": "c3"}

#: epoch starts (five evolutions -> six 16-interval epochs)
EPOCH_STARTS = (1, 17, 33, 49, 65, 81)

#: drop node per trajectory per epoch; repeats mark epochs without a change
#: (11 change events in total across the three trajectories)
DROP_SEQUENCE = {
    "w1": ("f1", "f2", "f3", "f4", "f5", "f5"),
    "w2": ("f6", "f6", "f7", "f8", "f9", "f10"),
    "w3": ("f11", "f11", "f12", "f13", "f14", "f14"),
}

N_FIRE_NODES = 30  # five nodes per stage, six stages; unused ones stay at zero

WATER_IDS = tuple(f"c{k}" for k in range(1, 11))
BASE_IDS = ("b1", "b2", "b3", "b4", "b5")
SESSION_BASE = ("b1", "b2", "b3")  # rest base after the first/second/third stint

MCF = 24  # 120 min of consecutive work
MR = 8  # 40 min minimum rest
WC = {h: (1656 if h == "h2" else 1650) for h in HELI_IDS}

MU = dict(flights=0.1, hover=0.05, changes=0.01, idle=0.005, pad=0.001)


def _epoch_of(interval: int) -> int:
    return bisect.bisect_right(EPOCH_STARTS, interval) - 1


def calibrated_normalizers() -> Normalizers:
    """Normalizers fitted so the published raw terms give the published total.

    The flight/hover/change normalizers use the stock fleet-times-horizon and
    trajectories-times-horizon forms; the efficiency normalizer is solved from
    the score equation, since the reference decomposition pins it uniquely
    once the weights are fixed.
    """
    flights_norm = 10.0 * HORIZON
    hover_norm = 10.0 * HORIZON
    changes_norm = 3.0 * HORIZON
    t = PUBLISHED_TERMS
    residual = (
        t["total"]
        + MU["pad"] * t["faux_sum"]
        + MU["flights"] * t["flights_raw"] / flights_norm
        + MU["hover"] * t["hover_raw"] / hover_norm
        + MU["changes"] * t["changes_raw"] / changes_norm
    )
    return Normalizers(
        efficiency=t["efficiency_raw"] / residual,
        flights=flights_norm,
        hover=hover_norm,
        changes=changes_norm,
    )


def _solve_departure_legs() -> dict[tuple[str, int], int]:
    """Split each window's flight budget between the outbound and return legs
    so that no two members of a trajectory ever load (or drop) at the same
    interval. Deterministic backtracking over the outbound choices."""
    by_traj: dict[str, list[tuple[str, int, int, int, int, int]]] = {}
    for hid, windows in WINDOWS.items():
        for widx, (s, e, d) in enumerate(windows):
            span = e - s + 1
            budget = span - 4 * d + 1
            assert budget >= 2, (hid, widx)
            by_traj.setdefault(TRAJ_OF[hid], []).append((hid, widx, s, e, d, budget))

    chosen: dict[tuple[str, int], int] = {}

    def load_instants(s, dep, d):
        return [s + dep + 4 * k for k in range(d)]

    for traj, items in by_traj.items():
        taken: set[int] = set()
        stack: list[tuple[int, list[int]]] = []
        idx = 0
        options = list(range(1, items[0][5]))
        while idx < len(items):
            hid, widx, s, e, d, budget = items[idx]
            placed = False
            while options:
                dep = options.pop(0)
                instants = load_instants(s, dep, d)
                if all(i not in taken for i in instants):
                    chosen[(hid, widx)] = dep
                    taken.update(instants)
                    stack.append((idx, instants))
                    idx += 1
                    if idx < len(items):
                        options = list(range(1, items[idx][5]))
                    placed = True
                    break
            if not placed:
                if not stack:
                    raise RuntimeError(f"no collision-free leg split for {traj}")
                back_idx, instants = stack.pop()
                taken.difference_update(instants)
                hid_b, widx_b, s_b, _e, d_b, budget_b = items[back_idx]
                last = chosen.pop((hid_b, widx_b))
                idx = back_idx
                options = [v for v in range(last + 1, budget_b)]
    return chosen


def published_b12() -> tuple[Instance, Schedule]:
    """Build the reference instance and its worked schedule."""
    legs = _solve_departure_legs()
    fire_ids = [f"f{k}" for k in range(1, N_FIRE_NODES + 1)]
    edge_req: dict[tuple[str, str], dict[str, int]] = {}

    def require(tail, head, hid, lam):
        slot = edge_req.setdefault((tail, head), {})
        if slot.get(hid, lam) != lam:
            raise RuntimeError(f"conflicting flight time on {(tail, head)} for {hid}")
        slot[hid] = lam

    rows: dict[str, list] = {}
    for hid, windows in WINDOWS.items():
        traj = TRAJ_OF[hid]
        load = LOAD_OF[traj]
        row: list = []
        origin = "sp"
        for widx, (s, e, d) in enumerate(windows):
            dep = legs[(hid, widx)]
            ret = (e - s + 1) - 4 * d + 1 - dep
            while len(row) < s - 1:
                row.append(AtNode(origin))
            require(origin, load, hid, dep)
            row.extend([Flying(origin, load)] * dep)
            for k in range(d):
                row.append(AtNode(load))
                drop_t = len(row) + 2  # 1-based interval of the drop stay
                node = DROP_SEQUENCE[traj][_epoch_of(drop_t)]
                require(load, node, hid, 1)
                row.append(Flying(load, node))
                row.append(AtNode(node))
                if k < d - 1:
                    require(node, load, hid, 1)
                    row.append(Flying(node, load))
                else:
                    base = SESSION_BASE[widx]
                    require(node, base, hid, ret)
                    row.extend([Flying(node, base)] * ret)
                    origin = base
            assert len(row) == e, (hid, widx, len(row), e)
        while len(row) < HORIZON:
            row.append(AtNode(origin))
        rows[hid] = row

    # efficiency: a drop node scores top marks exactly over its assigned epochs
    active_epochs: dict[str, set[int]] = {}
    for traj, seq in DROP_SEQUENCE.items():
        for ep, node in enumerate(seq):
            active_epochs.setdefault(node, set()).add(ep)
    ef_rows = {}
    for fid in fire_ids:
        row = [0.0] * HORIZON
        for ep in active_epochs.get(fid, ()):
            lo = EPOCH_STARTS[ep]
            hi = EPOCH_STARTS[ep + 1] - 1 if ep + 1 < len(EPOCH_STARTS) else HORIZON
            for t in range(lo, hi + 1):
                row[t - 1] = 10.0
        ef_rows[fid] = tuple(row)

    evolution = [0] * HORIZON
    for es in EPOCH_STARTS[1:]:
        evolution[es - 1] = 1

    helis = tuple(
        Helicopter(
            id=hid,
            start_node="sp",
            water_capacity_liters=WC[hid],
            initial_water_loaded=0,
            consecutive_flight_so_far=0,
            total_flight_today=0,
            max_consecutive_flight=MCF,
            max_total_flight=HORIZON,
            consecutive_rest_so_far=0,
            min_rest=MR,
            trajectory_id=TRAJ_OF[hid],
            load_or_drop_time={n: 1 for n in list(WATER_IDS) + fire_ids},
        )
        for hid in HELI_IDS
    )
    edges = tuple(
        Edge(
            tail=tail,
            head=head,
            flight_time={hid: req.get(hid, 1) for hid in HELI_IDS},
        )
        for (tail, head), req in sorted(edge_req.items())
    )
    instance = Instance(
        grid=TimeGrid(
            interval_minutes=INTERVAL_MINUTES,
            horizon_intervals=HORIZON,
            start_clock=START_CLOCK,
        ),
        start_positions=(StartPosition(id="sp"),),
        water_points=tuple(
            WaterPoint(id=c, initial_capacity_liters=1_000_000, simultaneous_helicopters=4)
            for c in WATER_IDS
        ),
        wildfire_points=tuple(
            WildfireNode(id=fid, efficiency_by_interval=ef_rows[fid]) for fid in fire_ids
        ),
        rest_bases=tuple(RestBase(id=b, capacity=10) for b in BASE_IDS),
        edges=edges,
        helicopters=helis,
        trajectories=("w1", "w2", "w3"),
        evolution=tuple(evolution),
        weights=ObjectiveWeights(
            flights=MU["flights"],
            hover=MU["hover"],
            changes=MU["changes"],
            idle=MU["idle"],
            pad=MU["pad"],
            normalizers=calibrated_normalizers(),
        ),
    )
    schedule = Schedule(activities=tuple(tuple(rows[h]) for h in HELI_IDS))
    return instance, schedule
