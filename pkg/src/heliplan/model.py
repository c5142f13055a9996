"""Core problem data: time grid, graph nodes, helicopters, instances and schedules.

Every other module consumes these types. Instances and schedules are immutable
after construction and safe to share across workers; all functions here are pure.

Time indexing convention: intervals are numbered 1..horizon in every external
surface (files, violation reports, event streams). Internal array code is
0-based and converts at the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

START, WATER, FIRE, BASE = "start-position", "water-point", "wildfire-point", "rest-base"

#: interval lengths used by the stock instance families; others work but are flagged
STANDARD_INTERVAL_MINUTES = (1, 2, 5, 10)


@dataclass(frozen=True)
class TimeGrid:
    """Discrete planning horizon: `horizon_intervals` slots of `interval_minutes` each.

    `start_clock` ("HH:MM") anchors interval 1 for rendering only; it never
    enters feasibility or objective math.
    """

    interval_minutes: int
    horizon_intervals: int
    start_clock: Optional[str] = None


@dataclass(frozen=True)
class StartPosition:
    id: str
    coordinates: Optional[tuple[float, float]] = None


@dataclass(frozen=True)
class WaterPoint:
    id: str
    initial_capacity_liters: int
    simultaneous_helicopters: int
    coordinates: Optional[tuple[float, float]] = None


@dataclass(frozen=True)
class RestBase:
    id: str
    capacity: int
    coordinates: Optional[tuple[float, float]] = None


@dataclass(frozen=True)
class WildfireNode:
    id: str
    efficiency_by_interval: tuple[float, ...]
    coordinates: Optional[tuple[float, float]] = None


@dataclass(frozen=True)
class Helicopter:
    """One aircraft with its regulatory state at the start of the horizon.

    All durations are integer intervals (see `minutes_to_intervals` for the
    minute conversion rule). `load_or_drop_time` maps node id -> intervals the
    helicopter needs to complete a water load or drop at that node.
    """

    id: str
    start_node: str
    water_capacity_liters: int
    initial_water_loaded: int
    consecutive_flight_so_far: int
    total_flight_today: int
    max_consecutive_flight: int
    max_total_flight: int
    consecutive_rest_so_far: int
    min_rest: int
    trajectory_id: str
    load_or_drop_time: Mapping[str, int]


@dataclass(frozen=True)
class Edge:
    """Directed flight connection; `flight_time` maps helicopter id -> intervals."""

    tail: str
    head: str
    flight_time: Mapping[str, int]


@dataclass(frozen=True)
class ObjectiveWeights:
    """Penalty weights for the score terms, plus optional fixed normalizers.

    The weights must be strictly decreasing (flights > hover > changes > idle
    > pad) so the score resolves the goals in priority order; this is checked
    at construction. When `normalizers` is None they are computed from the
    instance (see objective.compute_normalizers).
    """

    flights: float = 0.1
    hover: float = 0.05
    changes: float = 0.01
    idle: float = 0.005
    pad: float = 0.001
    normalizers: Optional["Normalizers"] = None

    def __post_init__(self):
        seq = (self.flights, self.hover, self.changes, self.idle, self.pad)
        if any(w < 0 for w in seq):
            raise ValueError("objective weights must be nonnegative")
        if not (self.flights > self.hover > self.changes > self.idle > self.pad):
            raise ValueError(
                "objective weights must be strictly decreasing: "
                "flights > hover > changes > idle > pad"
            )


@dataclass(frozen=True)
class Normalizers:
    efficiency: float
    flights: float
    hover: float
    changes: float

    def __post_init__(self):
        for name in ("efficiency", "flights", "hover", "changes"):
            if getattr(self, name) <= 0:
                raise ValueError(f"normalizer {name} must be positive")


@dataclass(frozen=True)
class Instance:
    grid: TimeGrid
    start_positions: tuple[StartPosition, ...]
    water_points: tuple[WaterPoint, ...]
    wildfire_points: tuple[WildfireNode, ...]
    rest_bases: tuple[RestBase, ...]
    edges: tuple[Edge, ...]
    helicopters: tuple[Helicopter, ...]
    trajectories: tuple[str, ...]
    evolution: tuple[int, ...]
    weights: ObjectiveWeights = field(default_factory=ObjectiveWeights)

    def all_nodes(self):
        return (
            list(self.start_positions)
            + list(self.water_points)
            + list(self.wildfire_points)
            + list(self.rest_bases)
        )

    def node_ids(self) -> list[str]:
        return [n.id for n in self.all_nodes()]


# --- schedule activities ---------------------------------------------------


@dataclass(frozen=True)
class AtNode:
    node: str


@dataclass(frozen=True)
class Flying:
    tail: str
    head: str


@dataclass(frozen=True)
class Unplaced:
    """Transient hole used only inside repair; never valid in a final schedule."""


Activity = Union[AtNode, Flying, Unplaced]

UNPLACED = Unplaced()


@dataclass(frozen=True)
class Schedule:
    """Per-helicopter timeline, one activity per interval, helicopter order
    matching Instance.helicopters."""

    activities: tuple[tuple[Activity, ...], ...]

    def row(self, index: int) -> tuple[Activity, ...]:
        return self.activities[index]


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    path: str
    message: str

    def __str__(self):
        return f"{self.severity}: {self.path}: {self.message}"


def minutes_to_intervals(minutes: int, grid: TimeGrid) -> int:
    """Convert a duration in minutes to grid intervals, rounding up.

    Ceiling keeps regulatory minima (rest, load time, flight legs) from being
    undercut by coarse grids.
    """
    if minutes < 0:
        raise ValueError("minutes must be nonnegative")
    return -(-minutes // grid.interval_minutes)


def validate_instance(instance: Instance) -> list[Diagnostic]:
    """Check every structural invariant; returns one diagnostic per violation.

    Errors make the instance unusable; warnings flag unusual but permitted
    data (nonstandard interval length, evolution flags that disagree with the
    efficiency columns).
    """
    out: list[Diagnostic] = []
    err = lambda path, msg: out.append(Diagnostic("error", path, msg))
    warn = lambda path, msg: out.append(Diagnostic("warning", path, msg))

    g = instance.grid
    horizon = g.horizon_intervals
    if g.interval_minutes <= 0:
        err("grid.interval_minutes", "must be a positive integer")
    elif g.interval_minutes not in STANDARD_INTERVAL_MINUTES:
        warn("grid.interval_minutes", f"nonstandard interval length {g.interval_minutes}")
    if horizon < 2:
        err("grid.horizon_intervals", "horizon must span at least 2 intervals")

    ids = instance.node_ids()
    seen = set()
    for nid in ids:
        if nid in seen:
            err(f"nodes.{nid}", "duplicate node id")
        seen.add(nid)

    start_ids = {n.id for n in instance.start_positions}
    water_ids = {n.id for n in instance.water_points}
    fire_ids = {n.id for n in instance.wildfire_points}

    for w in instance.water_points:
        if w.initial_capacity_liters < 0:
            err(f"nodes.{w.id}.initial_capacity_liters", "must be nonnegative")
        if w.simultaneous_helicopters < 1:
            err(f"nodes.{w.id}.simultaneous_helicopters", "must be at least 1")
    for b in instance.rest_bases:
        if b.capacity < 1:
            err(f"nodes.{b.id}.capacity", "must be at least 1")
    for f in instance.wildfire_points:
        if len(f.efficiency_by_interval) != horizon:
            err(
                f"nodes.{f.id}.efficiency_by_interval",
                f"length {len(f.efficiency_by_interval)} != horizon {horizon}",
            )
        for t, v in enumerate(f.efficiency_by_interval, start=1):
            if not (0 <= v <= 10):
                err(
                    f"nodes.{f.id}.efficiency_by_interval[{t}]",
                    f"value {v} outside [0, 10]",
                )

    traj_ids = set(instance.trajectories)
    if len(instance.trajectories) != len(traj_ids):
        err("trajectories", "duplicate trajectory id")

    heli_ids = set()
    for h in instance.helicopters:
        p = f"helicopters.{h.id}"
        if h.id in heli_ids:
            err(p, "duplicate helicopter id")
        heli_ids.add(h.id)
        if h.start_node not in start_ids:
            err(f"{p}.start_node", f"{h.start_node!r} is not a start-position node")
        if h.trajectory_id not in traj_ids:
            err(f"{p}.trajectory_id", f"{h.trajectory_id!r} not in trajectory list")
        if h.water_capacity_liters <= 0:
            err(f"{p}.water_capacity_liters", "must be positive")
        if h.initial_water_loaded not in (0, 1):
            err(f"{p}.initial_water_loaded", "must be 0 or 1")
        if h.min_rest < 1:
            err(f"{p}.min_rest", "must be at least 1")
        if h.consecutive_flight_so_far < 0 or h.consecutive_flight_so_far > h.max_consecutive_flight:
            err(f"{p}.consecutive_flight_so_far", "must lie in [0, max_consecutive_flight]")
        if h.total_flight_today < 0 or h.total_flight_today > h.max_total_flight:
            err(f"{p}.total_flight_today", "must lie in [0, max_total_flight]")
        if h.consecutive_rest_so_far < 0:
            err(f"{p}.consecutive_rest_so_far", "must be nonnegative")
        for nid in water_ids | fire_ids:
            dur = h.load_or_drop_time.get(nid)
            if dur is None:
                err(f"{p}.load_or_drop_time.{nid}", "missing duration for load/drop node")
            elif dur < 1:
                err(f"{p}.load_or_drop_time.{nid}", "duration must be at least 1 interval")

    seen_edges = set()
    for k, e in enumerate(instance.edges):
        p = f"edges[{k}]"
        if e.tail not in seen and e.tail not in ids:
            pass
        if e.tail not in ids:
            err(f"{p}.from", f"unknown node {e.tail!r}")
        if e.head not in ids:
            err(f"{p}.to", f"unknown node {e.head!r}")
        if e.tail == e.head:
            err(p, "self-loop edges are not allowed")
        if e.head in start_ids:
            err(f"{p}.to", "edges into start positions are not allowed")
        if (e.tail, e.head) in seen_edges:
            err(p, f"duplicate edge ({e.tail}, {e.head})")
        seen_edges.add((e.tail, e.head))
        for h in instance.helicopters:
            lam = e.flight_time.get(h.id)
            if lam is None:
                err(f"{p}.flight_time.{h.id}", "missing flight time for helicopter")
            elif lam < 1:
                err(f"{p}.flight_time.{h.id}", "flight time must be at least 1 interval")

    if len(instance.evolution) != horizon:
        err("evolution", f"length {len(instance.evolution)} != horizon {horizon}")
    else:
        for t, v in enumerate(instance.evolution, start=1):
            if v not in (0, 1):
                err(f"evolution[{t}]", "flags must be 0 or 1")
        # The flag vector is authoritative; disagreement with the efficiency
        # columns is reported but not fatal.
        for t in range(2, horizon + 1):
            changed = any(
                f.efficiency_by_interval[t - 1] != f.efficiency_by_interval[t - 2]
                for f in instance.wildfire_points
                if len(f.efficiency_by_interval) == horizon
            )
            flag = instance.evolution[t - 1]
            if changed and flag != 1:
                warn(f"evolution[{t}]", "efficiencies change here but the flag is 0")
            elif not changed and flag == 1:
                warn(f"evolution[{t}]", "flag set but no efficiency changes here")

    return out


@dataclass(frozen=True)
class EventStreams:
    """Completion events derived from a schedule (1-based intervals).

    rest_end fires on the final interval of a base stay that is followed by a
    departure; load_complete / drop_complete fire on the interval the
    helicopter leaves the water or wildfire node, i.e. stay start + duration,
    clamped to the horizon.
    """

    rest_end: Mapping[str, tuple[tuple[str, int], ...]]
    load_complete: Mapping[str, tuple[tuple[str, int], ...]]
    drop_complete: Mapping[str, tuple[tuple[str, int], ...]]


class StructuralError(ValueError):
    """Raised when a schedule cannot even be interpreted as a timeline."""


def structural_errors(instance: Instance, schedule: Schedule) -> list[str]:
    """Check that a schedule parses as a physical timeline.

    Structural validity covers: one row per helicopter, full horizon rows,
    interval 1 at the start position, every location change mediated by a
    flight run of exactly the edge's duration with matching endpoints, and no
    Unplaced holes. Everything else (stay lengths, capacities, regulations)
    is feasibility, reported by check_schedule.
    """
    errors: list[str] = []
    horizon = instance.grid.horizon_intervals
    node_ids = set(instance.node_ids())
    edge_time = {(e.tail, e.head): e.flight_time for e in instance.edges}

    if len(schedule.activities) != len(instance.helicopters):
        return [
            f"schedule has {len(schedule.activities)} rows for "
            f"{len(instance.helicopters)} helicopters"
        ]

    for heli, row in zip(instance.helicopters, schedule.activities):
        hid = heli.id
        if len(row) != horizon:
            errors.append(f"{hid}: row length {len(row)} != horizon {horizon}")
            continue
        first = row[0]
        if not (isinstance(first, AtNode) and first.node == heli.start_node):
            errors.append(f"{hid}: interval 1 must be at start node {heli.start_node}")
        t = 0
        while t < horizon:
            act = row[t]
            if isinstance(act, Unplaced):
                errors.append(f"{hid}: unplaced at interval {t + 1}")
                t += 1
                continue
            if isinstance(act, AtNode):
                if act.node not in node_ids:
                    errors.append(f"{hid}: unknown node {act.node!r} at interval {t + 1}")
                    t += 1
                    continue
                if t > 0 and isinstance(row[t - 1], AtNode) and row[t - 1].node != act.node:
                    errors.append(
                        f"{hid}: jumps {row[t - 1].node} -> {act.node} at interval {t + 1} "
                        "without flying"
                    )
                t += 1
                continue
            # flying run
            key = (act.tail, act.head)
            times = edge_time.get(key)
            if times is None:
                errors.append(f"{hid}: no edge ({act.tail}, {act.head}) at interval {t + 1}")
                t += 1
                continue
            run = 0
            while t + run < horizon and row[t + run] == act:
                run += 1
            lam = times[hid]
            if run != lam:
                errors.append(
                    f"{hid}: flight {act.tail}->{act.head} at interval {t + 1} lasts "
                    f"{run} intervals, edge needs {lam}"
                )
            if t == 0 or not (isinstance(row[t - 1], AtNode) and row[t - 1].node == act.tail):
                errors.append(
                    f"{hid}: flight {act.tail}->{act.head} at interval {t + 1} does not "
                    f"depart from {act.tail}"
                )
            after = t + run
            if after >= horizon:
                errors.append(
                    f"{hid}: flight {act.tail}->{act.head} at interval {t + 1} never lands"
                )
            elif not (isinstance(row[after], AtNode) and row[after].node == act.head):
                errors.append(
                    f"{hid}: flight {act.tail}->{act.head} must land at {act.head} "
                    f"on interval {after + 1}"
                )
            t += run

    return errors


def derive_events(schedule: Schedule, instance: Instance) -> EventStreams:
    """Derive rest/load/drop completion events from the timeline.

    A stay at a water or wildfire node starting at interval s emits its
    completion event at min(horizon, s + duration): the interval the
    helicopter leaves the node when the stay has the exact required length.
    A base stay emits rest_end on its final interval when a departure
    follows. Events can never fall on interval 1.
    """
    errs = structural_errors(instance, schedule)
    if errs:
        raise StructuralError("; ".join(errs))

    horizon = instance.grid.horizon_intervals
    water_ids = {n.id for n in instance.water_points}
    fire_ids = {n.id for n in instance.wildfire_points}
    base_ids = {n.id for n in instance.rest_bases}

    rest: dict[str, list[tuple[str, int]]] = {}
    load: dict[str, list[tuple[str, int]]] = {}
    drop: dict[str, list[tuple[str, int]]] = {}

    for heli, row in zip(instance.helicopters, schedule.activities):
        r_ev, l_ev, d_ev = [], [], []
        t = 0
        while t < horizon:
            act = row[t]
            if not isinstance(act, AtNode):
                t += 1
                continue
            node = act.node
            run = 0
            while t + run < horizon and row[t + run] == act:
                run += 1
            if node in water_ids or node in fire_ids:
                dur = heli.load_or_drop_time[node]
                when = min(horizon, t + 1 + dur)  # 1-based stay start is t+1
                (l_ev if node in water_ids else d_ev).append((node, when))
            elif node in base_ids:
                if t + run < horizon:  # departure exists
                    r_ev.append((node, t + run))  # 1-based final stay interval
            t += run
        rest[heli.id] = tuple(r_ev)
        load[heli.id] = tuple(l_ev)
        drop[heli.id] = tuple(d_ev)

    return EventStreams(rest_end=rest, load_complete=load, drop_complete=drop)
