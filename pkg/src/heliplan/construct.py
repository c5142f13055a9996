"""Greedy construction of feasible schedules and the repair moves.

A solution is described by a genome: the trajectory plan (one load/drop node
pair per trajectory per evolution epoch), per-helicopter work sessions, and a
compile order. The dispatcher compiles a genome into a full timeline; the
greedy chooses the genome; repair fixes the conflicts the dispatcher cannot
see (shared bases and water points, forced-start overlaps).

Dispatch is deterministic given (instance, genome); all randomness lives in
the seeded planning/repair choices, so identical seeds give identical output.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional

import numpy as np

from . import engine
from .encode import encode_instance, encode_schedule
from .feasibility import ViolationReport, _decorate
from .model import AtNode, Flying, Instance, Schedule
from .objective import ObjectiveValue, compute_normalizers, score_terms


class DispatchError(RuntimeError):
    """A helicopter cannot reach any rest base within the horizon."""


class RepairError(RuntimeError):
    def __init__(self, message: str, report: Optional[ViolationReport] = None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class EpochPlan:
    start: int  # first interval of the epoch, 1-based
    drop: str
    load: str


@dataclass(frozen=True)
class TrajectoryPlan:
    epochs: Mapping[str, tuple[EpochPlan, ...]]
    diagnostics: tuple[str, ...] = ()


@dataclass(frozen=True)
class Session:
    """One work stint: depart no earlier than `start`, fly up to `max_circuits`
    load/drop circuits, then rest at `base` (or the nearest one)."""

    start: int = 1
    max_circuits: Optional[int] = None
    base: Optional[str] = None
    flexible: bool = True  # dispatcher may delay the departure to avoid overlaps


@dataclass(frozen=True)
class Genome:
    plan: TrajectoryPlan
    sessions: Mapping[str, tuple[Session, ...]]
    order: tuple[str, ...]
    final_base: Mapping[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class RealizedSession:
    """What a genome session actually became; circuits == 0 marks a session
    the dispatcher could not place (all other fields are then zero/None)."""

    departure: int  # 1-based first flying interval of the session
    circuits: int
    base: Optional[str]
    return_from: Optional[str]
    arrival: int  # 1-based first interval at the rest base
    rest_min_end: int  # 1-based last interval of the mandatory rest


EMPTY_REALIZED = RealizedSession(
    departure=0, circuits=0, base=None, return_from=None, arrival=0, rest_min_end=0
)


@dataclass(frozen=True)
class Solution:
    genome: Genome
    schedule: Schedule
    realized: Mapping[str, tuple[RealizedSession, ...]]
    objective: ObjectiveValue
    report: ViolationReport

    @property
    def total(self) -> float:
        return self.objective.total

    @property
    def feasible(self) -> bool:
        return self.report.feasible


def evolution_epoch_starts(instance: Instance) -> list[int]:
    """1-based epoch start intervals: interval 1 plus every flagged interval."""
    starts = [1]
    for t in range(2, instance.grid.horizon_intervals + 1):
        if instance.evolution[t - 1] == 1:
            starts.append(t)
    return sorted(set(starts))


class _Context:
    """Precomputed lookups shared by planning, dispatch and repair."""

    def __init__(self, instance: Instance):
        self.instance = instance
        self.horizon = instance.grid.horizon_intervals
        self.lam = {h.id: {} for h in instance.helicopters}
        for e in instance.edges:
            for hid, lam in e.flight_time.items():
                if hid in self.lam:
                    self.lam[hid][(e.tail, e.head)] = lam
        self.water_ids = [n.id for n in instance.water_points]
        self.fire_ids = [n.id for n in instance.wildfire_points]
        self.base_ids = [n.id for n in instance.rest_bases]
        self.coords = {n.id: n.coordinates for n in instance.all_nodes()}
        self.base_capacity = {n.id: n.capacity for n in instance.rest_bases}
        self.members = {w: [] for w in instance.trajectories}
        for h in instance.helicopters:
            self.members.setdefault(h.trajectory_id, []).append(h.id)
        self.heli = {h.id: h for h in instance.helicopters}
        self.epoch_starts = evolution_epoch_starts(instance)

    def distance(self, a: str, b: str) -> Optional[float]:
        ca, cb = self.coords.get(a), self.coords.get(b)
        if ca is None or cb is None:
            return None
        return ((ca[0] - cb[0]) ** 2 + (ca[1] - cb[1]) ** 2) ** 0.5

    def waters_by_closeness(self, drop: str, member_ids) -> list[tuple[float, str]]:
        """Loading points ranked by coordinate distance to the drop node, or by
        the members' smallest flight time on the load->drop leg."""
        scored = []
        for c in self.water_ids:
            d = self.distance(c, drop)
            if d is None:
                lams = [self.lam[m].get((c, drop)) for m in member_ids]
                lams = [v for v in lams if v is not None]
                if not lams:
                    continue
                d = float(min(lams))
            scored.append((d, c))
        scored.sort(key=lambda s: (s[0], s[1]))
        return scored

    def closest_water_to_drop(self, drop: str, member_ids, rng) -> Optional[str]:
        scored = self.waters_by_closeness(drop, member_ids)
        if not scored:
            return None
        best = [c for d, c in scored if d == scored[0][0]]
        return best[int(rng.integers(len(best)))] if len(best) > 1 else best[0]

    def bases_by_flight_time(self, hid: str, origin: str) -> list[str]:
        reach = [
            (self.lam[hid][(origin, b)], b)
            for b in self.base_ids
            if (origin, b) in self.lam[hid]
        ]
        reach.sort()
        return [b for _lam, b in reach]


# --- trajectory planning ------------------------------------------------------


def plan_trajectories(
    instance: Instance, seed: int | np.random.Generator, ctx: _Context | None = None
) -> TrajectoryPlan:
    """Assign each trajectory a drop node (best efficiency at the epoch start)
    and its closest loading point, per evolution epoch. Pairs already taken by
    earlier trajectories are deprioritized among equally good options."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if ctx is None:
        ctx = _Context(instance)
    diagnostics: list[str] = []
    epochs: dict[str, list[EpochPlan]] = {w: [] for w in instance.trajectories}
    ef = {n.id: n.efficiency_by_interval for n in instance.wildfire_points}

    if not ctx.fire_ids or not ctx.water_ids:
        return TrajectoryPlan(
            epochs={w: () for w in instance.trajectories},
            diagnostics=("no wildfire or water nodes: empty plan",),
        )

    for es in ctx.epoch_starts:
        used_pairs: set[tuple[str, str]] = set()
        for w in instance.trajectories:
            members = ctx.members.get(w, [])
            values = {i: ef[i][es - 1] for i in ctx.fire_ids}
            best_value = max(values.values())
            if best_value <= 0:
                diagnostics.append(
                    f"trajectory {w}: no positive drop efficiency in the epoch "
                    f"starting at interval {es}; assigning the best node anyway"
                )
            tied = [i for i in ctx.fire_ids if values[i] == best_value]
            tied = [tied[k] for k in rng.permutation(len(tied))]
            chosen = None
            fallback = None
            for drop in tied:
                load = ctx.closest_water_to_drop(drop, members, rng)
                if load is None:
                    continue
                if fallback is None:
                    fallback = (drop, load)
                if (drop, load) not in used_pairs:
                    chosen = (drop, load)
                    break
            chosen = chosen or fallback
            if chosen is None:
                chosen = (tied[0], ctx.water_ids[0])
            used_pairs.add(chosen)
            epochs[w].append(EpochPlan(start=es, drop=chosen[0], load=chosen[1]))

    return TrajectoryPlan(
        epochs={w: tuple(v) for w, v in epochs.items()},
        diagnostics=tuple(diagnostics),
    )


# --- dispatch -----------------------------------------------------------------


@dataclass
class _HeliState:
    pos: str
    avail: int  # earliest departure index, 0-based
    consec: int
    total: int
    row: list


class _Dispatcher:
    def __init__(self, instance: Instance, plan: TrajectoryPlan, ctx: _Context | None = None):
        self.ctx = ctx or _Context(instance)
        self.plan = plan
        self.horizon = instance.grid.horizon_intervals
        # per-trajectory epoch tables: (start0, end0_exclusive, drop, load)
        self.epochs: dict[str, list[tuple[int, int, str, str]]] = {}
        for w, eps in plan.epochs.items():
            table = []
            for k, ep in enumerate(eps):
                end = eps[k + 1].start - 1 if k + 1 < len(eps) else self.horizon
                table.append((ep.start - 1, end, ep.drop, ep.load))
            self.epochs[w] = table
        self._epoch_keys = {w: [row[0] for row in tbl] for w, tbl in self.epochs.items()}
        # busy intervals per (trajectory, node), stays only
        self.busy: dict[tuple[str, str], set[int]] = {}
        # liters already committed per water point (shared across trajectories)
        self.drawn: dict[str, int] = {}
        self._water_cap = {n.id: n.initial_capacity_liters for n in instance.water_points}
        # simultaneous-load occupancy per (water point, interval), all trajectories
        self.slot_count: dict[tuple[str, int], int] = {}
        self._water_slots = {n.id: n.simultaneous_helicopters for n in instance.water_points}

    def _epoch_at(self, w: str, t: int):
        table = self.epochs.get(w)
        if not table:
            return None
        k = bisect.bisect_right(self._epoch_keys[w], t) - 1
        return table[max(k, 0)]

    def _span_end(self, w: str, epoch) -> int:
        """Exclusive end of the stretch of consecutive epochs sharing this
        epoch's node pair; circuits may run up to here, since no association
        change happens at the interior boundaries."""
        table = self.epochs[w]
        k = table.index(epoch)
        while k + 1 < len(table) and table[k + 1][2:] == epoch[2:]:
            k += 1
        return table[k][1]

    def _is_free(self, w: str, node: str, lo: int, hi: int) -> bool:
        marked = self.busy.get((w, node))
        if not marked:
            return True
        return all(t not in marked for t in range(lo, hi + 1))

    def _mark(self, w: str, node: str, lo: int, hi: int) -> None:
        self.busy.setdefault((w, node), set()).update(range(lo, hi + 1))

    def _slots_free(self, node: str, lo: int, hi: int) -> bool:
        cap = self._water_slots[node]
        return all(self.slot_count.get((node, t), 0) < cap for t in range(lo, hi + 1))

    def _take_slots(self, node: str, lo: int, hi: int) -> None:
        for t in range(lo, hi + 1):
            self.slot_count[(node, t)] = self.slot_count.get((node, t), 0) + 1

    def _circuit_at(self, hid: str, st: _HeliState, dep: int, sess: Session):
        """Try one circuit departing exactly at `dep`; returns a placement dict,
        or the failure kind: 'shiftable' (a later departure may work) or
        'hard' (the session is over)."""
        ctx = self.ctx
        heli = ctx.heli[hid]
        w = heli.trajectory_id
        lam = ctx.lam[hid]
        T = self.horizon
        epoch = self._epoch_at(w, dep)
        if epoch is None:
            return "hard"
        # settle the epoch by where the load stay would begin
        lam1 = None
        for _ in range(len(self.epochs[w]) + 1):
            lam1 = lam.get((st.pos, epoch[3]))
            if lam1 is None:
                return "shiftable"  # a later epoch may use a reachable point
            nxt = self._epoch_at(w, dep + lam1)
            if nxt is epoch:
                break
            epoch = nxt
        else:
            return "shiftable"
        _e0, e_end, drop, load = epoch
        ls = dep + lam1
        a_load = heli.load_or_drop_time[load]
        le = ls + a_load - 1
        lam2 = lam.get((load, drop))
        if lam2 is None:
            return "shiftable"
        ds = le + 1 + lam2
        a_drop = heli.load_or_drop_time[drop]
        de = ds + a_drop - 1
        if self.drawn.get(load, 0) + heli.water_capacity_liters > self._water_cap[load]:
            return "shiftable"  # a later epoch may use a point with stock left
        if de >= self._span_end(w, epoch):  # must finish before the node pair changes
            return "shiftable"
        if sess.base is not None and (drop, sess.base) in lam:
            ret = lam[(drop, sess.base)]
        else:
            bases = ctx.bases_by_flight_time(hid, drop)
            if not bases:
                return "hard"
            ret = lam[(drop, bases[0])]
        cost = lam1 + a_load + lam2 + a_drop
        if de + 1 + ret > T - 1:  # return departs the interval after the drop
            return "hard"
        if st.consec + cost + ret > heli.max_consecutive_flight:
            return "hard"
        if st.total + cost + ret > heli.max_total_flight:
            return "hard"
        if sess.flexible and not (
            self._is_free(w, load, ls, le)
            and self._is_free(w, drop, ds, de)
            and self._slots_free(load, ls, le)
        ):
            return "shiftable"
        return {
            "dep": dep, "load": load, "ls": ls, "le": le, "lam1": lam1,
            "drop": drop, "ds": ds, "de": de, "lam2": lam2, "cost": cost,
        }

    def _find_circuit(self, hid, st, dep: int, sess: Session, shiftable: bool):
        if not shiftable:
            got = self._circuit_at(hid, st, dep, sess)
            return got if isinstance(got, dict) else None
        while dep < self.horizon:
            got = self._circuit_at(hid, st, dep, sess)
            if isinstance(got, dict):
                return got
            if got == "hard":
                return None
            dep += 1
        return None

    def _stay_until(self, st: _HeliState, idx: int) -> None:
        while len(st.row) < idx:
            st.row.append(AtNode(st.pos))

    def _fly(self, st: _HeliState, dest: str, lam: int) -> None:
        st.row.extend([Flying(st.pos, dest)] * lam)
        st.row.append(AtNode(dest))
        st.pos = dest

    def compile_heli(self, hid: str, sessions, final_base: Optional[str], auto: bool = False):
        """Compile one helicopter's timeline. With auto=True, sessions are
        generated greedily (depart as soon as possible, fill the budget, rest
        the minimum, repeat) until nothing more fits."""
        ctx = self.ctx
        heli = ctx.heli[hid]
        w = heli.trajectory_id
        lam = ctx.lam[hid]
        T = self.horizon
        st = _HeliState(
            pos=heli.start_node,
            avail=1,
            consec=heli.consecutive_flight_so_far,
            total=heli.total_flight_today,
            row=[AtNode(heli.start_node)],
        )
        if 0 < heli.consecutive_rest_so_far < heli.min_rest:
            st.avail = max(heli.min_rest - heli.consecutive_rest_so_far, 1)
        realized: list[RealizedSession] = []

        queue = list(sessions) if not auto else None
        k = 0
        while True:
            if auto:
                sess = Session(start=1)
            else:
                if k >= len(queue):
                    break
                sess = queue[k]
                k += 1
            dep = max(sess.start - 1, st.avail, len(st.row))
            placed = 0
            session_dep = None
            while sess.max_circuits is None or placed < sess.max_circuits:
                c = self._find_circuit(
                    hid, st, dep, sess, shiftable=(placed == 0 and sess.flexible)
                )
                if c is None:
                    break
                self._stay_until(st, c["dep"])
                self._fly(st, c["load"], c["lam1"])
                self._stay_until(st, c["le"] + 1)
                self._fly(st, c["drop"], c["lam2"])
                self._stay_until(st, c["de"] + 1)
                self._mark(w, c["load"], c["ls"], c["le"])
                self._mark(w, c["drop"], c["ds"], c["de"])
                self._take_slots(c["load"], c["ls"], c["le"])
                self.drawn[c["load"]] = (
                    self.drawn.get(c["load"], 0) + heli.water_capacity_liters
                )
                st.consec += c["cost"]
                st.total += c["cost"]
                if session_dep is None:
                    session_dep = c["dep"]
                dep = c["de"] + 1
                placed += 1
            if placed == 0:
                if auto:
                    break
                realized.append(EMPTY_REALIZED)  # keep 1:1 with genome sessions
                continue
            # back to the rest base
            if sess.base is not None and (st.pos, sess.base) in lam:
                base = sess.base
            else:
                bases = ctx.bases_by_flight_time(hid, st.pos)
                if not bases:
                    raise DispatchError(f"{hid}: no rest base reachable from {st.pos}")
                base = bases[0]
            ret = lam[(st.pos, base)]
            return_from = st.pos
            self._fly(st, base, ret)
            st.consec += ret
            st.total += ret
            arr = len(st.row) - 1
            rest_end = min(arr + heli.min_rest - 1, T - 1)
            realized.append(
                RealizedSession(
                    departure=session_dep + 1,
                    circuits=placed,
                    base=base,
                    return_from=return_from,
                    arrival=arr + 1,
                    rest_min_end=rest_end + 1,
                )
            )
            st.avail = arr + heli.min_rest
            st.consec = 0  # the counter resets once the mandatory rest completes

        # route to a base if still parked at the start position
        if st.pos == heli.start_node:
            bases = (
                [final_base]
                if final_base and (st.pos, final_base) in lam
                else ctx.bases_by_flight_time(hid, st.pos)
            )
            if not bases:
                raise DispatchError(f"{hid}: no rest base reachable from {st.pos}")
            base = bases[0]
            ret = lam[(st.pos, base)]
            dep = max(T - 1 - ret, st.avail, len(st.row))
            if dep + ret > T - 1:
                raise DispatchError(f"{hid}: cannot reach base {base} inside the horizon")
            if (
                st.consec + ret > heli.max_consecutive_flight
                or st.total + ret > heli.max_total_flight
            ):
                raise DispatchError(f"{hid}: no flight budget left to reach a base")
            self._stay_until(st, dep)
            self._fly(st, base, ret)
        self._stay_until(st, T)
        if len(st.row) != T:
            raise DispatchError(f"{hid}: compiled row length {len(st.row)} != horizon {T}")
        return tuple(st.row), tuple(realized)


def dispatch(instance: Instance, genome: Genome, ctx: _Context | None = None) -> tuple[Schedule, dict]:
    """Compile every helicopter's timeline in the genome's canonical order."""
    d = _Dispatcher(instance, genome.plan, ctx)
    rows: dict[str, tuple] = {}
    realized: dict[str, tuple[RealizedSession, ...]] = {}
    for hid in genome.order:
        rows[hid], realized[hid] = d.compile_heli(
            hid, genome.sessions.get(hid, ()), genome.final_base.get(hid)
        )
    schedule = Schedule(activities=tuple(rows[h.id] for h in instance.helicopters))
    return schedule, realized


def make_solution(
    instance: Instance, genome: Genome, enc=None, ctx: _Context | None = None, norms=None
) -> Solution:
    """Compile and score a genome; one rule sweep serves both the violation
    report and the objective (dispatch output is structurally valid by
    construction)."""
    schedule, realized = dispatch(instance, genome, ctx)
    if enc is None:
        enc = encode_instance(instance)
    res = engine.sweep(enc, encode_schedule(enc, schedule))
    if norms is None:
        norms = instance.weights.normalizers or compute_normalizers(instance)
    return Solution(
        genome=genome,
        schedule=schedule,
        realized=realized,
        objective=score_terms(instance.weights, norms, *res["terms"]),
        report=_decorate(enc, res["violations"]),
    )


# --- greedy work assignment ----------------------------------------------------


def assign_work(
    instance: Instance, plan: TrajectoryPlan, seed: int | np.random.Generator,
    ctx: _Context | None = None,
) -> Genome:
    """Fill every trajectory with as much work as fits: members are compiled in
    seeded order, each flying circuits until the budget forces a rest, resting
    the minimum, and going again, until nothing more fits."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if ctx is None:
        ctx = _Context(instance)
    order: list[str] = []
    for w in instance.trajectories:
        members = list(ctx.members.get(w, []))
        order.extend(members[k] for k in rng.permutation(len(members)))
    for h in instance.helicopters:
        if h.id not in order:
            order.append(h.id)

    d = _Dispatcher(instance, plan, ctx)
    sessions: dict[str, tuple[Session, ...]] = {}
    for hid in order:
        _row, realized = d.compile_heli(hid, (), None, auto=True)
        sessions[hid] = tuple(Session(start=1) for _ in realized)
    return Genome(plan=plan, sessions=sessions, order=tuple(order))


# --- repair ---------------------------------------------------------------------


_REPAIR_PRIORITY = {1: 0, 2: 1, 3: 1, 4: 1, 40: 2}


def repair(
    instance: Instance,
    solution: Solution,
    seed: int | np.random.Generator,
    max_attempts: Optional[int] = None,
    enc=None,
    ctx: _Context | None = None,
    norms=None,
) -> Solution:
    """Apply the feasibility moves until the schedule checks clean.

    Base over-capacity sends one of the resting helicopters to another base;
    water over-capacity hands an affected trajectory the next loading point;
    same-trajectory overlaps shift one of the colliding sessions. Raises
    RepairError with the residual report when the attempt budget runs out."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if ctx is None:
        ctx = _Context(instance)
    if norms is None:
        norms = instance.weights.normalizers or compute_normalizers(instance)
    attempts = max_attempts if max_attempts is not None else 30 + 10 * len(instance.helicopters)
    cur = solution
    for _ in range(attempts):
        report = cur.report
        if report.feasible:
            return cur
        fixable = [e for e in report.entries if e.rule in _REPAIR_PRIORITY]
        if not fixable:
            raise RepairError(
                f"violations outside the repairable families: {sorted(map(str, report.rules()))}",
                report,
            )
        fixable.sort(key=lambda e: (_REPAIR_PRIORITY[e.rule], e.interval or 0))
        entry = fixable[0]
        if entry.rule == 1:
            cur = _move_base_rester(instance, ctx, cur, entry, rng, enc, norms)
        elif entry.rule in (2, 3, 4):
            cur = _move_load_point(instance, ctx, cur, entry, rng, enc, norms)
        else:
            cur = _shift_overlapping_session(instance, ctx, cur, entry, rng, enc, norms)
    if cur.report.feasible:
        return cur
    raise RepairError("repair attempts exhausted", cur.report)


def _heli_index(instance, hid):
    return next(k for k, h in enumerate(instance.helicopters) if h.id == hid)


def _session_covering(realized, interval):
    """Index of the session whose work or following rest covers the interval."""
    placed = [(k, rs) for k, rs in enumerate(realized) if rs.circuits > 0]
    for pos, (k, rs) in enumerate(placed):
        nxt = placed[pos + 1][1].departure if pos + 1 < len(placed) else None
        end = (nxt - 1) if nxt else 10 ** 9
        if rs.departure <= interval <= end:
            return k
    return None


def _resting_headroom(instance, ctx, sol, t):
    """Free rest capacity per base on the conflicted interval."""
    occupancy = {b: 0 for b in ctx.base_ids}
    for k, _h in enumerate(instance.helicopters):
        act = sol.schedule.activities[k][t - 1]
        if isinstance(act, AtNode) and act.node in occupancy:
            occupancy[act.node] += 1
    return {b: ctx.base_capacity[b] - occupancy[b] for b in ctx.base_ids}


def _pick_base(ordered, exclude, headroom, rng):
    candidates = [b for b in ordered if b not in exclude]
    if not candidates:
        return None
    open_now = [b for b in candidates if headroom.get(b, 0) > 0]
    if open_now:
        return open_now[0]  # closest base with room on the conflicted interval
    return candidates[int(rng.integers(len(candidates)))]


def _move_base_rester(instance, ctx, sol: Solution, entry, rng, enc=None, norms=None) -> Solution:
    t, base = entry.interval, entry.node
    resters = [
        h.id
        for k, h in enumerate(instance.helicopters)
        if sol.schedule.activities[k][t - 1] == AtNode(base)
    ]
    hid = resters[int(rng.integers(len(resters)))]
    realized = sol.realized.get(hid, ())
    genome = sol.genome
    headroom = _resting_headroom(instance, ctx, sol, t)
    if not realized:  # parked helicopter routed here by finalization
        ordered = ctx.bases_by_flight_time(hid, ctx.heli[hid].start_node)
        current = genome.final_base.get(hid, base)
        pick = _pick_base(ordered, {base, current}, headroom, rng)
        if pick is None:
            pick = _pick_base(ordered, {base}, headroom, rng)
        if pick is None:
            raise RepairError(f"no alternative base for {hid}")
        fb = dict(genome.final_base)
        fb[hid] = pick
        genome = replace(genome, final_base=fb)
    else:
        k = _session_covering(realized, t)
        if k is None or k >= len(genome.sessions.get(hid, ())):
            k = len(realized) - 1
        origin = realized[k].return_from
        ordered = ctx.bases_by_flight_time(hid, origin)
        current = realized[k].base
        pick = _pick_base(ordered, {base, current}, headroom, rng)
        if pick is None:
            raise RepairError(f"no alternative base for {hid}")
        sess = list(genome.sessions[hid])
        sess[k] = replace(sess[k], base=pick)
        newsessions = dict(genome.sessions)
        newsessions[hid] = tuple(sess)
        genome = replace(genome, sessions=newsessions)
    return make_solution(instance, genome, enc=enc, ctx=ctx, norms=norms)


def _move_load_point(instance, ctx, sol: Solution, entry, rng, enc=None, norms=None) -> Solution:
    t, water = entry.interval or 1, entry.node
    genome = sol.genome
    affected = []
    for w, eps in genome.plan.epochs.items():
        for k, ep in enumerate(eps):
            end = eps[k + 1].start - 1 if k + 1 < len(eps) else instance.grid.horizon_intervals
            if ep.load == water and ep.start <= t <= end:
                affected.append((w, k))
    if not affected:
        raise RepairError(f"no trajectory uses {water} around interval {t}")
    w, k = affected[int(rng.integers(len(affected)))]
    ep = genome.plan.epochs[w][k]
    ranked = [c for _d, c in ctx.waters_by_closeness(ep.drop, ctx.members.get(w, []))]
    ranked = [c for c in ranked if c != water]
    if not ranked:
        raise RepairError(f"no alternative water point for trajectory {w}")
    in_use = {
        other.load
        for ow, oeps in genome.plan.epochs.items()
        for other in oeps
        if not (ow == w and other is ep)
    }
    preferred = [c for c in ranked if c not in in_use]
    eps = list(genome.plan.epochs[w])
    eps[k] = replace(ep, load=(preferred[0] if preferred else ranked[0]))
    new_epochs = dict(genome.plan.epochs)
    new_epochs[w] = tuple(eps)
    genome = replace(genome, plan=replace(genome.plan, epochs=new_epochs))
    return make_solution(instance, genome, enc=enc, ctx=ctx, norms=norms)


def _shift_overlapping_session(instance, ctx, sol: Solution, entry, rng, enc=None, norms=None) -> Solution:
    t, node, w = entry.interval, entry.node, entry.trajectory
    members = [
        hid
        for hid in ctx.members.get(w, [])
        if sol.schedule.activities[_heli_index(instance, hid)][t - 1] == AtNode(node)
    ]
    if not members:
        raise RepairError(f"no member of {w} found on {node} at interval {t}")
    hid = members[int(rng.integers(len(members)))]
    realized = sol.realized.get(hid, ())
    k = _session_covering(realized, t)
    if k is None or hid not in sol.genome.sessions or k >= len(sol.genome.sessions[hid]):
        raise RepairError(f"cannot locate the session of {hid} covering interval {t}")
    sess = list(sol.genome.sessions[hid])
    heli = ctx.heli[hid]
    delta = int(rng.integers(1, heli.min_rest + 1))
    direction = 1 if rng.random() < 0.5 else -1
    new_start = max(1, realized[k].departure + direction * delta)
    sess[k] = replace(sess[k], start=new_start, flexible=True)
    newsessions = dict(sol.genome.sessions)
    newsessions[hid] = tuple(sess)
    genome = replace(sol.genome, sessions=newsessions)
    return make_solution(instance, genome, enc=enc, ctx=ctx, norms=norms)


# --- top level -------------------------------------------------------------------


def build_initial(
    instance: Instance, seed: int, enc=None, ctx: _Context | None = None, norms=None
) -> Solution:
    """Greedy plan + work assignment + repair; the result checks clean."""
    root = np.random.SeedSequence(seed)
    plan_ss, work_ss, repair_ss = root.spawn(3)
    if enc is None:
        enc = encode_instance(instance)
    if ctx is None:
        ctx = _Context(instance)
    plan = plan_trajectories(instance, np.random.default_rng(plan_ss), ctx=ctx)
    genome = assign_work(instance, plan, np.random.default_rng(work_ss), ctx=ctx)
    solution = make_solution(instance, genome, enc=enc, ctx=ctx, norms=norms)
    return repair(
        instance, solution, np.random.default_rng(repair_ss), enc=enc, ctx=ctx, norms=norms
    )


def initial_solution(instance: Instance, seed: int) -> Schedule:
    return build_initial(instance, seed).schedule
