"""Benchmark harness: stock instance families, seeded generation, summary
statistics, exhaustive search on desk-size instances, and the comparison
methodology (repeated seeded runs, checkpoint means, RDP stability).
"""

from __future__ import annotations

import concurrent.futures
import math
import statistics
import zlib
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from .encode import encode_instance, encode_schedule
from . import engine
from .feasibility import check_schedule
from .improve import IlsParams, SaParams, iterated_local_search, simulated_annealing
from .model import (
    AtNode,
    Edge,
    Flying,
    Helicopter,
    Instance,
    ObjectiveWeights,
    RestBase,
    Schedule,
    StartPosition,
    TimeGrid,
    WaterPoint,
    WildfireNode,
    minutes_to_intervals,
    validate_instance,
)
from .objective import rdp


@dataclass(frozen=True)
class FamilySpec:
    name: str
    family: str  # "S" | "M" | "B"
    helicopters: int
    trajectories: int
    fire_nodes_per_stage: int
    evolutions: int
    hours: int
    interval_minutes: int
    water_points: int
    rest_bases: int
    seed: int = 0

    @property
    def total_fire_nodes(self) -> int:
        return self.fire_nodes_per_stage * (self.evolutions + 1)


def _s(name, helis, traj, hours, mins):
    return FamilySpec(
        name=name, family="S", helicopters=helis, trajectories=traj,
        fire_nodes_per_stage=3, evolutions=0, hours=hours, interval_minutes=mins,
        water_points=5, rest_bases=5,
    )


def _m(name, helis, traj, per_stage, evolutions):
    return FamilySpec(
        name=name, family="M", helicopters=helis, trajectories=traj,
        fire_nodes_per_stage=per_stage, evolutions=evolutions, hours=8,
        interval_minutes=10, water_points=10, rest_bases=5,
    )


def _b(name, helis, traj, per_stage, evolutions, hours, mins):
    return FamilySpec(
        name=name, family="B", helicopters=helis, trajectories=traj,
        fire_nodes_per_stage=per_stage, evolutions=evolutions, hours=hours,
        interval_minutes=mins, water_points=10, rest_bases=5,
    )


#: stock instance catalog; fire-node counts follow the stage structure
#: (nodes per stage) x (stages), e.g. 18 drop points = 3 nodes, 5 evolutions
CATALOG: dict[str, FamilySpec] = {
    s.name: s
    for s in [
        _s("S1", 2, 2, 2, 5), _s("S2", 3, 2, 2, 5), _s("S3", 5, 3, 2, 5),
        _s("S4", 7, 3, 2, 5), _s("S5", 3, 2, 4, 10), _s("S6", 2, 2, 4, 5),
        _s("S7", 3, 2, 2, 2), _s("S8", 2, 1, 2, 2), _s("S9", 5, 3, 2, 2),
        _s("S10", 7, 3, 4, 10),
        _m("M1", 5, 3, 5, 1), _m("M2", 10, 3, 5, 1), _m("M3", 15, 5, 5, 1),
        _m("M4", 20, 5, 5, 1), _m("M5", 25, 5, 5, 1),
        _m("M6", 5, 3, 3, 5), _m("M7", 10, 3, 3, 5), _m("M8", 15, 3, 3, 5),
        _m("M9", 20, 3, 3, 5), _m("M10", 25, 3, 3, 5),
        _m("M11", 5, 3, 5, 5), _m("M12", 10, 3, 5, 5), _m("M13", 15, 5, 5, 5),
        _m("M14", 20, 5, 5, 5), _m("M15", 25, 5, 5, 5),
        _m("M16", 5, 3, 10, 3), _m("M17", 10, 3, 10, 3), _m("M18", 15, 3, 10, 3),
        _m("M19", 20, 3, 10, 3), _m("M20", 25, 3, 10, 3),
        _b("B1", 5, 3, 5, 1, 13, 1), _b("B2", 10, 3, 5, 1, 13, 5),
        _b("B3", 15, 5, 5, 1, 8, 1), _b("B4", 20, 5, 5, 1, 8, 5),
        _b("B5", 5, 3, 3, 5, 8, 1), _b("B6", 10, 3, 3, 5, 8, 5),
        _b("B7", 15, 5, 3, 5, 13, 5), _b("B8", 25, 5, 3, 5, 8, 5),
        _b("B9", 5, 3, 5, 5, 13, 5), _b("B10", 10, 3, 5, 5, 8, 5),
        _b("B12", 10, 3, 5, 5, 8, 5),
    ]
}

#: cruise speed (km/h) and bucket capacity (liters) per helicopter class;
#: one class per trajectory, since classes never share a trajectory
HELICOPTER_CLASSES = (
    ("light", 210.0, 900),
    ("medium", 230.0, 1500),
    ("heavy", 205.0, 4500),
)

REGULATION_MAX_CONSECUTIVE_MIN = 120
REGULATION_MIN_REST_MIN = 40
LOAD_DROP_MINUTES = 2


def generate_instance(spec: FamilySpec) -> Instance:
    """Synthesize a deterministic instance for a family row.

    Nodes are placed on a plane; the fire drifts north stage by stage with
    each stage's nodes carrying positive drop efficiency only during its
    epoch. Flight times come from straight-line distance over per-class
    cruise speeds, rounded up to whole intervals.
    """
    rng = np.random.default_rng(
        np.random.SeedSequence((zlib.crc32(spec.name.encode()), spec.seed))
    )
    horizon = spec.hours * 60 // spec.interval_minutes
    grid = TimeGrid(interval_minutes=spec.interval_minutes, horizon_intervals=horizon)
    stages = spec.evolutions + 1

    def jitter(scale):
        return float(rng.uniform(-scale, scale))

    # geometry (km): fire around the origin, drifting north per stage
    fire_nodes = []
    ef_rows = {}
    boundaries = [1 + round(s * horizon / stages) for s in range(stages)]
    boundaries = sorted(set(min(b, horizon) for b in boundaries))
    while len(boundaries) < stages:  # degenerate split on tiny horizons
        boundaries.append(boundaries[-1])
    evolution = [0] * horizon
    for b in boundaries[1:]:
        if b > 1:
            evolution[b - 1] = 1
    for s in range(stages):
        lo = boundaries[s]
        hi = boundaries[s + 1] - 1 if s + 1 < stages else horizon
        for k in range(spec.fire_nodes_per_stage):
            fid = f"f{s + 1}_{k + 1}"
            x = jitter(1.5) + (k - spec.fire_nodes_per_stage / 2) * 0.8
            y = 2.0 * s + jitter(0.8)
            level = float(rng.integers(5, 11))
            row = [0.0] * horizon
            for t in range(lo, hi + 1):
                row[t - 1] = level
            fire_nodes.append(WildfireNode(id=fid, efficiency_by_interval=tuple(row),
                                           coordinates=(x, y)))
            ef_rows[fid] = row

    waters = []
    for k in range(spec.water_points):
        ang = 2 * math.pi * k / spec.water_points
        r = float(rng.uniform(3.0, 9.0))
        waters.append(
            WaterPoint(
                id=f"c{k + 1}",
                initial_capacity_liters=int(rng.integers(40, 320)) * 1000,
                simultaneous_helicopters=int(rng.integers(1, 3)),
                coordinates=(r * math.cos(ang), r * math.sin(ang)),
            )
        )
    bases = []
    # the whole fleet must fit on bases at the end of the day
    base_floor = max(2, -(-spec.helicopters // spec.rest_bases))
    for k in range(spec.rest_bases):
        ang = 2 * math.pi * (k + 0.5) / spec.rest_bases
        r = float(rng.uniform(6.0, 16.0))
        bases.append(
            RestBase(
                id=f"b{k + 1}",
                capacity=base_floor + int(rng.integers(0, 3)),
                coordinates=(r * math.cos(ang), r * math.sin(ang)),
            )
        )

    # helicopters: class per trajectory, start positions near random bases
    traj_ids = tuple(f"w{k + 1}" for k in range(spec.trajectories))
    classes = {w: HELICOPTER_CLASSES[k % len(HELICOPTER_CLASSES)] for k, w in enumerate(traj_ids)}
    mcf = minutes_to_intervals(REGULATION_MAX_CONSECUTIVE_MIN, grid)
    mr = minutes_to_intervals(REGULATION_MIN_REST_MIN, grid)
    alpha = max(1, minutes_to_intervals(LOAD_DROP_MINUTES, grid))
    load_nodes = [w.id for w in waters] + [f.id for f in fire_nodes]
    helis = []
    starts = []
    speeds = {}
    for k in range(spec.helicopters):
        hid = f"h{k + 1}"
        w = traj_ids[k % len(traj_ids)]
        _cls, speed, capacity = classes[w]
        speeds[hid] = speed
        near = bases[int(rng.integers(len(bases)))].coordinates
        sp = StartPosition(
            id=f"sp{k + 1}", coordinates=(near[0] + jitter(0.5), near[1] + jitter(0.5))
        )
        starts.append(sp)
        helis.append(
            Helicopter(
                id=hid,
                start_node=sp.id,
                water_capacity_liters=capacity,
                initial_water_loaded=0,
                consecutive_flight_so_far=0,
                total_flight_today=0,
                max_consecutive_flight=mcf,
                max_total_flight=horizon,
                consecutive_rest_so_far=0,
                min_rest=mr,
                trajectory_id=w,
                load_or_drop_time={n: alpha for n in load_nodes},
            )
        )

    coords = {n.id: n.coordinates for n in starts + waters + fire_nodes + bases}

    def lam(hid, a, b):
        (xa, ya), (xb, yb) = coords[a], coords[b]
        dist = math.hypot(xa - xb, ya - yb)
        minutes = dist / speeds[hid] * 60.0
        return max(1, minutes_to_intervals(math.ceil(minutes), grid))

    pairs = []
    water_ids = [w.id for w in waters]
    fire_ids = [f.id for f in fire_nodes]
    base_ids = [b.id for b in bases]
    for sp in starts:
        pairs += [(sp.id, c) for c in water_ids] + [(sp.id, b) for b in base_ids]
    for c in water_ids:
        pairs += [(c, i) for i in fire_ids]
    for i in fire_ids:
        pairs += [(i, c) for c in water_ids] + [(i, b) for b in base_ids]
    for b in base_ids:
        pairs += [(b, c) for c in water_ids]
    edges = tuple(
        Edge(tail=a, head=b, flight_time={h.id: lam(h.id, a, b) for h in helis})
        for a, b in pairs
    )

    inst = Instance(
        grid=grid,
        start_positions=tuple(starts),
        water_points=tuple(waters),
        wildfire_points=tuple(fire_nodes),
        rest_bases=tuple(bases),
        edges=edges,
        helicopters=tuple(helis),
        trajectories=traj_ids,
        evolution=tuple(evolution),
        weights=ObjectiveWeights(),
    )
    problems = [d for d in validate_instance(inst) if d.severity == "error"]
    if problems:
        raise RuntimeError(f"generated instance is invalid: {problems[:3]}")
    return inst


def instance_from_catalog(name: str, seed: int = 0) -> Instance:
    spec = replace(CATALOG[name], seed=seed)
    return generate_instance(spec)


# --- summaries -------------------------------------------------------------------


@dataclass(frozen=True)
class SummaryRow:
    drops: int
    flights: int
    trajectory_changes: int
    blank_times: int

    def to_dict(self):
        return {
            "drops": self.drops,
            "flights": self.flights,
            "trajectory_changes": self.trajectory_changes,
            "blank_times": self.blank_times,
        }


def summarize(instance: Instance, schedule: Schedule) -> SummaryRow:
    enc = encode_instance(instance)
    res = engine.sweep(enc, encode_schedule(enc, schedule))
    _eff, flights, _hover, changes, h1_sum, _pad = res["terms"]
    return SummaryRow(
        drops=len(res["drop_events"]),
        flights=int(flights),
        trajectory_changes=int(changes),
        blank_times=int(h1_sum),
    )


def drops_per_helicopter(instance: Instance, schedule: Schedule) -> dict[str, int]:
    enc = encode_instance(instance)
    res = engine.sweep(enc, encode_schedule(enc, schedule))
    out = {h.id: 0 for h in instance.helicopters}
    for a, _node, _t in res["drop_events"]:
        out[enc.heli_ids[a]] += 1
    return out


# --- exhaustive search on desk-size instances ---------------------------------------


class SearchSpaceError(RuntimeError):
    pass


BRUTE_LIMITS = dict(helicopters=2, horizon=12, fires=2, waters=2, bases=1)
_PAIR_CAP = 3_000_000


def _enumerate_walks(instance: Instance, heli: Helicopter) -> list[tuple]:
    """Every structurally valid timeline for one helicopter."""
    horizon = instance.grid.horizon_intervals
    out_edges: dict[str, list] = {}
    for e in instance.edges:
        out_edges.setdefault(e.tail, []).append((e.head, e.flight_time[heli.id], e))
    walks: list[tuple] = []
    row: list = [AtNode(heli.start_node)]

    def extend(cur: str):
        if len(row) == horizon:
            walks.append(tuple(row))
            return
        row.append(AtNode(cur))
        extend(cur)
        row.pop()
        for head, lam, edge in out_edges.get(cur, ()):
            if len(row) + lam + 1 > horizon:
                continue
            row.extend([Flying(edge.tail, edge.head)] * lam)
            row.append(AtNode(head))
            extend(head)
            del row[-(lam + 1):]

    extend(heli.start_node)
    return walks


_TRAJ_RULES = {34, 35, 36, 37, 38, 39, 40, 41}


def brute_force_optimum(instance: Instance) -> tuple[Schedule, float]:
    """Exhaustively enumerate structurally valid schedules, keep the feasible
    ones, and return the best-scoring schedule.

    Only desk-size instances are accepted (at most 2 helicopters, 12
    intervals, 2 fire nodes, 2 water points, 1 rest base); anything larger is
    refused with a size estimate. Per-helicopter timelines are prefiltered by
    the single-helicopter rules; trajectory rules are only meaningful jointly
    and are left to the full check.
    """
    n = len(instance.helicopters)
    if (
        n > BRUTE_LIMITS["helicopters"]
        or instance.grid.horizon_intervals > BRUTE_LIMITS["horizon"]
        or len(instance.wildfire_points) > BRUTE_LIMITS["fires"]
        or len(instance.water_points) > BRUTE_LIMITS["waters"]
        or len(instance.rest_bases) > BRUTE_LIMITS["bases"]
    ):
        raise SearchSpaceError(
            f"instance exceeds the exhaustive-search bounds {BRUTE_LIMITS}: "
            f"{n} helicopters, {instance.grid.horizon_intervals} intervals, "
            f"{len(instance.wildfire_points)} fires, {len(instance.water_points)} waters, "
            f"{len(instance.rest_bases)} bases"
        )
    enc = encode_instance(instance)
    per_heli: list[list[tuple]] = []
    for k, heli in enumerate(instance.helicopters):
        walks = _enumerate_walks(instance, heli)
        solo = replace(instance, helicopters=(heli,))
        keep = []
        for walk in walks:
            report = check_schedule(solo, Schedule(activities=(walk,)))
            if all(v.rule in _TRAJ_RULES for v in report.entries):
                keep.append(walk)
        per_heli.append(keep)
        if not keep:
            raise SearchSpaceError(f"no feasible timeline exists for {heli.id}")

    total_pairs = math.prod(len(k) for k in per_heli)
    if total_pairs > _PAIR_CAP:
        raise SearchSpaceError(
            f"{total_pairs} candidate schedules exceed the cap of {_PAIR_CAP}"
        )

    best_schedule = None
    best_value = -math.inf
    if n == 1:
        combos: Iterable[tuple] = ((w,) for w in per_heli[0])
    else:
        combos = ((w1, w2) for w1 in per_heli[0] for w2 in per_heli[1])
    for rows in combos:
        sched = Schedule(activities=tuple(rows))
        loc = encode_schedule(enc, sched)
        res = engine.sweep(enc, loc)
        if res["violations"]:
            continue
        from .objective import evaluate_from_terms

        value = evaluate_from_terms(instance, res["terms"]).total
        if value > best_value:
            best_value = value
            best_schedule = sched
    if best_schedule is None:
        raise SearchSpaceError("no feasible schedule exists for this instance")
    return best_schedule, best_value


# --- run comparison -------------------------------------------------------------------


@dataclass(frozen=True)
class RunResult:
    spec_name: str
    algorithm: str
    seed: int
    best_total: float
    checkpoint_values: tuple[tuple[float, float], ...]  # (mark, best)
    summary: dict
    error: Optional[str] = None


def _single_run(instance, spec_name, algo, seed, iterations, budget_seconds, checkpoints):
    try:
        if algo == "sa":
            params = SaParams(
                seed=seed, max_iterations=iterations, wall_clock_budget=budget_seconds,
                checkpoints=tuple(checkpoints),
            )
            best, trace = simulated_annealing(instance, params)
        elif algo == "ils":
            params = IlsParams(
                seed=seed, max_iterations=iterations, wall_clock_budget=budget_seconds,
                checkpoints=tuple(checkpoints),
            )
            best, trace = iterated_local_search(instance, params)
        else:
            raise ValueError(f"unknown algorithm {algo!r}")
        return RunResult(
            spec_name=spec_name,
            algorithm=algo,
            seed=seed,
            best_total=best.total,
            checkpoint_values=tuple((c.at, c.best_total) for c in trace.checkpoints),
            summary=summarize(instance, best.schedule).to_dict(),
        )
    except Exception as exc:  # individual failures are recorded, not fatal
        return RunResult(
            spec_name=spec_name, algorithm=algo, seed=seed, best_total=float("-inf"),
            checkpoint_values=(), summary={}, error=f"{type(exc).__name__}: {exc}",
        )


def run_comparison(
    specs: Sequence[FamilySpec | str],
    algos: Sequence[str] = ("sa", "ils"),
    repetitions: int = 10,
    checkpoints: Sequence[float] = (),
    iterations: Optional[int] = None,
    budget_seconds: Optional[float] = None,
    base_seed: int = 0,
    max_workers: int = 1,
    rdp_epsilon: float = 1e-9,
) -> dict:
    """Run every (instance, algorithm) cell `repetitions` times with distinct
    seeds and aggregate mean/stdev objective per checkpoint plus the RDP
    against the best value seen anywhere for that instance."""
    resolved: list[tuple[FamilySpec, Instance]] = []
    for s in specs:
        spec = CATALOG[s] if isinstance(s, str) else s
        resolved.append((spec, generate_instance(spec)))

    jobs = []
    for spec, instance in resolved:
        for algo in algos:
            for rep in range(repetitions):
                jobs.append(
                    (instance, spec.name, algo, base_seed + rep, iterations,
                     budget_seconds, tuple(checkpoints))
                )
    if max_workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(_single_run, *zip(*jobs)))
    else:
        results = [_single_run(*job) for job in jobs]
    results.sort(key=lambda r: (r.spec_name, r.algorithm, r.seed))

    report: dict = {"cells": [], "runs": [r.__dict__ for r in results]}
    best_by_spec: dict[str, float] = {}
    for r in results:
        if r.error is None:
            best_by_spec[r.spec_name] = max(
                best_by_spec.get(r.spec_name, -math.inf), r.best_total
            )
    for spec, _inst in resolved:
        for algo in algos:
            cell_runs = [
                r for r in results
                if r.spec_name == spec.name and r.algorithm == algo and r.error is None
            ]
            failures = [
                r.error for r in results
                if r.spec_name == spec.name and r.algorithm == algo and r.error is not None
            ]
            if not cell_runs:
                report["cells"].append(
                    {"spec": spec.name, "algorithm": algo, "failures": failures}
                )
                continue
            finals = [r.best_total for r in cell_runs]
            marks = sorted({m for r in cell_runs for m, _v in r.checkpoint_values})
            per_mark = []
            best_anywhere = best_by_spec[spec.name]
            for mark in marks:
                vals = [
                    v for r in cell_runs for m, v in r.checkpoint_values if m == mark
                ]
                mean_v = statistics.fmean(vals)
                per_mark.append(
                    {
                        "mark": mark,
                        "mean": mean_v,
                        "stdev": statistics.pstdev(vals) if len(vals) > 1 else 0.0,
                        "rdp": rdp(best_anywhere, mean_v, rdp_epsilon),
                    }
                )
            report["cells"].append(
                {
                    "spec": spec.name,
                    "algorithm": algo,
                    "runs": len(cell_runs),
                    "mean_best": statistics.fmean(finals),
                    "stdev_best": statistics.pstdev(finals) if len(finals) > 1 else 0.0,
                    "rdp_final": rdp(best_anywhere, statistics.fmean(finals), rdp_epsilon),
                    "checkpoints": per_mark,
                    "failures": failures,
                }
            )
    return report


def attach_external_results(report: dict, csv_path: str, rdp_epsilon: float = 1e-9) -> dict:
    """Merge externally obtained solver values into a comparison report.

    The CSV needs columns `instance,method,best_value` (header required);
    external rows become cells like the native ones, and every cell's RDP is
    recomputed against the new per-instance best. Timing columns from
    external solvers are deliberately not interpreted.
    """
    import csv as csv_mod

    with open(csv_path, "r", encoding="utf-8") as fh:
        rows = list(csv_mod.DictReader(fh))
    best_by_spec: dict[str, float] = {}
    for cell in report["cells"]:
        if "mean_best" in cell:
            best_by_spec[cell["spec"]] = max(
                best_by_spec.get(cell["spec"], -math.inf), cell["mean_best"]
            )
    external_cells = []
    for row in rows:
        spec = row["instance"].strip()
        value = float(row["best_value"])
        best_by_spec[spec] = max(best_by_spec.get(spec, -math.inf), value)
        external_cells.append(
            {"spec": spec, "algorithm": row["method"].strip(), "runs": 1,
             "mean_best": value, "stdev_best": 0.0, "external": True,
             "checkpoints": [], "failures": []}
        )
    merged = dict(report)
    merged["cells"] = list(report["cells"]) + external_cells
    for cell in merged["cells"]:
        if "mean_best" in cell and cell["spec"] in best_by_spec:
            cell["rdp_final"] = rdp(
                best_by_spec[cell["spec"]], cell["mean_best"], rdp_epsilon
            )
    return merged


def format_report(report: dict) -> str:
    """Aligned-text table of the comparison cells."""
    lines = [
        f"{'instance':<10}{'algo':<6}{'runs':>5}{'mean best':>14}{'stdev':>10}{'RDP':>8}"
    ]
    for cell in report["cells"]:
        if "mean_best" not in cell:
            lines.append(f"{cell['spec']:<10}{cell['algorithm']:<6}  all runs failed")
            continue
        lines.append(
            f"{cell['spec']:<10}{cell['algorithm']:<6}{cell['runs']:>5}"
            f"{cell['mean_best']:>14.4f}{cell['stdev_best']:>10.4f}"
            f"{cell['rdp_final']:>8.3f}"
        )
    return "\n".join(lines) + "\n"
