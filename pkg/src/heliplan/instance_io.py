"""Instance and schedule JSON serialization.

docs/FORMAT.md is the normative description of both documents. Durations may
be written either as bare integers (grid intervals) or as objects
{"value": v, "unit": "min"} which are converted with ceiling rounding.
Serialization is canonical (sorted keys, fixed separators) so identical data
always produces identical bytes.
"""

from __future__ import annotations

import json
from typing import Any, Mapping

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
    UNPLACED,
    WaterPoint,
    WildfireNode,
    minutes_to_intervals,
)


class FormatError(ValueError):
    pass


def _duration(value: Any, grid: TimeGrid, path: str) -> int:
    if isinstance(value, bool):
        raise FormatError(f"{path}: booleans are not durations")
    if isinstance(value, int):
        return value
    if isinstance(value, Mapping):
        unit = value.get("unit", "intervals")
        raw = value.get("value")
        if not isinstance(raw, (int, float)) or isinstance(raw, bool):
            raise FormatError(f"{path}: duration value must be a number")
        if unit == "min":
            return minutes_to_intervals(int(raw), grid)
        if unit == "intervals":
            return int(raw)
        raise FormatError(f"{path}: unknown duration unit {unit!r}")
    raise FormatError(f"{path}: expected an integer or a value/unit object")


def _coords(raw: Any) -> tuple[float, float] | None:
    if raw is None:
        return None
    return (float(raw[0]), float(raw[1]))


def instance_from_dict(doc: Mapping[str, Any]) -> Instance:
    try:
        grid_doc = doc["grid"]
        grid = TimeGrid(
            interval_minutes=int(grid_doc["interval_minutes"]),
            horizon_intervals=int(grid_doc["horizon_intervals"]),
            start_clock=grid_doc.get("start_clock"),
        )
        nodes = doc["nodes"]
        starts = tuple(
            StartPosition(id=n["id"], coordinates=_coords(n.get("coordinates")))
            for n in nodes.get("start_positions", [])
        )
        waters = tuple(
            WaterPoint(
                id=n["id"],
                initial_capacity_liters=int(n["initial_capacity_liters"]),
                simultaneous_helicopters=int(n["simultaneous_helicopters"]),
                coordinates=_coords(n.get("coordinates")),
            )
            for n in nodes.get("water_points", [])
        )
        fires = tuple(
            WildfireNode(
                id=n["id"],
                efficiency_by_interval=tuple(float(v) for v in n["efficiency_by_interval"]),
                coordinates=_coords(n.get("coordinates")),
            )
            for n in nodes.get("wildfire_points", [])
        )
        bases = tuple(
            RestBase(
                id=n["id"],
                capacity=int(n["capacity"]),
                coordinates=_coords(n.get("coordinates")),
            )
            for n in nodes.get("rest_bases", [])
        )
        edges = tuple(
            Edge(
                tail=e["from"],
                head=e["to"],
                flight_time={
                    hid: _duration(v, grid, f"edges[{k}].flight_time.{hid}")
                    for hid, v in e["flight_time"].items()
                },
            )
            for k, e in enumerate(doc.get("edges", []))
        )
        helis = tuple(
            Helicopter(
                id=h["id"],
                start_node=h["start_node"],
                water_capacity_liters=int(h["water_capacity_liters"]),
                initial_water_loaded=int(h["initial_water_loaded"]),
                consecutive_flight_so_far=_duration(
                    h.get("consecutive_flight_so_far", 0), grid, "consecutive_flight_so_far"
                ),
                total_flight_today=_duration(
                    h.get("total_flight_today", 0), grid, "total_flight_today"
                ),
                max_consecutive_flight=_duration(
                    h["max_consecutive_flight"], grid, "max_consecutive_flight"
                ),
                max_total_flight=_duration(h["max_total_flight"], grid, "max_total_flight"),
                consecutive_rest_so_far=_duration(
                    h.get("consecutive_rest_so_far", 0), grid, "consecutive_rest_so_far"
                ),
                min_rest=_duration(h["min_rest"], grid, "min_rest"),
                trajectory_id=h["trajectory_id"],
                load_or_drop_time={
                    nid: _duration(v, grid, f"helicopters.{h['id']}.load_or_drop_time.{nid}")
                    for nid, v in h["load_or_drop_time"].items()
                },
            )
            for h in doc.get("helicopters", [])
        )
        weights = weights_from_dict(doc.get("weights"))
        return Instance(
            grid=grid,
            start_positions=starts,
            water_points=waters,
            wildfire_points=fires,
            rest_bases=bases,
            edges=edges,
            helicopters=helis,
            trajectories=tuple(doc.get("trajectories", [])),
            evolution=tuple(int(v) for v in doc.get("evolution", [])),
            weights=weights,
        )
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed instance document: {exc}") from exc


def weights_from_dict(doc: Mapping[str, Any] | None) -> ObjectiveWeights:
    if doc is None:
        return ObjectiveWeights()
    norm_doc = doc.get("normalizers")
    normalizers = None
    if norm_doc is not None:
        normalizers = Normalizers(
            efficiency=float(norm_doc["efficiency"]),
            flights=float(norm_doc["flights"]),
            hover=float(norm_doc["hover"]),
            changes=float(norm_doc["changes"]),
        )
    return ObjectiveWeights(
        flights=float(doc.get("flights", 0.1)),
        hover=float(doc.get("hover", 0.05)),
        changes=float(doc.get("changes", 0.01)),
        idle=float(doc.get("idle", 0.005)),
        pad=float(doc.get("pad", 0.001)),
        normalizers=normalizers,
    )


def instance_to_dict(inst: Instance) -> dict[str, Any]:
    def node_common(n):
        d: dict[str, Any] = {"id": n.id}
        if n.coordinates is not None:
            d["coordinates"] = list(n.coordinates)
        return d

    doc: dict[str, Any] = {
        "grid": {
            "interval_minutes": inst.grid.interval_minutes,
            "horizon_intervals": inst.grid.horizon_intervals,
        },
        "nodes": {
            "start_positions": [node_common(n) for n in inst.start_positions],
            "water_points": [
                node_common(n)
                | {
                    "initial_capacity_liters": n.initial_capacity_liters,
                    "simultaneous_helicopters": n.simultaneous_helicopters,
                }
                for n in inst.water_points
            ],
            "wildfire_points": [
                node_common(n) | {"efficiency_by_interval": list(n.efficiency_by_interval)}
                for n in inst.wildfire_points
            ],
            "rest_bases": [node_common(n) | {"capacity": n.capacity} for n in inst.rest_bases],
        },
        "edges": [
            {"from": e.tail, "to": e.head, "flight_time": dict(sorted(e.flight_time.items()))}
            for e in inst.edges
        ],
        "helicopters": [
            {
                "id": h.id,
                "start_node": h.start_node,
                "water_capacity_liters": h.water_capacity_liters,
                "initial_water_loaded": h.initial_water_loaded,
                "consecutive_flight_so_far": h.consecutive_flight_so_far,
                "total_flight_today": h.total_flight_today,
                "max_consecutive_flight": h.max_consecutive_flight,
                "max_total_flight": h.max_total_flight,
                "consecutive_rest_so_far": h.consecutive_rest_so_far,
                "min_rest": h.min_rest,
                "trajectory_id": h.trajectory_id,
                "load_or_drop_time": dict(sorted(h.load_or_drop_time.items())),
            }
            for h in inst.helicopters
        ],
        "trajectories": list(inst.trajectories),
        "evolution": list(inst.evolution),
        "weights": weights_to_dict(inst.weights),
    }
    if inst.grid.start_clock is not None:
        doc["grid"]["start_clock"] = inst.grid.start_clock
    return doc


def weights_to_dict(w: ObjectiveWeights) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "flights": w.flights,
        "hover": w.hover,
        "changes": w.changes,
        "idle": w.idle,
        "pad": w.pad,
    }
    if w.normalizers is not None:
        doc["normalizers"] = {
            "efficiency": w.normalizers.efficiency,
            "flights": w.normalizers.flights,
            "hover": w.normalizers.hover,
            "changes": w.normalizers.changes,
        }
    return doc


def dumps_canonical(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def load_instance(path: str) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        return instance_from_dict(json.load(fh))


def save_instance(inst: Instance, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_canonical(instance_to_dict(inst)))


# --- schedules ---------------------------------------------------------------


def schedule_to_dict(inst: Instance, schedule: Schedule) -> dict[str, Any]:
    rows = {}
    for heli, row in zip(inst.helicopters, schedule.activities):
        cells = []
        for act in row:
            if isinstance(act, AtNode):
                cells.append({"at": act.node})
            elif isinstance(act, Flying):
                cells.append({"fly": [act.tail, act.head]})
            else:
                cells.append({"unplaced": True})
        rows[heli.id] = cells
    return {"helicopters": rows}


def schedule_from_dict(inst: Instance, doc: Mapping[str, Any]) -> Schedule:
    rows = doc["helicopters"]
    activities = []
    for heli in inst.helicopters:
        if heli.id not in rows:
            raise FormatError(f"schedule missing helicopter {heli.id!r}")
        cells = []
        for k, cell in enumerate(rows[heli.id]):
            if "at" in cell:
                cells.append(AtNode(cell["at"]))
            elif "fly" in cell:
                cells.append(Flying(cell["fly"][0], cell["fly"][1]))
            elif cell.get("unplaced"):
                cells.append(UNPLACED)
            else:
                raise FormatError(f"{heli.id}[{k + 1}]: unknown activity record {cell!r}")
        activities.append(tuple(cells))
    return Schedule(activities=tuple(activities))


def load_schedule(inst: Instance, path: str) -> Schedule:
    with open(path, "r", encoding="utf-8") as fh:
        return schedule_from_dict(inst, json.load(fh))


def save_schedule(inst: Instance, schedule: Schedule, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_canonical(schedule_to_dict(inst, schedule)))
