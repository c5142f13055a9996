"""Direct feasibility evaluation of schedules against the full rulebook.

check_schedule is the oracle the metaheuristics and the test suite rely on.
It reports one entry per violated rule occurrence, tagged with the rulebook
number (docs/RULEBOOK.md) and the offending indices, deterministically
ordered by (rule, interval, helicopter).

The change-window slack (rule 42) and the consecutive-work pad are soft
quantities: they feed the objective and never appear as violations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import engine
from .encode import EncodedInstance, encode_instance, encode_schedule
from .model import Instance, Schedule, StructuralError, structural_errors

_RULE_TEXT = {
    1: "rest base over capacity",
    2: "water point over its simultaneous-helicopter limit",
    3: "water point out of water",
    4: "water point draw exceeds initial capacity",
    5: "dropping without water on board",
    6: "loading while already loaded",
    7: "load/drop stay shorter than its required duration",
    13: "left water point without completing a load",
    14: "load completion without presence at the point",
    15: "still at water point after load completion",
    16: "left wildfire node without completing a drop",
    17: "drop completion without presence at the node",
    18: "still at wildfire node after drop completion",
    19: "daily flight-time budget exceeded",
    20: "consecutive work limit exceeded",
    22: "rest break shorter than the regulatory minimum",
    23: "pending initial rest not completed",
    24: "not at a rest base on the final interval",
    25: "not at the assigned start position on interval 1",
    31: "work node visited without a later departure flight",
    35: "trajectory changed its node outside a change window",
    40: "two helicopters of one trajectory on the same node",
    41: "helicopter using a node not assigned to its trajectory",
}


@dataclass(frozen=True)
class Violation:
    rule: int | str
    node: Optional[str]
    helicopter: Optional[str]
    trajectory: Optional[str]
    interval: Optional[int]
    message: str

    def to_json(self) -> str:
        return json.dumps(
            {
                "rule": self.rule,
                "node": self.node,
                "helicopter": self.helicopter,
                "trajectory": self.trajectory,
                "interval": self.interval,
                "message": self.message,
            },
            sort_keys=True,
        )


@dataclass(frozen=True)
class ViolationReport:
    entries: tuple[Violation, ...]

    @property
    def feasible(self) -> bool:
        return not self.entries

    def rules(self) -> set:
        return {v.rule for v in self.entries}

    def to_jsonl(self) -> str:
        return "".join(v.to_json() + "\n" for v in self.entries)

    def __len__(self):
        return len(self.entries)


@dataclass(frozen=True)
class WaterLedger:
    """Per water point: cumulative liters drawn and liters remaining, per
    interval. A completed load draws the helicopter's capacity once, on the
    load completion interval."""

    drawn: np.ndarray  # (n_water, horizon)
    remaining: np.ndarray

    def drawn_at(self, water_index: int, interval: int) -> int:
        return int(self.drawn[water_index, interval - 1])

    def remaining_at(self, water_index: int, interval: int) -> int:
        return int(self.remaining[water_index, interval - 1])


@dataclass(frozen=True)
class FlightLedger:
    """Per helicopter: consecutive-work counter, water-on-board state and the
    nondecreasing pad that keeps the counter nonnegative across rest resets."""

    consec: np.ndarray  # (n_helis, horizon)
    carried: np.ndarray
    pad: np.ndarray

    def consec_at(self, heli_index: int, interval: int) -> float:
        return float(self.consec[heli_index, interval - 1])

    def carried_at(self, heli_index: int, interval: int) -> int:
        return int(self.carried[heli_index, interval - 1])

    def pad_at(self, heli_index: int, interval: int) -> float:
        return float(self.pad[heli_index, interval - 1])


def _decorate(enc: EncodedInstance, raw: list[tuple[int, int, int, int, int]]) -> ViolationReport:
    entries = []
    for rule, i, a, w, t in raw:
        entries.append(
            Violation(
                rule=rule,
                node=enc.node_ids[i] if i >= 0 else None,
                helicopter=enc.heli_ids[a] if a >= 0 else None,
                trajectory=enc.traj_ids[w] if w >= 0 else None,
                interval=t if t >= 0 else None,
                message=_RULE_TEXT.get(rule, f"rule {rule} violated"),
            )
        )
    return ViolationReport(entries=tuple(entries))


def _swept(instance: Instance, schedule: Schedule, enc: EncodedInstance | None = None):
    errs = structural_errors(instance, schedule)
    if errs:
        raise StructuralError("; ".join(errs))
    if enc is None:
        enc = encode_instance(instance)
    loc = encode_schedule(enc, schedule)
    return enc, engine.sweep(enc, loc)


def check_schedule(
    instance: Instance, schedule: Schedule, enc: EncodedInstance | None = None
) -> ViolationReport:
    """Evaluate every rule family against the schedule; empty report means
    feasible. Raises StructuralError when the schedule is not even a timeline."""
    enc, result = _swept(instance, schedule, enc)
    return _decorate(enc, result["violations"])


def build_water_ledger(instance: Instance, schedule: Schedule) -> WaterLedger:
    _enc, result = _swept(instance, schedule)
    return WaterLedger(drawn=result["drawn"], remaining=result["remaining"])


def build_flight_ledger(instance: Instance, schedule: Schedule) -> FlightLedger:
    _enc, result = _swept(instance, schedule)
    return FlightLedger(consec=result["consec"], carried=result["carried"], pad=result["pad"])
