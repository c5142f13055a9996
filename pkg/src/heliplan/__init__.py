"""heliplan: decision-support scheduling for firefighting helicopter fleets.

Plans the water-loading points, drop zones and rest bases of a helicopter
fleet over a discrete horizon, under Spanish flight-time regulation. Exposes
a feasibility oracle, an exact LP model export, greedy construction, two
improvement metaheuristics (simulated annealing and iterated local search),
a benchmark harness, a CLI and an HTTP planning service.
"""

from .model import (
    AtNode,
    Edge,
    EventStreams,
    Flying,
    Helicopter,
    Instance,
    Normalizers,
    ObjectiveWeights,
    RestBase,
    Schedule,
    StartPosition,
    StructuralError,
    TimeGrid,
    UNPLACED,
    Unplaced,
    WaterPoint,
    WildfireNode,
    derive_events,
    minutes_to_intervals,
    structural_errors,
    validate_instance,
)
from .feasibility import ViolationReport, check_schedule
from .objective import ObjectiveValue, compute_normalizers, evaluate, rdp

__version__ = "0.1.0"

__all__ = [
    "AtNode",
    "Edge",
    "EventStreams",
    "Flying",
    "Helicopter",
    "Instance",
    "Normalizers",
    "ObjectiveValue",
    "ObjectiveWeights",
    "RestBase",
    "Schedule",
    "StartPosition",
    "StructuralError",
    "TimeGrid",
    "UNPLACED",
    "Unplaced",
    "ViolationReport",
    "WaterPoint",
    "WildfireNode",
    "check_schedule",
    "compute_normalizers",
    "derive_events",
    "evaluate",
    "minutes_to_intervals",
    "rdp",
    "structural_errors",
    "validate_instance",
]
