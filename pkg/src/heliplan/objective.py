"""Schedule scoring: the six-term objective, its normalizers, and the RDP
stability metric used by the benchmark harness.

The score maximizes normalized drop efficiency and subtracts weighted
penalties for flying time, hover (load/drop) time, trajectory changes, idle
intervals with nobody working, and the consecutive-work pad. The first four
terms are normalized; the idle and pad terms enter raw.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import engine
from .encode import encode_instance, encode_schedule
from .model import (
    Instance,
    Normalizers,
    ObjectiveWeights,
    Schedule,
    StructuralError,
    structural_errors,
)

DEFAULT_RDP_EPSILON = 1e-9


@dataclass(frozen=True)
class ObjectiveValue:
    total: float
    efficiency_raw: float
    flights_raw: int
    hover_raw: int
    changes_raw: int
    h1_sum: int
    faux_sum: float
    efficiency_term: float
    flights_term: float
    hover_term: float
    changes_term: float
    idle_term: float
    pad_term: float

    def decomposition_lines(self) -> list[str]:
        return [
            f"total: {self.total:.6f}",
            f"efficiency_raw: {self.efficiency_raw:g}",
            f"flights_raw: {self.flights_raw}",
            f"hover_raw: {self.hover_raw}",
            f"changes_raw: {self.changes_raw}",
            f"h1_sum: {self.h1_sum}",
            f"faux_sum: {self.faux_sum:g}",
            f"efficiency_term: {self.efficiency_term:.6f}",
            f"flights_term: {self.flights_term:.6f}",
            f"hover_term: {self.hover_term:.6f}",
            f"changes_term: {self.changes_term:.6f}",
            f"idle_term: {self.idle_term:.6f}",
            f"pad_term: {self.pad_term:.6f}",
        ]

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "efficiency_raw": self.efficiency_raw,
            "flights_raw": self.flights_raw,
            "hover_raw": self.hover_raw,
            "changes_raw": self.changes_raw,
            "h1_sum": self.h1_sum,
            "faux_sum": self.faux_sum,
            "efficiency_term": self.efficiency_term,
            "flights_term": self.flights_term,
            "hover_term": self.hover_term,
            "changes_term": self.changes_term,
            "idle_term": self.idle_term,
            "pad_term": self.pad_term,
        }


def compute_normalizers(instance: Instance) -> Normalizers:
    """Scale factors for the four normalized terms, from instance bounds.

    efficiency: horizon * best efficiency anywhere * total fleet capacity;
    flights and hover: fleet size * horizon; changes: trajectories * horizon.
    Each is clamped below by 1 so a degenerate instance never divides by zero.
    """
    horizon = instance.grid.horizon_intervals
    max_ef = 0.0
    for f in instance.wildfire_points:
        for v in f.efficiency_by_interval:
            if v > max_ef:
                max_ef = v
    fleet_capacity = sum(h.water_capacity_liters for h in instance.helicopters)
    n_helis = len(instance.helicopters)
    n_traj = len(instance.trajectories)
    return Normalizers(
        efficiency=max(1.0, horizon * max_ef * fleet_capacity),
        flights=max(1.0, n_helis * horizon),
        hover=max(1.0, n_helis * horizon),
        changes=max(1.0, n_traj * horizon),
    )


def score_terms(
    weights: ObjectiveWeights,
    norms: Normalizers,
    efficiency_raw: float,
    flights_raw: int,
    hover_raw: int,
    changes_raw: int,
    h1_sum: int,
    faux_sum: float,
) -> ObjectiveValue:
    efficiency_term = efficiency_raw / norms.efficiency
    flights_term = weights.flights * flights_raw / norms.flights
    hover_term = weights.hover * hover_raw / norms.hover
    changes_term = weights.changes * changes_raw / norms.changes
    idle_term = weights.idle * h1_sum
    pad_term = weights.pad * faux_sum
    total = efficiency_term - flights_term - hover_term - changes_term - idle_term - pad_term
    return ObjectiveValue(
        total=total,
        efficiency_raw=efficiency_raw,
        flights_raw=flights_raw,
        hover_raw=hover_raw,
        changes_raw=changes_raw,
        h1_sum=h1_sum,
        faux_sum=faux_sum,
        efficiency_term=efficiency_term,
        flights_term=flights_term,
        hover_term=hover_term,
        changes_term=changes_term,
        idle_term=idle_term,
        pad_term=pad_term,
    )


def evaluate(instance: Instance, schedule: Schedule, enc=None) -> ObjectiveValue:
    """Score a structurally valid schedule (it need not be feasible)."""
    errs = structural_errors(instance, schedule)
    if errs:
        raise StructuralError("; ".join(errs))
    if enc is None:
        enc = encode_instance(instance)
    loc = encode_schedule(enc, schedule)
    result = engine.sweep(enc, loc)
    return evaluate_from_terms(instance, result["terms"])


def evaluate_from_terms(instance: Instance, terms) -> ObjectiveValue:
    efficiency_raw, flights_raw, hover_raw, changes_raw, h1_sum, faux_sum = terms
    norms = instance.weights.normalizers or compute_normalizers(instance)
    return score_terms(
        instance.weights, norms, efficiency_raw, flights_raw, hover_raw, changes_raw,
        h1_sum, faux_sum,
    )


def rdp(best: float, current: float, epsilon: float = DEFAULT_RDP_EPSILON) -> float:
    """Relative distance of a result from the best-known value:
    (best - current) / (best + epsilon)."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    return (best - current) / (best + epsilon)
