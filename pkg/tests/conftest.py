"""Shared instance builders for the test suite."""

from __future__ import annotations

import pytest

from heliplan.model import (
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
)


def complete_edges(heli_ids, starts, waters, fires, bases, lam=1, lam_overrides=None):
    """Edge set covering every leg a circuit can need, uniform flight time."""
    pairs = []
    for s in starts:
        pairs += [(s, c) for c in waters] + [(s, b) for b in bases]
    for c in waters:
        pairs += [(c, i) for i in fires]
    for i in fires:
        pairs += [(i, c) for c in waters] + [(i, b) for b in bases]
    for b in bases:
        pairs += [(b, c) for c in waters]
    overrides = lam_overrides or {}
    return tuple(
        Edge(tail=t, head=h, flight_time={a: overrides.get((t, h, a), overrides.get((t, h), lam)) for a in heli_ids})
        for t, h in pairs
    )


def make_instance(
    n_helis=1,
    horizon=16,
    n_waters=1,
    n_fires=1,
    n_bases=1,
    trajectories=("w1",),
    traj_of=None,
    ef=10.0,
    lam=1,
    alpha=1,
    mcf=24,
    mtf=100,
    mr=2,
    wc=1000,
    water_capacity=100000,
    water_slots=2,
    base_capacity=4,
    evolution=None,
    interval_minutes=5,
    cfi=None,
    ri=None,
    wli=None,
    lam_overrides=None,
    weights=None,
):
    starts = [f"sp{k + 1}" for k in range(n_helis)]
    waters = [f"c{k + 1}" for k in range(n_waters)]
    fires = [f"i{k + 1}" for k in range(n_fires)]
    bases = [f"b{k + 1}" for k in range(n_bases)]
    heli_ids = [f"h{k + 1}" for k in range(n_helis)]
    if isinstance(ef, (int, float)):
        ef_rows = {i: tuple(float(ef) for _ in range(horizon)) for i in fires}
    else:
        ef_rows = {i: tuple(ef[i]) for i in fires}
    helis = tuple(
        Helicopter(
            id=h,
            start_node=starts[k],
            water_capacity_liters=wc if isinstance(wc, int) else wc[k],
            initial_water_loaded=0 if wli is None else wli[k],
            consecutive_flight_so_far=0 if cfi is None else cfi[k],
            total_flight_today=0,
            max_consecutive_flight=mcf,
            max_total_flight=mtf,
            consecutive_rest_so_far=0 if ri is None else ri[k],
            min_rest=mr,
            trajectory_id=(traj_of[k] if traj_of else trajectories[0]),
            load_or_drop_time={node: alpha for node in waters + fires},
        )
        for k, h in enumerate(heli_ids)
    )
    return Instance(
        grid=TimeGrid(interval_minutes=interval_minutes, horizon_intervals=horizon),
        start_positions=tuple(StartPosition(id=s) for s in starts),
        water_points=tuple(
            WaterPoint(
                id=c,
                initial_capacity_liters=water_capacity,
                simultaneous_helicopters=water_slots,
            )
            for c in waters
        ),
        wildfire_points=tuple(
            WildfireNode(id=i, efficiency_by_interval=ef_rows[i]) for i in fires
        ),
        rest_bases=tuple(RestBase(id=b, capacity=base_capacity) for b in bases),
        edges=complete_edges(heli_ids, starts, waters, fires, bases, lam, lam_overrides),
        helicopters=helis,
        trajectories=tuple(trajectories),
        evolution=tuple(evolution) if evolution else tuple(0 for _ in range(horizon)),
        weights=weights or ObjectiveWeights(),
    )


def timeline(*specs):
    """Expand ('sp1', 3) / ('fly', 'sp1', 'c1'[, n]) fragments into an activity row."""
    row = []
    for spec in specs:
        if spec[0] == "fly":
            n = spec[3] if len(spec) > 3 else 1
            row.extend([Flying(spec[1], spec[2])] * n)
        else:
            node, n = spec
            row.extend([AtNode(node)] * n)
    return tuple(row)


def one_circuit_row(horizon, start="sp1", water="c1", fire="i1", base="b1"):
    """start, fly, load, fly, drop, fly, rest-to-end (unit legs and stays)."""
    return timeline(
        (start, 1),
        ("fly", start, water),
        (water, 1),
        ("fly", water, fire),
        (fire, 1),
        ("fly", fire, base),
        (base, horizon - 6),
    )


@pytest.fixture
def tiny():
    return make_instance()


@pytest.fixture
def tiny_schedule(tiny):
    return Schedule(activities=(one_circuit_row(tiny.grid.horizon_intervals),))
