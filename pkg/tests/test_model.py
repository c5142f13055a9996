import dataclasses

import pytest
from hypothesis import given, strategies as st

from heliplan.model import (
    Schedule,
    StructuralError,
    TimeGrid,
    derive_events,
    minutes_to_intervals,
    structural_errors,
    validate_instance,
)

from conftest import make_instance, timeline


GRID5 = TimeGrid(interval_minutes=5, horizon_intervals=24)


class TestMinutesToIntervals:
    def test_two_hours_on_five_minute_grid(self):
        assert minutes_to_intervals(120, GRID5) == 24

    def test_forty_minutes_on_five_minute_grid(self):
        assert minutes_to_intervals(40, GRID5) == 8

    def test_zero(self):
        assert minutes_to_intervals(0, GRID5) == 0

    def test_rounds_up(self):
        assert minutes_to_intervals(41, GRID5) == 9
        assert minutes_to_intervals(44, GRID5) == 9
        assert minutes_to_intervals(45, GRID5) == 9
        assert minutes_to_intervals(46, GRID5) == 10

    @given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=0, max_value=10_000))
    def test_monotone(self, m1, m2):
        lo, hi = sorted((m1, m2))
        assert minutes_to_intervals(lo, GRID5) <= minutes_to_intervals(hi, GRID5)


class TestValidateInstance:
    def test_well_formed_instance_is_clean(self):
        inst = make_instance(n_helis=2, traj_of=["w1", "w2"], trajectories=("w1", "w2"))
        assert validate_instance(inst) == []

    def test_efficiency_out_of_range_is_reported_with_location(self):
        inst = make_instance()
        bad_fire = dataclasses.replace(
            inst.wildfire_points[0],
            efficiency_by_interval=(11.0,) + inst.wildfire_points[0].efficiency_by_interval[1:],
        )
        inst = dataclasses.replace(inst, wildfire_points=(bad_fire,))
        diags = [d for d in validate_instance(inst) if d.severity == "error"]
        assert len(diags) == 1
        assert "i1" in diags[0].path and "[1]" in diags[0].path

    def test_unknown_trajectory_is_reported(self):
        inst = make_instance()
        bad = dataclasses.replace(inst.helicopters[0], trajectory_id="nope")
        inst = dataclasses.replace(inst, helicopters=(bad,))
        diags = [d for d in validate_instance(inst) if d.severity == "error"]
        assert len(diags) == 1
        assert "trajectory_id" in diags[0].path

    def test_nonstandard_interval_is_warned_not_errored(self):
        inst = make_instance(interval_minutes=7)
        diags = validate_instance(inst)
        assert all(d.severity == "warning" for d in diags)
        assert any("interval_minutes" in d.path for d in diags)

    def test_evolution_flag_mismatch_warns(self):
        horizon = 16
        ef_vec = [10.0] * 8 + [5.0] * 8  # change at interval 9, no flag set
        inst = make_instance(horizon=horizon, ef={"i1": ef_vec})
        diags = validate_instance(inst)
        assert any(d.severity == "warning" and "evolution[9]" in d.path for d in diags)


class TestStructuralErrors:
    def test_valid_circuit_row(self, tiny, tiny_schedule):
        assert structural_errors(tiny, tiny_schedule) == []

    def test_teleport_is_flagged(self, tiny):
        horizon = tiny.grid.horizon_intervals
        row = timeline(("sp1", 1), ("b1", horizon - 1))
        errs = structural_errors(tiny, Schedule(activities=(row,)))
        assert any("without flying" in e for e in errs)

    def test_wrong_first_interval(self, tiny):
        horizon = tiny.grid.horizon_intervals
        row = timeline(("b1", horizon))
        errs = structural_errors(tiny, Schedule(activities=(row,)))
        assert any("interval 1" in e for e in errs)

    def test_flight_run_length_must_match_edge(self, tiny):
        horizon = tiny.grid.horizon_intervals
        row = timeline(
            ("sp1", 1),
            ("fly", "sp1", "c1", 2),  # doubled: run of 2 but edge needs 1
            ("c1", 1),
            ("fly", "c1", "i1"),
            ("i1", 1),
            ("fly", "i1", "b1"),
            ("b1", horizon - 7),
        )
        errs = structural_errors(tiny, Schedule(activities=(row,)))
        assert any("lasts 2 intervals" in e for e in errs)


class TestDeriveEvents:
    def test_load_completion_uses_shifted_index(self):
        # stay at the water point on intervals 3..4 with a 2-interval load,
        # event on interval 5 (the departure interval)
        inst = make_instance(horizon=16, alpha=2)
        row = timeline(
            ("sp1", 1),
            ("fly", "sp1", "c1"),
            ("c1", 2),  # intervals 3..4
            ("fly", "c1", "i1"),
            ("i1", 2),  # intervals 6..7
            ("fly", "i1", "b1"),
            ("b1", 16 - 8),
        )
        ev = derive_events(Schedule(activities=(row,)), inst)
        assert ev.load_complete["h1"] == (("c1", 5),)
        assert ev.drop_complete["h1"] == (("i1", 8),)

    def test_never_leaving_start_gives_no_events(self):
        inst = make_instance(horizon=8)
        row = timeline(("sp1", 8))
        ev = derive_events(Schedule(activities=(row,)), inst)
        assert ev.load_complete["h1"] == ()
        assert ev.drop_complete["h1"] == ()
        assert ev.rest_end["h1"] == ()

    def test_rest_end_fires_on_last_rest_interval(self):
        # rest exactly min_rest long, then fly out again
        inst = make_instance(horizon=16, mr=3)
        row = timeline(
            ("sp1", 1),
            ("fly", "sp1", "b1"),
            ("b1", 3),  # intervals 3..5
            ("fly", "b1", "c1"),
            ("c1", 1),
            ("fly", "c1", "i1"),
            ("i1", 1),
            ("fly", "i1", "b1"),
            ("b1", 16 - 10),
        )
        ev = derive_events(Schedule(activities=(row,)), inst)
        assert ev.rest_end["h1"] == (("b1", 5),)

    def test_rest_running_to_horizon_emits_no_event(self, tiny, tiny_schedule):
        ev = derive_events(tiny_schedule, tiny)
        assert ev.rest_end["h1"] == ()

    def test_pure_function_of_schedule(self, tiny, tiny_schedule):
        ev1 = derive_events(tiny_schedule, tiny)
        ev2 = derive_events(tiny_schedule, tiny)
        assert ev1 == ev2

    def test_structurally_invalid_schedule_raises(self, tiny):
        horizon = tiny.grid.horizon_intervals
        row = timeline(("sp1", 1), ("i1", horizon - 1))
        with pytest.raises(StructuralError):
            derive_events(Schedule(activities=(row,)), tiny)

    def test_loads_and_drops_balance_with_water_state(self, tiny, tiny_schedule):
        ev = derive_events(tiny_schedule, tiny)
        heli = tiny.helicopters[0]
        final_loaded = 0  # ends resting, empty
        assert len(ev.load_complete["h1"]) == len(ev.drop_complete["h1"]) + (
            final_loaded - heli.initial_water_loaded
        )


class TestScheduleIo:
    def test_schedule_json_round_trip(self, tiny, tiny_schedule, tmp_path):
        from heliplan.instance_io import load_schedule, save_schedule

        path = tmp_path / "schedule.json"
        save_schedule(tiny, tiny_schedule, str(path))
        again = load_schedule(tiny, str(path))
        assert again == tiny_schedule

    def test_instance_json_round_trip(self, tiny, tmp_path):
        from heliplan.instance_io import load_instance, save_instance

        path = tmp_path / "instance.json"
        save_instance(tiny, str(path))
        again = load_instance(str(path))
        assert again == tiny
