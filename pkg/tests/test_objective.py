import math

import pytest

from heliplan.model import Normalizers, ObjectiveWeights, Schedule
from heliplan.objective import compute_normalizers, evaluate, rdp

from conftest import make_instance, one_circuit_row, timeline


class TestWeights:
    def test_default_weights_are_strictly_ordered(self):
        w = ObjectiveWeights()
        assert w.flights > w.hover > w.changes > w.idle > w.pad

    def test_ordering_enforced_at_construction(self):
        with pytest.raises(ValueError):
            ObjectiveWeights(flights=0.01, hover=0.05)

    def test_negative_weight_rejected(self):
        with pytest.raises(ValueError):
            ObjectiveWeights(pad=-0.1)


class TestNormalizers:
    def test_zero_efficiency_clamps_to_one(self):
        inst = make_instance(ef=0.0)
        assert compute_normalizers(inst).efficiency == 1.0

    def test_efficiency_normalizer_formula(self):
        inst = make_instance(n_helis=2, horizon=24, wc=[1000, 1000],
                             traj_of=["w1", "w1"], ef=10.0)
        assert compute_normalizers(inst).efficiency == 24 * 10 * 2000

    def test_flights_normalizer_formula(self):
        inst = make_instance(n_helis=5, horizon=48, traj_of=["w1"] * 5)
        norms = compute_normalizers(inst)
        assert norms.flights == 240
        assert norms.hover == 240


class TestEvaluate:
    def test_parked_schedule_scores_pure_idle_penalty(self):
        inst = make_instance(horizon=16)
        row = timeline(("sp1", 16))  # ignores the end-at-base rule on purpose
        value = evaluate(inst, Schedule(activities=(row,)))
        assert value.efficiency_raw == 0
        assert value.flights_raw == 0
        assert value.hover_raw == 0
        assert value.h1_sum == 16 - 2
        assert value.total == pytest.approx(-inst.weights.idle * (16 - 2))

    def test_single_circuit_terms(self, tiny, tiny_schedule):
        value = evaluate(tiny, tiny_schedule)
        assert value.efficiency_raw == 10 * 1000  # one drop interval at ef 10
        assert value.flights_raw == 3
        assert value.hover_raw == 2
        assert value.changes_raw == 0
        assert value.faux_sum == 0

    def test_extra_drop_interval_raises_efficiency_term(self):
        inst = make_instance(horizon=20, alpha=1)
        one = one_circuit_row(20)
        two = timeline(
            ("sp1", 1),
            ("fly", "sp1", "c1"),
            ("c1", 1),
            ("fly", "c1", "i1"),
            ("i1", 1),
            ("fly", "i1", "c1"),
            ("c1", 1),
            ("fly", "c1", "i1"),
            ("i1", 1),
            ("fly", "i1", "b1"),
            ("b1", 20 - 10),
        )
        v1 = evaluate(inst, Schedule(activities=(one,)))
        v2 = evaluate(inst, Schedule(activities=(two,)))
        assert v2.efficiency_raw - v1.efficiency_raw == 10 * 1000
        assert v2.efficiency_term > v1.efficiency_term

    def test_decomposition_sums_to_total(self, tiny, tiny_schedule):
        v = evaluate(tiny, tiny_schedule)
        recomputed = (
            v.efficiency_term - v.flights_term - v.hover_term - v.changes_term
            - v.idle_term - v.pad_term
        )
        assert math.isclose(recomputed, v.total, rel_tol=1e-12)

    def test_explicit_normalizer_overrides_are_used(self, tiny_schedule):
        inst = make_instance(
            weights=ObjectiveWeights(
                normalizers=Normalizers(efficiency=10000.0, flights=1.0, hover=1.0, changes=1.0)
            )
        )
        v = evaluate(inst, tiny_schedule)
        assert v.efficiency_term == pytest.approx(1.0)  # 10000 / 10000

    def test_pure_function(self, tiny, tiny_schedule):
        assert evaluate(tiny, tiny_schedule) == evaluate(tiny, tiny_schedule)


class TestRdp:
    def test_equal_values_give_zero(self):
        assert rdp(5.0, 5.0) == 0.0

    def test_direct_formula(self):
        assert rdp(10.0, 8.0, 1e-9) == pytest.approx(0.2)

    def test_zero_over_epsilon(self):
        assert rdp(0.0, 0.0, 1e-9) == 0.0

    def test_in_unit_range_for_sane_inputs(self):
        for best, cur in [(1.0, 0.0), (3.5, 2.0), (100.0, 99.9)]:
            assert 0 <= rdp(best, cur) < 1

    def test_epsilon_must_be_positive(self):
        with pytest.raises(ValueError):
            rdp(1.0, 1.0, 0.0)


from hypothesis import given, strategies as st


class TestRdpProperties:
    @given(
        best=st.floats(min_value=1e-6, max_value=1e6, allow_nan=False),
        frac=st.floats(min_value=0.0, max_value=1.0),
    )
    def test_stays_in_unit_interval_for_dominated_values(self, best, frac):
        current = best * frac
        value = rdp(best, current)
        assert 0.0 <= value < 1.0
