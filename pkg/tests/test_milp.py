import re

import numpy as np
import pytest

from heliplan.feasibility import check_schedule
from heliplan.milp import (
    ModelSizeError,
    build_milp,
    check_assignment,
    emit_lp,
    objective_value,
    schedule_to_assignment,
)
from heliplan.model import Schedule
from heliplan.objective import evaluate

from conftest import make_instance, timeline
from util import parse_lp, random_schedule


def s1_shaped():
    return make_instance(
        n_helis=2, horizon=24, n_waters=5, n_fires=3, n_bases=5,
        trajectories=("w1", "w2"), traj_of=["w1", "w2"],
    )


def hard_rules(report):
    return sorted({e.rule for e in report.entries if isinstance(e.rule, int)})


def aux_tags(report):
    return sorted({e.rule for e in report.entries if isinstance(e.rule, str)})


class TestBuild:
    def test_s1_shape_builds_with_deterministic_counts(self):
        m1 = build_milp(s1_shaped())
        m2 = build_milp(s1_shaped())
        assert (m1.n_rows, m1.n_variables) == (m2.n_rows, m2.n_variables)
        assert m1.n_rows > 0

    def test_variable_census(self):
        inst = make_instance(n_helis=2, horizon=6, traj_of=["w1", "w1"])
        m = build_milp(inst)
        enc = m.enc
        T, A = enc.horizon, enc.n_helis
        prefix = lambda p: sum(1 for n in m.var_names if n.startswith(p))
        assert prefix("y_") == enc.n_nodes * A * T
        assert prefix("x_") == enc.n_edges * A * T
        assert prefix("e_") == 1 * A * T  # one base
        assert prefix("ec_") == 1 * A * T
        assert prefix("ed_") == 1 * A * T
        assert prefix("r_") == 2 * 1 * T  # water + fire nodes, one trajectory
        assert prefix("h1_") == T
        assert prefix("faux_") == A * T
        assert prefix("cntv_") == A * T

    def test_two_interval_horizon_first_interval_rows(self):
        inst = make_instance(horizon=2)
        m = build_milp(inst)
        # rows indexed t>1 appear exactly once per remaining index combination
        c37 = [r for r in m.rows if r.rule == 37]
        assert len(c37) == 1  # one trajectory, one interval beyond the first

    def test_size_guard_refuses_with_counts(self):
        inst = make_instance(n_helis=4, horizon=48, n_waters=6, n_fires=6, n_bases=4,
                             traj_of=["w1"] * 4)
        with pytest.raises(ModelSizeError, match="helicopters"):
            build_milp(inst, row_limit=1000)

    def test_every_registry_name_is_wellformed(self):
        m = build_milp(make_instance())
        for name in m.var_names:
            assert len(name) <= 255
            assert re.fullmatch(r"[A-Za-z0-9_]+", name)


class TestEmit:
    def test_emission_is_byte_stable(self):
        m = build_milp(make_instance())
        assert emit_lp(m) == emit_lp(m)

    def test_reparse_matches_registry(self):
        m = build_milp(make_instance(n_helis=2, horizon=8, traj_of=["w1", "w1"]))
        doc = parse_lp(emit_lp(m))
        assert len(doc["rows"]) == m.n_rows
        binaries = {n for n, k in zip(m.var_names, m.var_kinds) if k == "binary"}
        assert doc["binaries"] == binaries
        frees = {n for n, k in zip(m.var_names, m.var_kinds) if k == "free"}
        assert doc["free"] == frees
        seen = {n for r in doc["rows"] for n in r["terms"]} | set(doc["objective"])
        assert seen <= set(m.var_names)

    def test_row_names_embed_rule_numbers(self):
        m = build_milp(make_instance())
        for row in m.rows:
            if isinstance(row.rule, int):
                assert row.name.startswith(f"c{row.rule}")
            else:
                assert row.name.startswith(row.rule.lower())


class TestAssignment:
    def test_all_zero_assignment_violates_endpoint_rows(self):
        inst = make_instance(horizon=8)
        m = build_milp(inst)
        report = check_assignment(m, {})
        assert hard_rules(report) == [24, 25]
        assert aux_tags(report) == ["AUX2", "AUX3"]  # stock definitions need ca = CA

    def test_parked_schedule_sets_only_start_presence(self):
        inst = make_instance(horizon=8)
        m = build_milp(inst)
        row = timeline(("sp1", 8))
        asg = schedule_to_assignment(inst, Schedule(activities=(row,)), m)
        assert all(not k.startswith("x_") for k in asg)
        assert [k for k in asg if k.startswith("y_")] == [f"y_sp1_h1_{t}" for t in range(1, 9)]

    def test_single_circuit_has_one_load_and_one_drop_event(self, tiny, tiny_schedule):
        m = build_milp(tiny)
        asg = schedule_to_assignment(tiny, tiny_schedule, m)
        assert len([k for k in asg if k.startswith("ec_")]) == 1
        assert len([k for k in asg if k.startswith("ed_")]) == 1

    def test_feasible_schedule_satisfies_every_hard_row(self, tiny, tiny_schedule):
        m = build_milp(tiny)
        asg = schedule_to_assignment(tiny, tiny_schedule, m)
        report = check_assignment(m, asg)
        assert report.feasible, report.to_jsonl()

    def test_perturbing_a_binary_breaks_some_row(self, tiny, tiny_schedule):
        m = build_milp(tiny)
        asg = schedule_to_assignment(tiny, tiny_schedule, m)
        broken = dict(asg)
        broken["y_i1_h1_2"] = 1.0  # also "present" at the fire while flying
        report = check_assignment(m, broken)
        assert not report.feasible

    def test_objective_matches_direct_evaluation(self, tiny, tiny_schedule):
        m = build_milp(tiny)
        asg = schedule_to_assignment(tiny, tiny_schedule, m)
        assert objective_value(m, asg) == pytest.approx(
            evaluate(tiny, tiny_schedule).total, abs=1e-9
        )


class TestCrossOracle:
    @pytest.mark.parametrize("seed", [0, 1])
    def test_verdicts_agree_on_random_walks(self, seed):
        inst = make_instance(
            n_helis=2, horizon=10, n_waters=2, n_fires=2, n_bases=1,
            traj_of=["w1", "w1"], water_capacity=2500, mr=2, mcf=8, mtf=9,
        )
        m = build_milp(inst)
        rng = np.random.default_rng(seed)
        for _ in range(40):
            sched = random_schedule(inst, rng)
            direct = check_schedule(inst, sched)
            asg = schedule_to_assignment(inst, sched, m)
            lp = check_assignment(m, asg)
            assert hard_rules(direct) == hard_rules(lp), (
                f"direct={hard_rules(direct)} lp={hard_rules(lp)}\n{direct.to_jsonl()}"
                + lp.to_jsonl()
            )
            assert objective_value(m, asg) == pytest.approx(
                evaluate(inst, sched).total, abs=1e-9
            )


def test_emit_handles_a_rowless_model():
    from heliplan.milp import MilpModel
    from heliplan.encode import encode_instance

    inst = make_instance(horizon=4)
    toy = MilpModel(
        var_names=["y_sp1_h1_1"], var_kinds=["binary"],
        var_index={"y_sp1_h1_1": 0}, rows=[], objective=[(0, 1.0)],
        enc=encode_instance(inst),
    )
    text = emit_lp(toy)
    for section in ("Maximize", "Subject To", "Bounds", "Binaries", "End"):
        assert section in text


def test_memberless_trajectory_windows_stay_consistent():
    # a trajectory with no helicopters still opens change windows at declared
    # evolutions; both oracles must carry that state identically
    inst = make_instance(
        n_helis=1, horizon=10, trajectories=("w1", "w_empty"), traj_of=["w1"],
        evolution=[0, 0, 0, 1, 0, 0, 0, 1, 0, 0],
    )
    m = build_milp(inst)
    from heliplan.feasibility import check_schedule
    from conftest import one_circuit_row
    from heliplan.model import Schedule

    sched = Schedule(activities=(one_circuit_row(10),))
    direct = check_schedule(inst, sched)
    asg = schedule_to_assignment(inst, sched, m)
    mech = check_assignment(m, asg)
    assert direct.feasible
    assert mech.feasible, mech.to_jsonl()
