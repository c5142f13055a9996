import math

import numpy as np
import pytest

from heliplan.construct import build_initial
from heliplan.feasibility import check_schedule
from heliplan.improve import (
    IlsParams,
    MoveEngine,
    SaParams,
    acceptance_probability,
    iterated_local_search,
    simulated_annealing,
)
from heliplan.model import Schedule
from heliplan.objective import evaluate

from conftest import make_instance, timeline


def rich_instance():
    return make_instance(
        n_helis=2, horizon=24, traj_of=["w1", "w1"], n_waters=2, n_fires=2,
        mcf=10, mr=2, mtf=40,
    )


class TestMoveSampling:
    def test_all_idle_restricts_to_start_working(self):
        inst = rich_instance()
        engine = MoveEngine(inst)
        sol = build_initial(inst, seed=0)
        idle = sol
        genome = sol.genome
        from dataclasses import replace

        genome = replace(genome, sessions={h.id: () for h in inst.helicopters})
        from heliplan.construct import make_solution

        idle = make_solution(inst, genome)
        assert engine.applicable_kinds(idle) == ["MI3"]

    def test_every_applicable_kind_gets_sampled(self):
        inst = rich_instance()
        engine = MoveEngine(inst)
        sol = build_initial(inst, seed=3)
        kinds = set(engine.applicable_kinds(sol))
        rng = np.random.default_rng(0)
        seen = set()
        for _ in range(600):
            seen.add(engine.random_move(sol, rng).kind)
        assert seen == kinds

    def test_same_seed_same_move(self):
        inst = rich_instance()
        engine = MoveEngine(inst)
        sol = build_initial(inst, seed=3)
        m1 = engine.random_move(sol, np.random.default_rng(9))
        m2 = engine.random_move(sol, np.random.default_rng(9))
        assert m1 == m2


class TestApplyMove:
    def test_candidates_are_feasible_or_discarded(self):
        inst = rich_instance()
        engine = MoveEngine(inst)
        sol = build_initial(inst, seed=1)
        rng = np.random.default_rng(2)
        produced = 0
        for _ in range(60):
            move = engine.random_move(sol, rng)
            out = engine.apply_move(sol, move, rng)
            if out is not None:
                produced += 1
                assert check_schedule(inst, out.schedule).feasible
        assert produced > 0

    def test_removing_the_only_worker_gives_zero_drops(self):
        inst = make_instance(horizon=16, mcf=10, mr=2)
        engine = MoveEngine(inst)
        sol = build_initial(inst, seed=0)
        from heliplan.improve import Move

        out = engine.apply_move(sol, Move(kind="MI4", heli="h1"), np.random.default_rng(0))
        assert out is not None
        assert check_schedule(inst, out.schedule).feasible
        assert out.objective.efficiency_raw == 0

    def test_trajectory_move_updates_every_member(self):
        inst = rich_instance()
        engine = MoveEngine(inst)
        sol = build_initial(inst, seed=4)
        from heliplan.improve import Move

        current_drop = sol.genome.plan.epochs["w1"][0].drop
        other = "i2" if current_drop == "i1" else "i1"
        out = engine.apply_move(
            sol,
            Move(kind="MI1", trajectory="w1", epoch=0, payload=("drop", other, None)),
            np.random.default_rng(0),
        )
        assert out is not None
        from heliplan.model import AtNode

        for row in out.schedule.activities:
            drops = {a.node for a in row if isinstance(a, AtNode) and a.node.startswith("i")}
            assert drops <= {other}


class TestDropArithmetic:
    def test_more_drops_scale_the_efficiency_term(self):
        # two fleets of identical 1000-liter helicopters: 7 drop intervals at
        # top efficiency score 70000, 11 drop intervals score 110000
        inst = make_instance(n_helis=1, horizon=48, mcf=46, mtf=46, ef=10.0)

        def drops_row(n):
            spec = [("sp1", 1), ("fly", "sp1", "c1")]
            for k in range(n):
                spec += [("c1", 1), ("fly", "c1", "i1"), ("i1", 1)]
                if k < n - 1:
                    spec.append(("fly", "i1", "c1"))
            spec.append(("fly", "i1", "b1"))
            used = 2 + n * 3 + (n - 1) + 1
            spec.append(("b1", 48 - used))
            return timeline(*spec)

        seven = evaluate(inst, Schedule(activities=(drops_row(7),)))
        eleven = evaluate(inst, Schedule(activities=(drops_row(11),)))
        assert seven.efficiency_raw == 70000
        assert eleven.efficiency_raw == 110000


class TestAcceptance:
    def test_equal_score_always_accepted(self):
        assert acceptance_probability(0.0, 0.5) == 1.0

    def test_closed_form(self):
        assert acceptance_probability(-0.1, 0.1) == pytest.approx(math.exp(-1))

    def test_improvement_always_accepted(self):
        assert acceptance_probability(0.3, 1e-9) == 1.0


class TestDrivers:
    def test_sa_returns_feasible_at_least_as_good_as_its_start(self):
        inst = rich_instance()
        best, trace = simulated_annealing(
            inst, SaParams(seed=7, max_iterations=150, checkpoints=(50, 100, 150))
        )
        assert check_schedule(inst, best.schedule).feasible
        assert best.total >= trace.initial_total - 1e-12
        values = [c.best_total for c in trace.checkpoints]
        assert values == sorted(values)

    def test_ils_inner_budget_one_is_single_move_hill_climbing(self):
        inst = rich_instance()
        best, trace = iterated_local_search(
            inst, IlsParams(seed=3, max_iterations=60, inner_budget=1)
        )
        assert check_schedule(inst, best.schedule).feasible

    def test_ils_monotone_checkpoints(self):
        inst = rich_instance()
        _best, trace = iterated_local_search(
            inst, IlsParams(seed=11, max_iterations=200, inner_budget=5,
                            checkpoints=(40, 80, 120, 160, 200))
        )
        values = [c.best_total for c in trace.checkpoints]
        assert values == sorted(values)

    def test_iteration_budget_mode_is_deterministic(self):
        inst = rich_instance()
        p = SaParams(seed=21, max_iterations=120, checkpoints=(60, 120))
        b1, t1 = simulated_annealing(inst, p)
        b2, t2 = simulated_annealing(inst, p)
        assert b1.schedule == b2.schedule
        assert t1.to_dict() == t2.to_dict()
        q = IlsParams(seed=21, max_iterations=120, inner_budget=6)
        c1, u1 = iterated_local_search(inst, q)
        c2, u2 = iterated_local_search(inst, q)
        assert c1.schedule == c2.schedule
        assert u1.to_dict() == u2.to_dict()

    def test_params_validation(self):
        with pytest.raises(ValueError):
            SaParams(cooling_alpha=1.5)
        with pytest.raises(ValueError):
            SaParams(t_initial=0.1, t_min=0.2)
        with pytest.raises(ValueError):
            IlsParams(inner_budget=0)


class TestWallClockBudget:
    def test_wall_mode_records_time_and_respects_budget(self):
        inst = rich_instance()
        best, trace = simulated_annealing(
            inst,
            SaParams(seed=2, wall_clock_budget=1.5, checkpoints=(0.2, 0.5, 1.0, 1.5)),
        )
        assert check_schedule(inst, best.schedule).feasible
        assert trace.wall_seconds is not None
        assert trace.wall_seconds < 10  # generous: budget 1.5s plus overhead
        assert all(c.wall_seconds is not None for c in trace.checkpoints)
        marks = [c.at for c in trace.checkpoints]
        assert marks == sorted(marks)
        values = [c.best_total for c in trace.checkpoints]
        assert values == sorted(values)
        payload = trace.to_dict()
        assert "wall_seconds" in payload
