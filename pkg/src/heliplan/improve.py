"""Neighborhood moves and the two improvement drivers.

Eight move kinds rewrite the solution genome: two act on a trajectory's
load/drop assignment for one epoch, six act on a single helicopter's work
sessions. Every candidate is recompiled, repaired if needed, and discarded
when feasibility cannot be restored, so the drivers only ever hold feasible
schedules.

Both drivers accept either an iteration budget (fully deterministic given the
seed) or a wall-clock budget with checkpoint snapshots; the recorded best
value is nondecreasing across checkpoints by construction.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .construct import (
    DispatchError,
    Genome,
    RepairError,
    Session,
    Solution,
    _Context,
    build_initial,
    make_solution,
    repair,
)
from .encode import encode_instance
from .model import Instance
from .objective import compute_normalizers

MOVE_KINDS = ("MI1", "MI2", "MI3", "MI4", "MI5", "MI6", "MI7", "MI8")

#: chance that a helicopter keeps working after each completed circuit (MI7)
DEFAULT_CONTINUE_PROBABILITY = 0.5

_APPLY_RETRIES = 25
_REPAIR_ATTEMPTS = 25


@dataclass(frozen=True)
class Move:
    kind: str
    trajectory: Optional[str] = None
    epoch: Optional[int] = None
    heli: Optional[str] = None
    session: Optional[int] = None
    payload: tuple = ()


@dataclass(frozen=True)
class SaParams:
    t_initial: float = 1.0
    t_min: float = 1e-4
    cooling_alpha: float = 0.999
    stall_limit_current: int = 2000
    stall_limit_best: int = 5000
    seed: int = 0
    max_iterations: Optional[int] = None
    wall_clock_budget: Optional[float] = None
    checkpoints: tuple = ()

    def __post_init__(self):
        if not (0 < self.cooling_alpha < 1):
            raise ValueError("cooling_alpha must lie in (0, 1)")
        if self.t_min >= self.t_initial:
            raise ValueError("t_min must be below t_initial")


@dataclass(frozen=True)
class IlsParams:
    outer_limit: int = 10000
    inner_budget: int = 50
    stall_limit: int = 200
    seed: int = 0
    max_iterations: Optional[int] = None
    wall_clock_budget: Optional[float] = None
    checkpoints: tuple = ()

    def __post_init__(self):
        if self.inner_budget < 1:
            raise ValueError("inner_budget must be at least 1")


@dataclass
class Checkpoint:
    at: float  # iteration count or seconds, per the budget mode
    best_total: float
    iterations: int
    wall_seconds: Optional[float] = None


@dataclass
class RunTrace:
    algorithm: str
    seed: int
    checkpoints: list[Checkpoint] = field(default_factory=list)
    move_accepts: dict = field(default_factory=dict)
    move_rejects: dict = field(default_factory=dict)
    restarts: int = 0
    iterations: int = 0
    initial_total: float = float("-inf")
    best_total: float = float("-inf")
    wall_seconds: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "seed": self.seed,
            "checkpoints": [
                {
                    "at": c.at,
                    "best_total": c.best_total,
                    "iterations": c.iterations,
                    **({"wall_seconds": c.wall_seconds} if c.wall_seconds is not None else {}),
                }
                for c in self.checkpoints
            ],
            "move_accepts": dict(sorted(self.move_accepts.items())),
            "move_rejects": dict(sorted(self.move_rejects.items())),
            "restarts": self.restarts,
            "iterations": self.iterations,
            "initial_total": self.initial_total,
            "best_total": self.best_total,
            **({"wall_seconds": self.wall_seconds} if self.wall_seconds is not None else {}),
        }


def acceptance_probability(delta: float, temperature: float) -> float:
    """Chance of accepting a candidate whose score differs by delta."""
    if delta > 0:
        return 1.0
    if temperature <= 0:
        return 0.0
    return math.exp(delta / temperature)


class MoveEngine:
    """Applies seeded moves to solutions for one instance, reusing the encoded
    instance across all candidate evaluations."""

    def __init__(self, instance: Instance, continue_probability: float = DEFAULT_CONTINUE_PROBABILITY):
        self.instance = instance
        self.enc = encode_instance(instance)
        self.ctx = _Context(instance)
        self.norms = instance.weights.normalizers or compute_normalizers(instance)
        self.continue_probability = continue_probability
        self.horizon = instance.grid.horizon_intervals

    # -- applicability ------------------------------------------------------

    def _active_helis(self, sol: Solution) -> list[str]:
        return [hid for hid, ss in sol.genome.sessions.items() if ss]

    def _idle_helis(self, sol: Solution) -> list[str]:
        return [h.id for h in self.instance.helicopters if not sol.genome.sessions.get(h.id)]

    def _active_trajectories(self, sol: Solution) -> list[str]:
        out = []
        for w in self.instance.trajectories:
            members = self.ctx.members.get(w, [])
            if any(sol.genome.sessions.get(m) for m in members) and sol.genome.plan.epochs.get(w):
                out.append(w)
        return out

    def _long_rests(self, sol: Solution) -> list[tuple[str, int]]:
        """(heli, realized session index) pairs whose following rest exceeds
        the minimum; the final rest counts when work could still follow."""
        found = []
        for hid, realized in sol.realized.items():
            placed = [(k, rs) for k, rs in enumerate(realized) if rs.circuits > 0]
            for pos, (k, rs) in enumerate(placed):
                if pos + 1 < len(placed):
                    if placed[pos + 1][1].departure > rs.rest_min_end + 1:
                        found.append((hid, k))
                elif rs.rest_min_end < self.horizon:
                    found.append((hid, k))
        return found

    def _interior_rests(self, sol: Solution) -> list[tuple[str, int]]:
        found = []
        for hid, realized in sol.realized.items():
            placed = [k for k, rs in enumerate(realized) if rs.circuits > 0]
            genome_n = len(sol.genome.sessions.get(hid, ()))
            for k in placed:
                if k + 1 < genome_n:
                    found.append((hid, k))
        return found

    def _truncatable(self, sol: Solution) -> list[tuple[str, int]]:
        return [
            (hid, k)
            for hid, realized in sol.realized.items()
            for k, rs in enumerate(realized)
            if rs.circuits >= 2 and k < len(sol.genome.sessions.get(hid, ()))
        ]

    def applicable_kinds(self, sol: Solution) -> list[str]:
        kinds = []
        trajs = self._active_trajectories(sol)
        many_waters = len(self.ctx.water_ids) >= 2
        many_fires = len(self.ctx.fire_ids) >= 2
        if trajs and (many_waters or many_fires):
            kinds.append("MI1")
        if trajs and many_fires:
            kinds.append("MI2")
        if self._idle_helis(sol):
            kinds.append("MI3")
        active = self._active_helis(sol)
        if active:
            kinds.append("MI4")
        if self._long_rests(sol):
            kinds.append("MI5")
        if active:
            kinds.append("MI6")
        if self._truncatable(sol):
            kinds.append("MI7")
        if self._interior_rests(sol):
            kinds.append("MI8")
        return kinds

    # -- sampling -------------------------------------------------------------

    def random_move(self, sol: Solution, rng: np.random.Generator) -> Move:
        kinds = self.applicable_kinds(sol)
        if not kinds:
            raise RuntimeError("no applicable move for this solution")
        kind = kinds[int(rng.integers(len(kinds)))]
        return self._sample(kind, sol, rng)

    def _pick(self, rng, seq):
        return seq[int(rng.integers(len(seq)))]

    def _sample(self, kind: str, sol: Solution, rng) -> Move:
        genome = sol.genome
        if kind in ("MI1", "MI2"):
            w = self._pick(rng, self._active_trajectories(sol))
            epochs = genome.plan.epochs[w]
            k = int(rng.integers(len(epochs)))
            ep = epochs[k]
            if kind == "MI2":
                options = [f for f in self.ctx.fire_ids if f != ep.drop]
                drop = self._pick(rng, options)
                load = self.ctx.closest_water_to_drop(drop, self.ctx.members.get(w, []), rng)
                return Move(kind=kind, trajectory=w, epoch=k, payload=("drop", drop, load))
            sides = []
            if len(self.ctx.water_ids) >= 2:
                sides.append("load")
            if len(self.ctx.fire_ids) >= 2:
                sides.append("drop")
            side = self._pick(rng, sides)
            pool = self.ctx.water_ids if side == "load" else self.ctx.fire_ids
            current = ep.load if side == "load" else ep.drop
            node = self._pick(rng, [n for n in pool if n != current])
            return Move(kind=kind, trajectory=w, epoch=k, payload=(side, node, None))
        if kind == "MI3":
            return Move(kind=kind, heli=self._pick(rng, self._idle_helis(sol)))
        if kind == "MI4":
            return Move(kind=kind, heli=self._pick(rng, self._active_helis(sol)))
        if kind == "MI5":
            hid, k = self._pick(rng, self._long_rests(sol))
            return Move(kind=kind, heli=hid, session=k)
        if kind == "MI6":
            hid = self._pick(rng, self._active_helis(sol))
            k = int(rng.integers(len(sol.genome.sessions[hid])))
            start = int(rng.integers(1, self.horizon + 1))
            return Move(kind=kind, heli=hid, session=k, payload=(start,))
        if kind == "MI7":
            hid, k = self._pick(rng, self._truncatable(sol))
            circuits = sol.realized[hid][k].circuits
            keep = 1
            while keep < circuits and rng.random() < self.continue_probability:
                keep += 1
            return Move(kind=kind, heli=hid, session=k, payload=(keep,))
        if kind == "MI8":
            hid, k = self._pick(rng, self._interior_rests(sol))
            nxt = sol.realized[hid][k].rest_min_end + 1
            until = int(rng.integers(min(nxt + 1, self.horizon), self.horizon + 1))
            return Move(kind=kind, heli=hid, session=k, payload=(until,))
        raise ValueError(f"unknown move kind {kind!r}")

    # -- application -----------------------------------------------------------

    def _edited_genome(self, sol: Solution, move: Move) -> Genome:
        genome = sol.genome
        if move.kind in ("MI1", "MI2"):
            side, node, load = move.payload
            eps = list(genome.plan.epochs[move.trajectory])
            ep = eps[move.epoch]
            if move.kind == "MI2":
                eps[move.epoch] = replace(ep, drop=node, load=load or ep.load)
            elif side == "load":
                eps[move.epoch] = replace(ep, load=node)
            else:
                eps[move.epoch] = replace(ep, drop=node)
            new_epochs = dict(genome.plan.epochs)
            new_epochs[move.trajectory] = tuple(eps)
            return replace(genome, plan=replace(genome.plan, epochs=new_epochs))
        sessions = dict(genome.sessions)
        current = list(sessions.get(move.heli, ()))
        if move.kind == "MI3":
            current = [Session(start=1)]
        elif move.kind == "MI4":
            current = []
        elif move.kind == "MI5":
            k = move.session
            if k + 1 < len(current):
                current[k + 1] = replace(current[k + 1], start=1, flexible=True)
            else:
                current.append(Session(start=1))
        elif move.kind == "MI6":
            current[move.session] = replace(
                current[move.session], start=move.payload[0], flexible=False
            )
        elif move.kind == "MI7":
            current[move.session] = replace(current[move.session], max_circuits=move.payload[0])
        elif move.kind == "MI8":
            k = move.session
            if k + 1 < len(current):
                current[k + 1] = replace(current[k + 1], start=move.payload[0])
        else:
            raise ValueError(f"unknown move kind {move.kind!r}")
        sessions[move.heli] = tuple(current)
        return replace(genome, sessions=sessions)

    def apply_move(
        self, sol: Solution, move: Move, rng: np.random.Generator
    ) -> Optional[Solution]:
        """Rewrite the genome, recompile, and restore feasibility; None when the
        move must be discarded."""
        try:
            genome = self._edited_genome(sol, move)
            candidate = make_solution(
                self.instance, genome, enc=self.enc, ctx=self.ctx, norms=self.norms
            )
            return repair(
                self.instance, candidate, rng, max_attempts=_REPAIR_ATTEMPTS,
                enc=self.enc, ctx=self.ctx, norms=self.norms,
            )
        except (RepairError, DispatchError):
            return None

    def neighbor(self, sol: Solution, rng: np.random.Generator):
        """Sample and apply moves until one sticks; None after the retry cap."""
        for _ in range(_APPLY_RETRIES):
            move = self.random_move(sol, rng)
            out = self.apply_move(sol, move, rng)
            if out is not None:
                return move, out
        return None, None


def random_move(sol: Solution, instance: Instance, seed: int | np.random.Generator) -> Move:
    """Sample one applicable move (engine-free convenience wrapper)."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return MoveEngine(instance).random_move(sol, rng)


def apply_move(
    instance: Instance, sol: Solution, move: Move, seed: int | np.random.Generator
) -> Optional[Solution]:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return MoveEngine(instance).apply_move(sol, move, rng)


class _Budget:
    """Iteration- or wall-clock-budget bookkeeping with checkpoint capture."""

    def __init__(self, max_iterations, wall_clock_budget, checkpoints, trace: RunTrace,
                 on_checkpoint=None):
        if max_iterations is None and wall_clock_budget is None:
            raise ValueError("a budget is required: max_iterations or wall_clock_budget")
        self.max_iterations = max_iterations
        self.wall_clock_budget = wall_clock_budget
        self.wall_mode = wall_clock_budget is not None
        self.marks = sorted(checkpoints)
        self.next_mark = 0
        self.trace = trace
        self.on_checkpoint = on_checkpoint
        self.started = time.monotonic()

    def elapsed(self) -> float:
        return time.monotonic() - self.started

    def tick(self, iterations: int, best_total: float) -> None:
        self.trace.iterations = iterations
        self.trace.best_total = max(self.trace.best_total, best_total)
        position = self.elapsed() if self.wall_mode else iterations
        while self.next_mark < len(self.marks) and position >= self.marks[self.next_mark]:
            point = Checkpoint(
                at=self.marks[self.next_mark],
                best_total=best_total,
                iterations=iterations,
                wall_seconds=self.elapsed() if self.wall_mode else None,
            )
            self.trace.checkpoints.append(point)
            if self.on_checkpoint is not None:
                self.on_checkpoint(point)
            self.next_mark += 1

    def exhausted(self, iterations: int) -> bool:
        if self.max_iterations is not None and iterations >= self.max_iterations:
            return True
        if self.wall_mode and self.elapsed() >= self.wall_clock_budget:
            return True
        return False

    def finish(self) -> None:
        if self.wall_mode:
            self.trace.wall_seconds = self.elapsed()


def simulated_annealing(
    instance: Instance, params: SaParams, on_checkpoint=None
) -> tuple[Solution, RunTrace]:
    """Greedy start, then geometric-cooling annealing over the move set.

    Improving candidates are always taken; worse ones with probability
    exp(delta/T). A long run without improving the best solution rebuilds the
    working solution from a fresh greedy start (the temperature keeps
    cooling). The best solution ever seen is returned."""
    engine = MoveEngine(instance)
    root = np.random.SeedSequence(params.seed)
    init_ss, move_ss, restart_ss = root.spawn(3)
    restart_rng = np.random.default_rng(restart_ss)
    rng = np.random.default_rng(move_ss)

    trace = RunTrace(algorithm="sa", seed=params.seed)
    budget = _Budget(params.max_iterations, params.wall_clock_budget, params.checkpoints, trace,
                     on_checkpoint=on_checkpoint)

    current = build_initial(instance, int(init_ss.generate_state(1)[0]), enc=engine.enc,
                            ctx=engine.ctx, norms=engine.norms)
    best = current
    trace.initial_total = current.total
    temperature = params.t_initial
    stall_current = 0
    stall_best = 0
    iterations = 0
    budget.tick(iterations, best.total)

    while temperature > params.t_min and stall_current < params.stall_limit_current:
        if budget.exhausted(iterations):
            break
        move, candidate = engine.neighbor(current, rng)
        iterations += 1
        accepted = False
        if candidate is not None:
            delta = candidate.total - current.total
            if delta > 0 or rng.random() < acceptance_probability(delta, temperature):
                accepted = True
        if accepted:
            trace.move_accepts[move.kind] = trace.move_accepts.get(move.kind, 0) + 1
            current = candidate
            stall_current = 0
            if candidate.total > best.total:
                best = candidate
                stall_best = 0
            else:
                stall_best += 1
        else:
            if move is not None:
                trace.move_rejects[move.kind] = trace.move_rejects.get(move.kind, 0) + 1
            stall_current += 1
            stall_best += 1
        temperature *= params.cooling_alpha
        if stall_best >= params.stall_limit_best:
            current = build_initial(instance, int(restart_rng.integers(2 ** 63)), enc=engine.enc,
                                    ctx=engine.ctx, norms=engine.norms)
            if current.total > best.total:
                best = current
            stall_best = 0
            trace.restarts += 1
        budget.tick(iterations, best.total)

    budget.finish()
    return best, trace


def iterated_local_search(
    instance: Instance, params: IlsParams, on_checkpoint=None
) -> tuple[Solution, RunTrace]:
    """Perturb, hill-climb, and keep the climb when it beats the incumbent.

    Each outer round applies one random move to the incumbent, then up to
    inner_budget strictly-improving move trials; the stall counter tracks
    rounds that failed to improve the incumbent. Iterations count every
    candidate evaluation, perturbations included."""
    engine = MoveEngine(instance)
    root = np.random.SeedSequence(params.seed)
    init_ss, move_ss = root.spawn(2)
    rng = np.random.default_rng(move_ss)

    trace = RunTrace(algorithm="ils", seed=params.seed)
    budget = _Budget(params.max_iterations, params.wall_clock_budget, params.checkpoints, trace,
                     on_checkpoint=on_checkpoint)

    incumbent = build_initial(instance, int(init_ss.generate_state(1)[0]), enc=engine.enc,
                              ctx=engine.ctx, norms=engine.norms)
    best = incumbent
    trace.initial_total = incumbent.total
    stall = 0
    outer = 0
    iterations = 0
    budget.tick(iterations, best.total)

    while outer < params.outer_limit and stall < params.stall_limit:
        if budget.exhausted(iterations):
            break
        move, climbed = engine.neighbor(incumbent, rng)
        iterations += 1
        if climbed is None:
            climbed = incumbent
        elif move is not None:
            trace.move_accepts[move.kind] = trace.move_accepts.get(move.kind, 0) + 1
        inner = 0
        while inner < params.inner_budget and not budget.exhausted(iterations):
            trial_move, trial = engine.neighbor(climbed, rng)
            iterations += 1
            inner += 1
            if trial is not None and trial.total > climbed.total:
                climbed = trial
                trace.move_accepts[trial_move.kind] = (
                    trace.move_accepts.get(trial_move.kind, 0) + 1
                )
            elif trial_move is not None:
                trace.move_rejects[trial_move.kind] = (
                    trace.move_rejects.get(trial_move.kind, 0) + 1
                )
            budget.tick(iterations, max(best.total, climbed.total))
        if climbed.total > incumbent.total:
            incumbent = climbed
            stall = 0
        else:
            stall += 1
        if climbed.total > best.total:
            best = climbed
        outer += 1
        budget.tick(iterations, best.total)

    budget.finish()
    return best, trace
