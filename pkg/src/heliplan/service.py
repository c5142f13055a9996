"""HTTP planning service: instance management, plan jobs, and results.

Instances are immutable and content-addressed (the id is a hash of the
canonical document bytes), so every edit mints a new id and the coordinator's
decision history stays auditable. Plan jobs run on a bounded worker pool, at
most one at a time per instance by default, and results are only stored after
the schedule re-verifies as feasible.

Storage is a flat file tree under the data directory; writes go through a
temp file and an atomic rename.

Configuration: a JSON config file (--config) plus environment overrides
HELIPLAN_DATA_DIR, HELIPLAN_HOST, HELIPLAN_PORT, HELIPLAN_WORKERS,
HELIPLAN_BUDGET_SECONDS, HELIPLAN_SERIALIZE_PER_INSTANCE.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, Response
from fastapi.middleware.cors import CORSMiddleware

from . import engine
from .bench import summarize
from .feasibility import check_schedule
from .improve import IlsParams, SaParams, iterated_local_search, simulated_annealing
from .instance_io import (
    FormatError,
    dumps_canonical,
    instance_from_dict,
    instance_to_dict,
    schedule_to_dict,
)
from .model import validate_instance
from .objective import evaluate
from .render import render_gantt_svg

DEFAULT_CHECKPOINT_SECONDS = (300.0, 600.0, 900.0, 1200.0, 1500.0)


@dataclass
class ServiceConfig:
    data_dir: str = "heliplan-data"
    host: str = "127.0.0.1"
    port: int = 8040
    workers: int = 2
    default_budget_seconds: float = 60.0
    serialize_per_instance: bool = True
    ui_dir: Optional[str] = None  # serve the built frontend at /ui when set

    @classmethod
    def load(cls, config_path: Optional[str] = None) -> "ServiceConfig":
        cfg = cls()
        if config_path:
            with open(config_path, "r", encoding="utf-8") as fh:
                for key, value in json.load(fh).items():
                    if hasattr(cfg, key):
                        setattr(cfg, key, value)
        env = os.environ
        cfg.data_dir = env.get("HELIPLAN_DATA_DIR", cfg.data_dir)
        cfg.host = env.get("HELIPLAN_HOST", cfg.host)
        cfg.port = int(env.get("HELIPLAN_PORT", cfg.port))
        cfg.workers = int(env.get("HELIPLAN_WORKERS", cfg.workers))
        cfg.default_budget_seconds = float(
            env.get("HELIPLAN_BUDGET_SECONDS", cfg.default_budget_seconds)
        )
        cfg.ui_dir = env.get("HELIPLAN_UI_DIR", cfg.ui_dir)
        if "HELIPLAN_SERIALIZE_PER_INSTANCE" in env:
            cfg.serialize_per_instance = env["HELIPLAN_SERIALIZE_PER_INSTANCE"] not in (
                "0", "false", "no",
            )
        return cfg


def _content_id(payload: str) -> str:
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:32]


class Store:
    """Content-addressed instance store and job/result records on disk."""

    def __init__(self, root: str):
        self.root = Path(root)
        for sub in ("instances", "plans", "results"):
            (self.root / sub).mkdir(parents=True, exist_ok=True)

    def _write_atomic(self, path: Path, payload: str) -> None:
        fd, tmp = tempfile.mkstemp(dir=str(path.parent), suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(payload)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def put_instance(self, doc: dict) -> str:
        payload = dumps_canonical(doc)
        iid = _content_id(payload)
        path = self.root / "instances" / f"{iid}.json"
        if not path.exists():
            self._write_atomic(path, payload)
        return iid

    def get_instance_bytes(self, iid: str) -> Optional[str]:
        path = self.root / "instances" / f"{iid}.json"
        if not path.exists():
            return None
        return path.read_text(encoding="utf-8")

    def put_job(self, job: dict) -> None:
        self._write_atomic(self.root / "plans" / f"{job['id']}.json", dumps_canonical(job))

    def get_job(self, jid: str) -> Optional[dict]:
        path = self.root / "plans" / f"{jid}.json"
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def put_result(self, jid: str, result: dict) -> None:
        self._write_atomic(self.root / "results" / f"{jid}.json", dumps_canonical(result))

    def get_result(self, jid: str) -> Optional[dict]:
        path = self.root / "results" / f"{jid}.json"
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def sweep_interrupted_jobs(self) -> None:
        for path in (self.root / "plans").glob("*.json"):
            job = json.loads(path.read_text(encoding="utf-8"))
            if job.get("state") in ("queued", "running"):
                job["state"] = "failed"
                job["error"] = "interrupted by service restart"
                self.put_job(job)


def _parse_algo_params(algorithm: str, params: dict, default_budget: float):
    seed = int(params.get("seed", 0))
    iterations = params.get("iterations")
    budget_seconds = params.get("budget_seconds")
    checkpoints = tuple(params.get("checkpoints", ()))
    if iterations is None and budget_seconds is None:
        budget_seconds = default_budget
        if not checkpoints:
            checkpoints = tuple(
                m for m in DEFAULT_CHECKPOINT_SECONDS if m <= budget_seconds
            ) or (budget_seconds,)
    common = dict(
        seed=seed,
        max_iterations=int(iterations) if iterations is not None else None,
        wall_clock_budget=float(budget_seconds) if budget_seconds is not None else None,
        checkpoints=checkpoints,
    )
    if algorithm == "sa":
        extra = {
            k: params[k]
            for k in ("t_initial", "t_min", "cooling_alpha", "stall_limit_current",
                      "stall_limit_best")
            if k in params
        }
        return SaParams(**common, **extra)
    if algorithm == "ils":
        extra = {
            k: params[k]
            for k in ("outer_limit", "inner_budget", "stall_limit")
            if k in params
        }
        return IlsParams(**common, **extra)
    raise ValueError(f"unknown algorithm {algorithm!r}; expected 'sa' or 'ils'")


def create_app(config: Optional[ServiceConfig] = None) -> FastAPI:
    config = config or ServiceConfig.load()
    store = Store(config.data_dir)
    store.sweep_interrupted_jobs()
    app = FastAPI(title="heliplan planning service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    pool = ThreadPoolExecutor(max_workers=config.workers)
    jobs_lock = threading.Lock()
    live_checkpoints: dict[str, list] = {}
    instance_locks: dict[str, threading.Lock] = {}

    def instance_lock(iid: str) -> threading.Lock:
        with jobs_lock:
            return instance_locks.setdefault(iid, threading.Lock())

    def load_instance_or_404(iid: str):
        payload = store.get_instance_bytes(iid)
        if payload is None:
            raise HTTPException(status_code=404, detail=f"unknown instance {iid}")
        try:
            return instance_from_dict(json.loads(payload)), payload
        except FormatError as exc:
            raise HTTPException(status_code=500, detail=f"stored instance unreadable: {exc}")

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "kernel": engine.BACKEND}

    @app.post("/instances", status_code=201)
    def post_instance(doc: dict):
        try:
            inst = instance_from_dict(doc)
        except FormatError as exc:
            raise HTTPException(status_code=422, detail=[str(exc)])
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=[str(exc)])
        diagnostics = validate_instance(inst)
        errors = [str(d) for d in diagnostics if d.severity == "error"]
        if errors:
            raise HTTPException(status_code=422, detail=errors)
        iid = store.put_instance(instance_to_dict(inst))
        return {
            "id": iid,
            "warnings": [str(d) for d in diagnostics if d.severity == "warning"],
        }

    @app.get("/instances/{iid}")
    def get_instance(iid: str):
        payload = store.get_instance_bytes(iid)
        if payload is None:
            raise HTTPException(status_code=404, detail=f"unknown instance {iid}")
        return Response(content=payload, media_type="application/json")

    @app.post("/instances/{iid}/efficiency")
    def patch_efficiency(iid: str, patch: dict):
        inst, _payload = load_instance_or_404(iid)
        try:
            node = patch["node"]
            lo = int(patch["from"])
            hi = int(patch["to"])
            value = float(patch["value"])
        except (KeyError, TypeError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=[f"malformed patch: {exc}"])
        horizon = inst.grid.horizon_intervals
        if not (0 <= value <= 10):
            raise HTTPException(status_code=422, detail=[f"value {value} outside [0, 10]"])
        if not (1 <= lo <= hi <= horizon):
            raise HTTPException(
                status_code=422, detail=[f"interval range [{lo}, {hi}] outside [1, {horizon}]"]
            )
        fires = {n.id for n in inst.wildfire_points}
        if node not in fires:
            raise HTTPException(status_code=422, detail=[f"{node!r} is not a wildfire node"])
        doc = instance_to_dict(inst)
        changed_at = None
        for row in doc["nodes"]["wildfire_points"]:
            if row["id"] == node:
                for t in range(lo, hi + 1):
                    if row["efficiency_by_interval"][t - 1] != value:
                        if changed_at is None:
                            changed_at = t
                        row["efficiency_by_interval"][t - 1] = value
        if changed_at is not None and changed_at > 1:
            doc["evolution"][changed_at - 1] = 1  # a declared evolution
        new_id = store.put_instance(doc)
        return {"id": new_id, "changed": changed_at is not None}

    @app.get("/instances/{a}/diff/{b}")
    def diff_instances(a: str, b: str):
        inst_a, _ = load_instance_or_404(a)
        inst_b, _ = load_instance_or_404(b)
        ef_a = {n.id: n.efficiency_by_interval for n in inst_a.wildfire_points}
        ef_b = {n.id: n.efficiency_by_interval for n in inst_b.wildfire_points}
        cells = []
        for nid in sorted(set(ef_a) | set(ef_b)):
            va, vb = ef_a.get(nid), ef_b.get(nid)
            if va is None or vb is None:
                cells.append({"node": nid, "only_in": a if vb is None else b})
                continue
            for t, (x, y) in enumerate(zip(va, vb), start=1):
                if x != y:
                    cells.append({"node": nid, "interval": t, "from": x, "to": y})
        return {"efficiency_changes": cells}

    def run_job(jid: str, iid: str, algorithm: str, params):
        job = store.get_job(jid)
        job["state"] = "running"
        store.put_job(job)
        lock = instance_lock(iid) if config.serialize_per_instance else None
        try:
            if lock:
                lock.acquire()
            inst, _payload = load_instance_or_404(iid)

            def on_checkpoint(point):
                with jobs_lock:
                    live_checkpoints.setdefault(jid, []).append(
                        {"at": point.at, "best_total": point.best_total,
                         "iterations": point.iterations}
                    )

            if algorithm == "sa":
                best, trace = simulated_annealing(inst, params, on_checkpoint=on_checkpoint)
            else:
                best, trace = iterated_local_search(inst, params, on_checkpoint=on_checkpoint)
            report = check_schedule(inst, best.schedule)
            if not report.feasible:  # the post-verification gate
                raise RuntimeError(
                    f"driver returned an infeasible schedule: {sorted(report.rules())}"
                )
            value = evaluate(inst, best.schedule)
            result = {
                "schedule": schedule_to_dict(inst, best.schedule),
                "objective": value.to_dict(),
                "summary": summarize(inst, best.schedule).to_dict(),
                "trace": trace.to_dict(),
                "gantt_svg": render_gantt_svg(inst, best.schedule),
                "feasible": True,
            }
            store.put_result(jid, result)
            job = store.get_job(jid)
            job["state"] = "done"
            job["best_total"] = value.total
            store.put_job(job)
        except Exception as exc:
            job = store.get_job(jid)
            job["state"] = "failed"
            job["error"] = f"{type(exc).__name__}: {exc}"
            store.put_job(job)
        finally:
            if lock:
                lock.release()

    @app.post("/plans", status_code=201)
    def post_plan(body: dict):
        iid = body.get("instance_id")
        algorithm = body.get("algorithm", "ils")
        raw_params = body.get("params", {})
        load_instance_or_404(iid)
        try:
            params = _parse_algo_params(algorithm, raw_params, config.default_budget_seconds)
        except (TypeError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=[str(exc)])
        jid = uuid.uuid4().hex[:16]
        job = {
            "id": jid,
            "instance_id": iid,
            "algorithm": algorithm,
            "params": raw_params,
            "state": "queued",
        }
        store.put_job(job)
        pool.submit(run_job, jid, iid, algorithm, params)
        return {"id": jid}

    @app.get("/plans/{jid}")
    def get_plan(jid: str):
        job = store.get_job(jid)
        if job is None:
            raise HTTPException(status_code=404, detail=f"unknown plan {jid}")
        with jobs_lock:
            job["checkpoints"] = list(live_checkpoints.get(jid, []))
        return job

    @app.get("/plans/{jid}/result")
    def get_result(jid: str):
        job = store.get_job(jid)
        if job is None:
            raise HTTPException(status_code=404, detail=f"unknown plan {jid}")
        if job["state"] == "failed":
            raise HTTPException(status_code=409, detail=job.get("error", "job failed"))
        if job["state"] != "done":
            with jobs_lock:
                partial = list(live_checkpoints.get(jid, []))
            raise HTTPException(
                status_code=409,
                detail={"state": job["state"], "checkpoints": partial},
            )
        result = store.get_result(jid)
        if result is None:
            raise HTTPException(status_code=500, detail="result record missing")
        return result

    @app.get("/plans/{jid}/gantt.svg")
    def get_gantt(jid: str):
        job = store.get_job(jid)
        if job is None:
            raise HTTPException(status_code=404, detail=f"unknown plan {jid}")
        if job["state"] != "done":
            raise HTTPException(status_code=409, detail={"state": job["state"]})
        result = store.get_result(jid)
        return Response(content=result["gantt_svg"], media_type="image/svg+xml")

    if config.ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=config.ui_dir, html=True), name="ui")

    app.state.config = config
    app.state.store = store
    return app


def main(config_path: Optional[str] = None):  # pragma: no cover - thin uvicorn wrapper
    import uvicorn

    config = ServiceConfig.load(config_path)
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port)
