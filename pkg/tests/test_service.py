import json
import time

import pytest
from fastapi.testclient import TestClient

from heliplan.instance_io import instance_to_dict
from heliplan.service import ServiceConfig, create_app

from conftest import make_instance


@pytest.fixture
def client(tmp_path):
    config = ServiceConfig(data_dir=str(tmp_path / "data"), workers=2)
    app = create_app(config)
    with TestClient(app) as c:
        yield c


def small_doc():
    inst = make_instance(
        n_helis=2, horizon=20, traj_of=["w1", "w1"], n_waters=2, n_fires=2,
        mcf=10, mr=2, mtf=30,
        ef={"i1": [10.0] * 20, "i2": [5.0] * 20},
    )
    return instance_to_dict(inst)


def wait_done(client, jid, timeout=30.0):
    deadline = time.time() + timeout
    states = []
    while time.time() < deadline:
        job = client.get(f"/plans/{jid}").json()
        if not states or states[-1] != job["state"]:
            states.append(job["state"])
        if job["state"] in ("done", "failed"):
            return job, states
        time.sleep(0.05)
    raise TimeoutError(f"job {jid} still {states[-1] if states else '?'}")


class TestInstances:
    def test_roundtrip_and_content_addressing(self, client):
        doc = small_doc()
        r1 = client.post("/instances", json=doc)
        assert r1.status_code == 201
        iid = r1.json()["id"]
        r2 = client.post("/instances", json=doc)
        assert r2.json()["id"] == iid  # same bytes, same id
        got = client.get(f"/instances/{iid}")
        assert got.status_code == 200
        echoed = json.loads(got.text)
        again = client.post("/instances", json=echoed)
        assert again.json()["id"] == iid

    def test_invalid_instance_is_rejected_with_diagnostics(self, client):
        doc = small_doc()
        doc["nodes"]["wildfire_points"][0]["efficiency_by_interval"][0] = 11
        r = client.post("/instances", json=doc)
        assert r.status_code == 422
        assert any("outside [0, 10]" in d for d in r.json()["detail"])

    def test_unknown_instance_404(self, client):
        assert client.get("/instances/deadbeef").status_code == 404

    def test_healthz(self, client):
        body = client.get("/healthz").json()
        assert body["status"] == "ok"
        assert body["kernel"] in ("compiled", "python")


class TestPatchEfficiency:
    def test_patch_creates_new_instance_and_flags_evolution(self, client):
        iid = client.post("/instances", json=small_doc()).json()["id"]
        r = client.post(
            f"/instances/{iid}/efficiency",
            json={"node": "i2", "from": 13, "to": 20, "value": 10},
        )
        assert r.status_code == 200
        new_id = r.json()["id"]
        assert new_id != iid
        new_doc = json.loads(client.get(f"/instances/{new_id}").text)
        fire = next(n for n in new_doc["nodes"]["wildfire_points"] if n["id"] == "i2")
        assert fire["efficiency_by_interval"][12:20] == [10.0] * 8
        assert new_doc["evolution"][12] == 1
        diff = client.get(f"/instances/{iid}/diff/{new_id}").json()
        assert {(c["node"], c["interval"]) for c in diff["efficiency_changes"]} == {
            ("i2", t) for t in range(13, 21)
        }

    def test_out_of_range_value_rejected(self, client):
        iid = client.post("/instances", json=small_doc()).json()["id"]
        r = client.post(
            f"/instances/{iid}/efficiency",
            json={"node": "i1", "from": 1, "to": 2, "value": 11},
        )
        assert r.status_code == 422

    def test_identity_patch_returns_same_id(self, client):
        doc = small_doc()
        iid = client.post("/instances", json=doc).json()["id"]
        current = doc["nodes"]["wildfire_points"][0]["efficiency_by_interval"][0]
        r = client.post(
            f"/instances/{iid}/efficiency",
            json={"node": "i1", "from": 1, "to": 1, "value": current},
        )
        assert r.json()["id"] == iid
        assert r.json()["changed"] is False


class TestPlans:
    def test_submit_poll_result_lifecycle(self, client):
        iid = client.post("/instances", json=small_doc()).json()["id"]
        r = client.post(
            "/plans",
            json={"instance_id": iid, "algorithm": "ils",
                  "params": {"seed": 3, "iterations": 40}},
        )
        assert r.status_code == 201
        jid = r.json()["id"]
        job, states = wait_done(client, jid)
        assert job["state"] == "done"
        assert set(states) <= {"queued", "running", "done"}
        result = client.get(f"/plans/{jid}/result").json()
        assert result["feasible"] is True
        assert result["summary"]["drops"] >= 0
        assert result["objective"]["total"] == pytest.approx(job["best_total"])
        svg = client.get(f"/plans/{jid}/gantt.svg")
        assert svg.status_code == 200
        assert svg.headers["content-type"].startswith("image/svg+xml")
        assert svg.text.startswith("<svg")

    def test_result_verifies_feasible_serverside(self, client):
        iid = client.post("/instances", json=small_doc()).json()["id"]
        jid = client.post(
            "/plans",
            json={"instance_id": iid, "algorithm": "sa",
                  "params": {"seed": 1, "iterations": 30}},
        ).json()["id"]
        job, _ = wait_done(client, jid)
        assert job["state"] == "done"
        result = client.get(f"/plans/{jid}/result").json()
        from heliplan.feasibility import check_schedule
        from heliplan.instance_io import instance_from_dict, schedule_from_dict

        inst = instance_from_dict(json.loads(client.get(f"/instances/{iid}").text))
        sched = schedule_from_dict(inst, result["schedule"])
        assert check_schedule(inst, sched).feasible

    def test_same_params_same_result(self, client):
        iid = client.post("/instances", json=small_doc()).json()["id"]
        results = []
        for _ in range(2):
            jid = client.post(
                "/plans",
                json={"instance_id": iid, "algorithm": "ils",
                      "params": {"seed": 7, "iterations": 30}},
            ).json()["id"]
            job, _ = wait_done(client, jid)
            assert job["state"] == "done"
            results.append(client.get(f"/plans/{jid}/result").json())
        assert results[0]["schedule"] == results[1]["schedule"]
        assert results[0]["objective"] == results[1]["objective"]

    def test_unknown_ids_404(self, client):
        assert client.get("/plans/nope").status_code == 404
        r = client.post("/plans", json={"instance_id": "nope", "algorithm": "ils"})
        assert r.status_code == 404

    def test_result_before_done_is_409(self, client):
        iid = client.post("/instances", json=small_doc()).json()["id"]
        jid = client.post(
            "/plans",
            json={"instance_id": iid, "algorithm": "ils",
                  "params": {"seed": 1, "budget_seconds": 2.0, "checkpoints": [0.2]}},
        ).json()["id"]
        r = client.get(f"/plans/{jid}/result")
        if r.status_code == 409:  # still queued or running
            assert "state" in r.json()["detail"] or isinstance(r.json()["detail"], str)
        wait_done(client, jid, timeout=30)


class TestUiContract:
    def test_gantt_shape_matches_instance(self, client):
        # the frontend relies on one row label per helicopter and one cell per
        # (helicopter, interval) in the service-rendered SVG
        doc = small_doc()
        iid = client.post("/instances", json=doc).json()["id"]
        jid = client.post(
            "/plans",
            json={"instance_id": iid, "algorithm": "ils",
                  "params": {"seed": 5, "iterations": 30}},
        ).json()["id"]
        job, _ = wait_done(client, jid)
        assert job["state"] == "done"
        svg = client.get(f"/plans/{jid}/gantt.svg").text
        n_helis = len(doc["helicopters"])
        horizon = doc["grid"]["horizon_intervals"]
        assert svg.count('<text x="4"') == n_helis
        assert svg.count("<title>") == n_helis * horizon  # one cell per slot

    def test_ui_static_mount(self, tmp_path):
        ui = tmp_path / "ui"
        ui.mkdir()
        (ui / "index.html").write_text("<html><body>coordinator</body></html>")
        config = ServiceConfig(data_dir=str(tmp_path / "data"), ui_dir=str(ui))
        with TestClient(create_app(config)) as c:
            page = c.get("/ui/")
            assert page.status_code == 200
            assert "coordinator" in page.text


class TestConfig:
    def test_config_file_and_env_overrides(self, tmp_path, monkeypatch):
        cfg_path = tmp_path / "service.json"
        cfg_path.write_text(json.dumps({"port": 9999, "workers": 7}))
        monkeypatch.setenv("HELIPLAN_WORKERS", "3")
        monkeypatch.setenv("HELIPLAN_DATA_DIR", str(tmp_path / "d"))
        config = ServiceConfig.load(str(cfg_path))
        assert config.port == 9999  # from the file
        assert config.workers == 3  # env wins over the file
        assert config.data_dir == str(tmp_path / "d")
