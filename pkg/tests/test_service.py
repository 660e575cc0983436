import os

import numpy as np
import pytest
from fastapi.testclient import TestClient

from physbench.episodes import load_dataset
from physbench.service.app import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


class TestBasics:
    def test_health(self, client):
        resp = client.get("/health")
        assert resp.status_code == 200
        assert resp.json()["status"] == "ok"

    def test_task_catalog(self, client):
        resp = client.get("/tasks")
        assert resp.status_code == 200
        tasks = resp.json()["tasks"]
        assert len(tasks) == 11
        assert tasks["pendulum"]["state_dim"] == 2
        assert tasks["reprojection"]["action_dim"] == 6


class TestGenerate:
    def test_generate_writes_dataset(self, client, tmp_path):
        out = str(tmp_path / "data")
        resp = client.post(
            "/datasets/generate",
            json={"task": "rolling", "count": 4, "seed": 5, "out_dir": out, "steps": 20},
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["manifests"][0]["count"] == 4
        episodes, manifest = load_dataset(out)
        assert [e.episode_id for e in episodes] == body["manifests"][0]["episode_ids"]

    def test_overwrite_guard(self, client, tmp_path):
        out = str(tmp_path / "data")
        req = {"task": "rolling", "count": 2, "seed": 5, "out_dir": out, "steps": 10}
        assert client.post("/datasets/generate", json=req).status_code == 200
        resp = client.post("/datasets/generate", json=req)
        assert resp.status_code == 400
        req["overwrite"] = True
        assert client.post("/datasets/generate", json=req).status_code == 200

    def test_unknown_task_rejected(self, client, tmp_path):
        resp = client.post(
            "/datasets/generate",
            json={"task": "nope", "count": 1, "seed": 0, "out_dir": str(tmp_path / "x")},
        )
        assert resp.status_code == 400

    def test_ood_split(self, client, tmp_path):
        out = str(tmp_path / "split")
        resp = client.post(
            "/datasets/generate",
            json={
                "task": "bouncing_ball",
                "count": 4,
                "eval_count": 2,
                "seed": 9,
                "steps": 10,
                "out_dir": out,
                "ranges": {"speed": [0.5, 1.0]},
                "eval_ranges": {"speed": [2.0, 3.0]},
            },
        )
        assert resp.status_code == 200
        splits = {m["split"]: m for m in resp.json()["manifests"]}
        assert splits["train"]["count"] == 4
        assert splits["eval"]["count"] == 2
        eval_eps, _ = load_dataset(os.path.join(out, "eval"))
        assert all(ep.params["speed"] >= 2.0 for ep in eval_eps)


class TestPipeline:
    def test_fit_predict_evaluate(self, client, tmp_path):
        data = str(tmp_path / "data")
        client.post(
            "/datasets/generate",
            json={
                "task": "inclined_plane",
                "count": 20,
                "seed": 3,
                "out_dir": data,
                "ranges": {"alpha": [0.5, 0.5], "mu": [0.1, 0.1]},
            },
        )
        model = str(tmp_path / "linear.json")
        resp = client.post(
            "/fit",
            json={"predictor": "linear", "data_dir": data, "out_path": model},
        )
        assert resp.status_code == 200

        preds = str(tmp_path / "preds")
        resp = client.post(
            "/predict",
            json={
                "predictor": "linear",
                "model_path": model,
                "data_dir": data,
                "out_dir": preds,
                "rollout_steps": 90,
            },
        )
        assert resp.status_code == 200
        assert resp.json()["prediction_files"] == 20

        direct = client.post(
            "/evaluate",
            json={"predictors": [f"linear={model}"], "data_dirs": [data]},
        )
        external = client.post(
            "/evaluate",
            json={"predictions_dir": preds, "data_dirs": [data]},
        )
        assert direct.status_code == 200 and external.status_code == 200
        assert direct.json()["cells"][0]["mse"] == external.json()["cells"][0]["mse"]
        assert direct.json()["cells"][0]["mse"] < 1e-6

    def test_evaluate_requires_exactly_one_source(self, client, tmp_path):
        resp = client.post("/evaluate", json={"data_dirs": [str(tmp_path)]})
        assert resp.status_code == 400

    def test_report_then_curve_and_radar(self, client, tmp_path):
        data = str(tmp_path / "data")
        client.post(
            "/datasets/generate",
            json={"task": "rolling", "count": 3, "seed": 12, "out_dir": data},
        )
        report_dir = str(tmp_path / "report")
        resp = client.post(
            "/evaluate",
            json={
                "predictors": ["zoh", "constvel"],
                "data_dirs": [data],
                "reference": "zoh",
                "out_dir": report_dir,
            },
        )
        assert resp.status_code == 200
        report_path = resp.json()["report_path"]
        assert os.path.exists(report_path)
        assert os.path.exists(os.path.join(report_dir, "radar.csv"))

        curve = client.post(
            "/reports/curve",
            json={"report_path": report_path, "task": "rolling", "predictor": "zoh"},
        )
        assert curve.status_code == 200
        assert len(curve.json()["horizons"]) == 90

        radar = client.post(
            "/reports/radar", json={"report_path": report_path, "reference": "zoh"}
        )
        assert radar.status_code == 200
        norm = radar.json()["normalized"]["rolling"]
        assert max(norm.values()) == 1.0

    def test_oracle_reference_rejected(self, client, tmp_path):
        data = str(tmp_path / "data")
        client.post(
            "/datasets/generate",
            json={"task": "rolling", "count": 2, "seed": 1, "out_dir": data},
        )
        resp = client.post(
            "/evaluate",
            json={"predictors": ["oracle", "zoh"], "data_dirs": [data], "reference": "oracle"},
        )
        assert resp.status_code == 400
        assert resp.json()["error"] == "ZeroReference"
