import time

import pytest
from fastapi.testclient import TestClient

import app as app_module
from src.geometry.realizability import CircularType, induced_system
from src.hypergraph.constructions import omega9


@pytest.fixture
def client():
    with TestClient(app_module.app) as c:
        yield c


def test_root_and_health(client):
    assert client.get("/").json()["status"] == "running"
    health = client.get("/health").json()
    assert health["status"] == "healthy"
    assert health["worker_available"] is True


def test_check(client):
    response = client.post("/check", json=omega9().to_instance())
    assert response.status_code == 200
    assert response.json()["octahedral"] is True

    response = client.post("/check", json={"classes": [3, 3, 3], "edges": [[0, 0, 0]]})
    body = response.json()
    assert body["octahedral"] is False
    assert body["violation"] is not None


def test_check_rejects_malformed_instance(client):
    response = client.post("/check", json={"classes": [3, 3], "edges": [[0, 3]]})
    assert response.status_code == 422


def test_count_and_bounds(client):
    assert client.get("/count/3,3,3").json()["count"] == "524288"
    bounds = client.get("/bounds/3,3").json()
    assert bounds["lower"] == bounds["upper"] == 4
    assert client.get("/bounds/1,3").status_code == 400
    assert client.get("/count/3,x").status_code == 400


def test_construct(client):
    response = client.post("/construct", json={"kind": "upper", "classes": [2, 3, 3, 3]})
    assert response.status_code == 200
    assert len(response.json()["edges"]) == 5
    assert client.post("/construct", json={"kind": "spiral", "classes": [3]}).status_code == 400


def test_depth(client):
    line = {"d": 1, "classes": [[["-1"], ["2"]], [["1"], ["-3"]]]}
    response = client.post("/depth", json=line)
    assert response.status_code == 200
    assert response.json()["count"] == 2


def test_depth_reports_boundary_selection(client):
    response = client.post("/depth", json={"d": 1, "classes": [[["0"], ["1"]], [["1"], ["-1"]]]})
    assert response.status_code == 400
    assert response.json()["detail"]["selection"] == [0, 0]


def test_nu_is_cached(client):
    request = {"classes": [2, 3, 3], "workers": 1}
    first = client.post("/nu", json=request).json()
    assert first["cache"]["hit"] is False
    second = client.post("/nu", json=request).json()
    assert second["cache"]["hit"] is True
    assert second["nu"] == first["nu"]
    fresh = client.post("/nu", json={**request, "fresh": True}).json()
    assert fresh["cache"]["hit"] is False
    assert client.get("/cache/stats").json()["total_entries"] == 1
    assert client.post("/cache/clear").json()["cleared_count"] == 1


def test_nu_rejects_bad_shape(client):
    assert client.post("/nu", json={"classes": [1, 3]}).status_code == 400
    assert client.post("/nu", json={"classes": [3, 3], "budget_nodes": 0}).status_code == 422


def test_nu_async_job(client):
    response = client.post("/nu-async", json={"classes": [2, 2, 3], "workers": 1})
    assert response.status_code == 202
    job_id = response.json()["jobId"]
    status = {}
    for _ in range(100):
        status = client.get(f"/nu-async/status/{job_id}").json()
        if status["status"] in ("completed", "failed"):
            break
        time.sleep(0.1)
    assert status["status"] == "completed"
    assert status["result"]["exhaustive"] is True


def test_unknown_job(client):
    assert client.get("/nu-async/status/nope").status_code == 404


def test_realizable2d(client):
    system = induced_system(CircularType(tuple(range(0, 18, 2))))
    response = client.post("/realizable2d", json=system.to_instance())
    assert response.status_code == 200
    assert response.json()["realizable"] is True
    response = client.post("/realizable2d", json={"classes": [3, 3], "edges": []})
    assert response.status_code == 400


def test_stats(client):
    client.post("/nu", json={"classes": [2, 2], "workers": 1})
    stats = client.get("/stats").json()
    assert stats["request_stats"]["total_requests"] >= 1
