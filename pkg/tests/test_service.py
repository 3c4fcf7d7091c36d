import numpy as np
import pytest
from fastapi.testclient import TestClient

import resilientsim as rs
from resilientsim.api.app import create_app
from resilientsim.api.service import demo_request, run_simulation
from resilientsim.api.schemas import RunRequest, StrategySpec

from conftest import SYNTHETIC_DOC, SYNTHETIC_TF


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app()) as c:
        yield c


def _synthetic_request(**overrides):
    body = {
        "system": SYNTHETIC_DOC,
        "t_f": SYNTHETIC_TF,
        "epsilon": 0.1,
        "strategy": {"kind": "sinusoid", "params": {"frequency": 0.7}},
        "steps_per_interval": 32,
    }
    body.update(overrides)
    return body


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok"}


def test_feasibility_endpoint_admire(client):
    resp = client.post("/feasibility", json={"system": "admire", "t_f": 20.0,
                                             "epsilon": 0.1})
    assert resp.status_code == 200
    body = resp.json()
    assert body["c1"] == pytest.approx(96.319287, rel=1e-5)
    assert body["conditions_hold"] is False
    assert body["tf_valid"] is False
    assert body["feasible_interval"] is None
    assert body["tf_lower_bound"] == pytest.approx(12.9518, rel=1e-4)


def test_feasibility_endpoint_synthetic(client):
    resp = client.post("/feasibility", json=_synthetic_request())
    assert resp.status_code == 200
    body = resp.json()
    assert body["conditions_hold"] is True and body["tf_valid"] is True
    lo, hi = body["feasible_interval"]
    assert lo < SYNTHETIC_TF < hi


def test_simulate_endpoint_synthetic(client):
    resp = client.post("/simulate", json=_synthetic_request())
    assert resp.status_code == 200
    body = resp.json()
    summary = body["summary"]
    assert summary["final_error_ok"] is True
    assert summary["final_error"] <= 0.1
    assert summary["constraint_max"] <= 1.0
    assert summary["n_bar"] == summary["n1"] + 1
    assert summary["violations"] == {"bound": [], "constraint": []}
    assert len(body["schedule"]) == summary["n_bar"]
    assert len(body["node_errors"]) == summary["n_bar"]
    rows = summary["n_bar"] * 32 + 1
    assert len(body["trace"]["times"]) == rows
    assert len(body["trace"]["states"][0]) == 2
    assert len(body["trace"]["uuc"][0]) == 1
    assert body["schedule"][-1]["t_end"] == SYNTHETIC_TF
    # node errors shrink along the horizon
    errs = [r["err"] for r in body["node_errors"]]
    assert errs[-1] < errs[0]


def test_simulate_respects_state_overrides(client):
    resp = client.post("/simulate", json=_synthetic_request(
        x0=[0.45, 0.15], xtg=[0.42, 0.18]))
    assert resp.status_code == 200
    body = resp.json()
    assert body["trace"]["states"][0] == [0.45, 0.15]
    assert body["summary"]["final_error"] <= 0.1


def test_demo_endpoint_defaults(client):
    resp = client.post("/demo/admire")
    assert resp.status_code == 200
    body = resp.json()
    summary = body["summary"]
    assert summary["final_error"] <= 0.1
    assert summary["constraint_max"] <= 1.0
    assert summary["n_bar"] == 8
    assert summary["strategy"] == "bang_bang"
    assert summary["seed"] == 1
    assert body["feasibility"]["tf_valid"] is False  # advisory only
    assert len(body["trace"]["times"]) == 8 * 256 + 1


def test_demo_endpoint_with_strategy_override(client):
    resp = client.post("/demo/admire", params={"strategy": "cancellation_probe"})
    assert resp.status_code == 200
    assert resp.json()["summary"]["strategy"] == "cancellation_probe"


def test_validation_error_becomes_422(client):
    resp = client.post("/simulate", json=_synthetic_request(t_f=-1.0))
    assert resp.status_code == 422  # pydantic gt=0 constraint


def test_domain_errors_map_to_422_with_error_name(client):
    resp = client.post("/simulate", json=_synthetic_request(epsilon=1e-300))
    assert resp.status_code == 422
    body = resp.json()
    assert body["error"] == "CapError"
    assert "epsilon" in body["detail"]

    resp = client.post("/simulate", json=_synthetic_request(
        strategy={"kind": "sinusoid", "params": {"color": "red"}}))
    assert resp.status_code == 422
    assert resp.json()["error"] == "ConfigError"

    resp = client.post("/feasibility", json=_synthetic_request(
        system="/nonexistent/system.json"))
    assert resp.status_code == 422
    assert resp.json()["error"] == "ConfigError"


def test_simulation_responses_are_deterministic(client):
    body = _synthetic_request(strategy={"kind": "bang_bang",
                                        "params": {"rng_seed": 3,
                                                   "switch_period": 0.2}})
    first = client.post("/simulate", json=body).json()
    second = client.post("/simulate", json=body).json()
    assert first["trace"] == second["trace"]
    assert first["schedule"] == second["schedule"]
    assert first["summary"]["final_error"] == second["summary"]["final_error"]


def test_demo_request_matches_service_pipeline():
    # the HTTP demo is just run_simulation(demo_request()); spot-check the
    # in-process pipeline agrees with a direct library run
    req = demo_request()
    resp = run_simulation(req)
    sys_ = rs.build_admire()
    approx = rs.linearize_at_origin(sys_, rs.ADMIRE_X0)
    report = rs.analyze(sys_, approx, rs.ADMIRE_XTG, t_f=20.0)
    sched = rs.build_schedule(approx, rs.ADMIRE_XTG, 20.0, 0.1,
                              report.c, report.d_s, n_bar_override=8)
    trace = rs.run_closed_loop(
        sys_, sched,
        rs.BangBang(switch_period=0.01, rng_seed=1),
        steps_per_interval=256,
    )
    assert resp.summary.final_error == trace.final_error
    assert resp.summary.constraint_max == trace.constraint_max
    np.testing.assert_array_equal(np.array(resp.trace.states), trace.states)


def test_run_request_defaults():
    req = RunRequest(t_f=5.0, epsilon=0.1)
    assert req.system == "admire"
    assert req.strategy == StrategySpec(kind="bang_bang", params={})
    assert req.steps_per_interval == 256
    assert req.seed == 0
    with pytest.raises(ValueError):
        RunRequest(t_f=5.0, epsilon=0.1, steps_per_interval=8)
