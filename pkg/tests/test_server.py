import json

from fastapi.testclient import TestClient

from tendonhand.plant_sim import Plant, default_true_cals, ideal_plant_config
from tendonhand.server import build_app
from tendonhand.teleop import TeleopSession


def make_app():
    plant = Plant(ideal_plant_config())
    session = TeleopSession(default_true_cals(), plant, rate_hz=200.0)
    return build_app(session)


def test_healthz():
    with TestClient(make_app()) as client:
        r = client.get("/healthz")
        assert r.status_code == 200
        assert r.json()["ok"] is True


def test_websocket_broadcast_and_commands():
    with TestClient(make_app()) as client:
        with client.websocket_connect("/ws") as ws:
            msg = json.loads(ws.receive_text())
            assert msg["type"] == "state"
            assert len(msg["joints"]) == 20

            ws.send_text(json.dumps({"type": "wrist_cmd", "alpha": 10.0, "beta": 0.0}))
            # wrist command produces no reply; the periodic state stream continues
            for _ in range(50):
                msg = json.loads(ws.receive_text())
                if msg["type"] == "state" and abs(msg["joints"][-2] - 10.0) < 5.0:
                    break
            else:
                raise AssertionError("wrist command never reflected in state")


def test_invalid_json_gets_error():
    with TestClient(make_app()) as client:
        with client.websocket_connect("/ws") as ws:
            ws.send_text("{not json")
            for _ in range(20):
                msg = json.loads(ws.receive_text())
                if msg["type"] == "error":
                    assert "JSON" in msg["message"]
                    return
            raise AssertionError("no error message received")
