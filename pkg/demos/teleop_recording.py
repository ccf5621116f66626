"""Teleop session: stream poses, record a demonstration, replay it.

Runs the deterministic session core directly (no WebSocket server):
feeds two tracked hand poses and a wrist command, records with noise
injection, then replays the same input log and checks the output is
byte-identical.
"""

import json

import numpy as np

from tendonhand.hand_model import JointState, build_default_model, forward_kinematics
from tendonhand.plant_sim import Plant, default_true_cals, ideal_plant_config
from tendonhand.teleop import TeleopSession, replay_session, save_demonstration

model = build_default_model()
rng = np.random.default_rng(0)


def tracked_pose(curl_deg):
    state = JointState({
        j: min(curl_deg, model.limits[j].theta_max)
        for j in model.limits if j.kind.name in ("MCP", "PIP", "DIP", "IP")
    })
    return {"type": "pose",
            "keypoints": (forward_kinematics(model, state) * 1e-3).tolist()}


inputs = [
    (0, {"type": "record_start"}),
    (5, tracked_pose(40.0)),
    (25, {"type": "wrist_cmd", "alpha": 15.0, "beta": -10.0}),
    (40, tracked_pose(90.0)),
]


def make_session():
    return TeleopSession(default_true_cals(), Plant(ideal_plant_config()),
                         rate_hz=50.0, noise_sigma=1.0, seed=7)


out, demo = replay_session(make_session, inputs, total_ticks=100)
print(f"session produced {len(out)} messages, {len(demo)} demonstration records")
print(f"final simulated time: {out[-1]['timestamp']:.2f} s")

last = demo[-1]
print(f"last record: index MCP proprio {last.proprio[1]:.1f} deg, "
      f"wrist {last.proprio[18]:.1f}/{last.proprio[19]:.1f} deg")

out2, demo2 = replay_session(make_session, inputs, total_ticks=100)
identical = (json.dumps(out) == json.dumps(out2)
             and [r.to_json() for r in demo] == [r.to_json() for r in demo2])
print(f"replay byte-identical: {identical}")

save_demonstration(demo, "/tmp/demo.jsonl")
print("demonstration written to /tmp/demo.jsonl")
