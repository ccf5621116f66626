"""Live teleoperation bridge over the simulated plant.

Ingests streamed human keypoints and direct wrist commands, retargets to
joint angles, drives the plant at a fixed rate, broadcasts state
snapshots, and records demonstrations with optional Gaussian noise
injection on the commanded joint state.

Messages are JSON objects with a `type` field; every outgoing message
carries a monotone `seq` and a `timestamp` (simulated seconds). Any
transport that preserves ordering and message boundaries works; the
bundled server speaks WebSocket (one JSON message per frame).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .hand_model import (
    ALL_JOINTS,
    HAND_JOINTS,
    WRIST_FE,
    WRIST_RUD,
    HandModel,
    JointState,
    build_default_model,
    clamp_to_limits,
)
from .motor_map import CalibrationRecord, state_to_motor_vector
from .plant_sim import MOTOR_GROUPS, Plant
from .retargeting import (
    DegeneratePoseError,
    HumanHandPose,
    RetargetConfig,
    smooth_step,
    solve_retarget,
)

SCHEMA_VERSION = 1

MSG_POSE = "pose"
MSG_WRIST = "wrist_cmd"
MSG_CONFIG = "config_update"
MSG_STATE = "state"
MSG_RECORD_START = "record_start"
MSG_RECORD_STOP = "record_stop"
MSG_ERROR = "error"


@dataclass
class DemonstrationRecord:
    timestamp: float
    proprio: list[float]        # 18 hand joints + 2 wrist joints, degrees
    motor: list[float]          # 16 motor ticks
    action: list[float]         # commanded joint state, 20 degrees
    noise_applied: list[float]  # per-joint injected noise, 20 degrees

    def to_json(self) -> str:
        return json.dumps(
            {
                "timestamp": self.timestamp,
                "proprio": self.proprio,
                "motor": self.motor,
                "action": self.action,
                "noise_applied": self.noise_applied,
                "arm": None,  # reserved for downstream arm-state composition
            },
            sort_keys=True,
        )


class TeleopSession:
    """Deterministic control core: message handling + fixed-rate tick loop.

    Single-writer: one owner calls handle_message / tick; outgoing messages
    are returned to the caller for transport.
    """

    def __init__(
        self,
        cals: dict[int, CalibrationRecord],
        plant: Plant,
        model: HandModel | None = None,
        rate_hz: float = 50.0,
        smoothing_lambda: float = 0.6,
        noise_sigma: float = 0.0,
        seed: int = 0,
        retarget_cfg: RetargetConfig | None = None,
    ):
        self.model = model if model is not None else build_default_model()
        self.cals = dict(cals)
        self.plant = plant
        self.rate_hz = rate_hz
        self.dt = 1.0 / rate_hz
        self.smoothing_lambda = smoothing_lambda
        self.noise_sigma = noise_sigma
        self.rng = np.random.default_rng(seed)
        self.retarget_cfg = retarget_cfg or RetargetConfig()
        self.theta_cmd = JointState.zeros()
        self.last_residual = 0.0
        self.recording: list[DemonstrationRecord] | None = None
        self.demo_log: list[DemonstrationRecord] = []
        self._seq = 0
        self._last_ts = -1.0

    # -- messaging ----------------------------------------------------------

    def _envelope(self, msg_type: str, payload: dict) -> dict:
        self._seq += 1
        ts = self.plant.state.time
        if ts <= self._last_ts:
            ts = np.nextafter(self._last_ts, np.inf)
        self._last_ts = ts
        return {"type": msg_type, "seq": self._seq, "timestamp": ts,
                "schema_version": SCHEMA_VERSION, **payload}

    def _error(self, message: str) -> dict:
        return self._envelope(MSG_ERROR, {"message": message})

    def state_message(self) -> dict:
        st = self.plant.state
        temps = {
            g: float(st.temps[m])
            for g, m in (("fingers", 0), ("thumb", 11), ("wrist", 14))
        }
        return self._envelope(
            MSG_STATE,
            {
                "joints": [float(v) for v in st.joint_angles.as_vector()],
                "joint_order": [repr(j) for j in ALL_JOINTS],
                "motors": [float(v) for v in st.motor_pos],
                "temps": temps,
                "residual": self.last_residual,
                "recording": self.recording is not None,
                "c": {str(m): self.cals[m].c for m in sorted(self.cals)},
            },
        )

    def handle_message(self, msg: dict) -> list[dict]:
        """Process one inbound message; returns outbound messages."""
        try:
            msg_type = msg.get("type")
            if msg_type == MSG_POSE:
                return self._handle_pose(msg)
            if msg_type == MSG_WRIST:
                return self._handle_wrist(msg)
            if msg_type == MSG_CONFIG:
                return self._handle_config(msg)
            if msg_type == MSG_RECORD_START:
                self.recording = []
                return [self.state_message()]
            if msg_type == MSG_RECORD_STOP:
                if self.recording is not None:
                    self.demo_log.extend(self.recording)
                self.recording = None
                return [self.state_message()]
            return [self._error(f"unknown message type {msg_type!r}")]
        except (KeyError, TypeError, ValueError) as e:
            return [self._error(f"malformed {msg.get('type')!r} message: {e}")]

    def _handle_pose(self, msg: dict) -> list[dict]:
        kp = np.asarray(msg["keypoints"], dtype=float)
        if kp.shape != (21, 3):
            return [self._error(f"expected 21 keypoints, got shape {kp.shape}")]
        try:
            pose = HumanHandPose(keypoints=kp, timestamp=float(msg.get("timestamp", 0.0)))
            result = solve_retarget(pose, self.model, self.theta_cmd, self.retarget_cfg)
        except DegeneratePoseError as e:
            return [self._error(f"degenerate pose: {e}")]  # previous command held
        self.last_residual = result.residual
        blended = smooth_step(result.theta, self.theta_cmd, self.smoothing_lambda)
        # keep the directly-commanded wrist angles
        blended = blended.replace(
            {WRIST_FE: self.theta_cmd[WRIST_FE], WRIST_RUD: self.theta_cmd[WRIST_RUD]}
        )
        self.theta_cmd = clamp_to_limits(self.model, blended)
        self.tick()
        return [self.state_message()]

    def _handle_wrist(self, msg: dict) -> list[dict]:
        alpha, beta = float(msg["alpha"]), float(msg["beta"])
        self.theta_cmd = clamp_to_limits(
            self.model, self.theta_cmd.replace({WRIST_FE: alpha, WRIST_RUD: beta})
        )
        return []

    def _handle_config(self, msg: dict) -> list[dict]:
        if "smoothing_lambda" in msg:
            lam = float(msg["smoothing_lambda"])
            if not 0.0 <= lam <= 1.0:
                return [self._error("smoothing_lambda must be in [0, 1]")]
            self.smoothing_lambda = lam
        for m_str, c in msg.get("c", {}).items():
            m = int(m_str)
            if c <= 0:
                return [self._error(f"scaling factor c for motor {m} must be > 0")]
            old = self.cals[m]
            self.cals[m] = CalibrationRecord(
                p_min=old.p_min, p_max=old.p_max, theta_min=old.theta_min,
                theta_max=old.theta_max, c=float(c),
            )
        return [self.state_message()]

    # -- control loop -------------------------------------------------------

    def tick(self, dt: float | None = None) -> None:
        """One fixed-rate control step: command plant, step dynamics, record."""
        dt = self.dt if dt is None else dt
        action = self.theta_cmd
        noise = np.zeros(len(ALL_JOINTS))
        if self.recording is not None and self.noise_sigma > 0:
            noise = self.rng.normal(0.0, self.noise_sigma, size=len(ALL_JOINTS))
        noisy = clamp_to_limits(
            self.model, JointState.from_vector(action.as_vector() + noise)
        )
        cmd = state_to_motor_vector(self.model, noisy, self.cals)
        self.plant.step(cmd, dt)
        if self.recording is not None:
            st = self.plant.state
            proprio = [st.joint_angles[j] for j in HAND_JOINTS] + [
                st.joint_angles[WRIST_FE], st.joint_angles[WRIST_RUD]
            ]
            self.recording.append(
                DemonstrationRecord(
                    timestamp=st.time,
                    proprio=[float(v) for v in proprio],
                    motor=[float(v) for v in st.motor_pos],
                    action=[float(v) for v in action.as_vector()],
                    noise_applied=[float(v) for v in noise],
                )
            )

    def run_ticks(self, n: int) -> list[dict]:
        """Run n idle control ticks, emitting a State message per tick."""
        return [self._run_one_tick() for _ in range(n)]

    def _run_one_tick(self) -> dict:
        self.tick()
        return self.state_message()


def save_demonstration(records, path: str | Path) -> None:
    with open(path, "w") as f:
        for r in records:
            f.write(r.to_json() + "\n")


def load_demonstration(path: str | Path) -> list[DemonstrationRecord]:
    out = []
    with open(path) as f:
        for line in f:
            if not line.strip():
                continue
            d = json.loads(line)
            out.append(
                DemonstrationRecord(
                    timestamp=d["timestamp"], proprio=d["proprio"],
                    motor=d["motor"], action=d["action"],
                    noise_applied=d["noise_applied"],
                )
            )
    return out


def replay_session(
    make_session,
    inputs: list[tuple[int, dict]],
    total_ticks: int,
) -> tuple[list[dict], list[DemonstrationRecord]]:
    """Deterministic replay: inputs are (tick_index, message) pairs applied
    before the given tick. Returns (all outbound messages, demonstration log).
    """
    session = make_session()
    by_tick: dict[int, list[dict]] = {}
    for tick_i, msg in inputs:
        by_tick.setdefault(tick_i, []).append(msg)
    out: list[dict] = []
    for i in range(total_ticks):
        for msg in by_tick.get(i, ()):
            out.extend(session.handle_message(msg))
        out.append(session._run_one_tick())
    if session.recording is not None:
        session.demo_log.extend(session.recording)
        session.recording = None
    return out, session.demo_log
