"""Simulated tendon-driven plant.

Quasi-static behavioral model: joint angles follow a hysteretic static map
of motor position (backlash of width slack + coulomb_band in tick space,
rate-limited motor motion, Gaussian measurement noise), with optional
rigid DIP-PIP coupling and first-order motor thermal dynamics. This
reproduces the phenomena the experiment harnesses measure (accuracy,
sweep hysteresis and trial scatter, thermal settling) without inertial
parameters.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

import numpy as np
import yaml

from .hand_model import (
    ALL_JOINTS,
    CouplingMode,
    Finger,
    HandModel,
    JointId,
    JointKind,
    JointState,
    build_default_model,
    joint,
)
from .motor_map import (
    NUM_MOTORS,
    CalibrationRecord,
    MotorVector,
    driving_joint_for_motor,
    motor_to_joint,
)

MOTOR_GROUPS = {
    **{m: "fingers" for m in range(11)},
    11: "thumb", 12: "thumb", 13: "thumb",
    14: "wrist", 15: "wrist",
}


@dataclass(frozen=True)
class ThermalParams:
    T_ambient: float = 25.0
    R_th: float = 8.0       # °C/W
    C_th: float = 75.0      # J/°C  (tau = R*C = 600 s)
    P_active: float = 0.0   # W while powered
    P_idle: float = 0.0

    def __post_init__(self):
        if self.R_th <= 0 or self.C_th <= 0:
            raise ValueError("R_th and C_th must be > 0")

    @property
    def steady_state(self) -> float:
        return self.T_ambient + self.P_active * self.R_th


# Steady states fitted to the 5-hour endurance measurement
# (fingers 30.35, thumb 46.97, wrist 43.80 °C at 25 °C ambient).
DEFAULT_THERMAL = {
    "fingers": ThermalParams(P_active=(30.35 - 25.0) / 8.0),
    "thumb": ThermalParams(P_active=(46.97 - 25.0) / 8.0),
    "wrist": ThermalParams(P_active=(43.80 - 25.0) / 8.0),
}


def thermal_step(T: float, active: bool, dt: float, params: ThermalParams) -> float:
    """One explicit-Euler step of dT/dt = (P - (T - T_amb)/R) / C.

    Stable (and convergent to the same fixed point T_amb + P*R) for any
    dt < 2*R*C.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    P = params.P_active if active else params.P_idle
    return T + dt / params.C_th * (P - (T - params.T_ambient) / params.R_th)


@dataclass(frozen=True)
class PlantConfig:
    true_cals: dict[int, CalibrationRecord]
    slack: float = 0.0              # ticks of tendon slack
    coulomb_band: float = 0.0       # ticks of friction hysteresis
    noise_sigma: float = 0.0        # degrees, measurement noise
    coupling_mode: CouplingMode = CouplingMode.RIGID
    uncoupled_ratio_jitter: float = 0.0
    thermal: dict[str, ThermalParams] = field(
        default_factory=lambda: dict(DEFAULT_THERMAL)
    )
    motor_rate: float = 20000.0     # ticks/s
    tension_base_load: float = 1.0  # load units once the tendon is taut
    load_per_tick: float = 0.002    # load growth while driving the joint
    stop_stiffness: float = 0.05    # load growth past the hard stop

    def __post_init__(self):
        if self.slack < 0 or self.coulomb_band < 0 or self.noise_sigma < 0:
            raise ValueError("slack, coulomb_band and noise_sigma must be >= 0")
        for p in self.thermal.values():
            if p.R_th <= 0 or p.C_th <= 0:
                raise ValueError("thermal R_th and C_th must be > 0")

    @property
    def backlash_width(self) -> float:
        return self.slack + self.coulomb_band


@dataclass
class PlantState:
    motor_pos: np.ndarray       # ticks, 16
    joint_angles: JointState    # true (noise-free) joint angles
    load: np.ndarray            # load units, 16
    temps: np.ndarray           # °C, 16
    time: float = 0.0
    effective_pos: np.ndarray | None = None  # backlash element output, ticks
    dip_ratio: np.ndarray | None = None      # per non-thumb finger, uncoupled mode


def _play(prev_out: float, u: float, width: float) -> float:
    """Backlash (play) operator: output tracks input within a dead band."""
    return min(max(prev_out, u - width), u)


class Plant:
    """Single-writer simulated plant over a HandModel and a PlantConfig."""

    NON_THUMB_FINGERS = (Finger.INDEX, Finger.MIDDLE, Finger.RING, Finger.PINKY)

    def __init__(
        self,
        config: PlantConfig,
        model: HandModel | None = None,
        seed: int = 0,
        start_margin: float = 200.0,
    ):
        self.model = model if model is not None else build_default_model()
        self.config = config
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        for m in range(NUM_MOTORS):
            if m not in config.true_cals:
                raise ValueError(f"missing ground-truth record for motor {m}")
        # Motors start `start_margin` ticks before the tension point.
        pos = np.zeros(NUM_MOTORS)
        for m, cal in config.true_cals.items():
            d = 1.0 if cal.p_max > cal.p_min else -1.0
            pos[m] = cal.p_min - d * start_margin
        temps = np.array(
            [config.thermal[MOTOR_GROUPS[m]].T_ambient for m in range(NUM_MOTORS)]
        )
        self.state = PlantState(
            motor_pos=pos,
            joint_angles=JointState.zeros(),
            load=np.zeros(NUM_MOTORS),
            temps=temps,
            effective_pos=pos.copy(),
            dip_ratio=np.ones(len(self.NON_THUMB_FINGERS)),
        )
        self.powered = True
        self._dip_play = np.zeros(len(self.NON_THUMB_FINGERS))  # degrees
        self._target = pos.copy()
        self._update_joints()

    # -- state evolution ----------------------------------------------------

    def new_trial(self) -> None:
        """Redraw the uncoupled DIP/PIP ratio (per-build variation per trial)."""
        j = self.config.uncoupled_ratio_jitter
        n = len(self.NON_THUMB_FINGERS)
        self.state.dip_ratio = 1.0 + j * self.rng.uniform(-1.0, 1.0, size=n)

    def step(self, cmd: MotorVector | np.ndarray, dt: float) -> PlantState:
        if dt <= 0:
            raise ValueError("dt must be > 0")
        cfg = self.config
        st = self.state
        target = cmd.positions if isinstance(cmd, MotorVector) else np.asarray(cmd, float)
        self._target = target.astype(float)

        max_move = cfg.motor_rate * dt
        delta = np.clip(target - st.motor_pos, -max_move, max_move)
        st.motor_pos = st.motor_pos + delta

        # backlash in the winding direction of each motor
        for m in range(NUM_MOTORS):
            cal = cfg.true_cals[m]
            d = 1.0 if cal.p_max > cal.p_min else -1.0
            u = d * st.motor_pos[m]
            eff = d * st.effective_pos[m]
            st.effective_pos[m] = d * _play(eff, u, cfg.backlash_width)

        self._update_joints()
        self._update_load()

        for m in range(NUM_MOTORS):
            st.temps[m] = thermal_step(
                st.temps[m], self.powered, dt, cfg.thermal[MOTOR_GROUPS[m]]
            )
        st.time += dt
        return st

    def _update_joints(self) -> None:
        cfg, st = self.config, self.state
        angles: dict[JointId, float] = {}
        for m in range(NUM_MOTORS):
            j = driving_joint_for_motor(self.model, m)
            angles[j] = motor_to_joint(st.effective_pos[m], cfg.true_cals[m])
        for i, f in enumerate(self.NON_THUMB_FINGERS):
            pip = angles[joint(f, JointKind.PIP)]
            dip_j = joint(f, JointKind.DIP)
            if cfg.coupling_mode is CouplingMode.RIGID:
                dip = pip
            else:
                # the uncoupled DIP trails the PIP with its own play and a
                # per-trial transmission ratio
                curl_cal = cfg.true_cals[self.model.motor_of(dip_j)]
                band_deg = cfg.coulomb_band * abs(
                    curl_cal.theta_span / curl_cal.tick_span
                )
                self._dip_play[i] = _play(self._dip_play[i], pip, band_deg)
                dip = st.dip_ratio[i] * self._dip_play[i]
            angles[dip_j] = self.model.limits[dip_j].clamp(dip)
        st.joint_angles = JointState(angles)

    def _update_load(self) -> None:
        cfg, st = self.config, self.state
        for m in range(NUM_MOTORS):
            cal = cfg.true_cals[m]
            d = 1.0 if cal.p_max > cal.p_min else -1.0
            eff = d * st.effective_pos[m]
            p_lo, p_hi = d * cal.p_min, d * cal.p_max
            if eff < p_lo:
                st.load[m] = 0.0
            else:
                load = cfg.tension_base_load + cfg.load_per_tick * (eff - p_lo)
                if eff > p_hi:
                    load += cfg.stop_stiffness * (eff - p_hi)
                st.load[m] = load

    # -- observation --------------------------------------------------------

    def settle(self, seconds: float, dt: float = 0.01) -> PlantState:
        """Hold the current command for `seconds` of simulated time."""
        steps = max(1, int(round(seconds / dt)))
        for _ in range(steps):
            self.step(self._target, dt)
        return self.state

    def move_to(self, motor: int, ticks: float, settle_time: float = 0.05) -> None:
        target = self._target.copy()
        target[motor] = ticks
        self._target = target
        self.settle(settle_time)

    def read_load(self, motor: int) -> float:
        return float(self.state.load[motor])

    def measure_joint(self, j: JointId) -> float:
        """Noisy joint angle measurement (noise-free when sigma = 0)."""
        true = self.state.joint_angles[j]
        if self.config.noise_sigma == 0:
            return true
        return true + self.rng.normal(0.0, self.config.noise_sigma)

    def measured_joint_for_motor(self, motor: int) -> JointId:
        """Distal-most joint moved by this motor (DIP for curl motors)."""
        j = driving_joint_for_motor(self.model, motor)
        if j.finger is not Finger.THUMB and j.kind is JointKind.PIP:
            return joint(j.finger, JointKind.DIP)
        return j


class SweepDirection(Enum):
    FORWARD = "forward"
    REVERSE = "reverse"


@dataclass(frozen=True)
class SweepSample:
    cmd: float
    angle: float
    direction: SweepDirection
    trial: int


@dataclass(frozen=True)
class SweepTrajectory:
    motor: int
    joint: JointId
    samples: tuple[SweepSample, ...]

    def grid(self, trial: int, direction: SweepDirection) -> np.ndarray:
        rows = [
            (s.cmd, s.angle)
            for s in self.samples
            if s.trial == trial and s.direction is direction
        ]
        return np.asarray(rows)

    @property
    def trials(self) -> list[int]:
        return sorted({s.trial for s in self.samples})


def run_sweep(
    plant: Plant,
    motor: int,
    cycles: int,
    n_points: int = 40,
    settle_time: float = 0.05,
) -> SweepTrajectory:
    """Full-range forward+reverse sweeps of one motor, `cycles` trials."""
    if cycles < 1:
        raise ValueError("cycles must be >= 1")
    cal = plant.config.true_cals[motor]
    grid = np.linspace(cal.p_min, cal.p_max, n_points)
    measured = plant.measured_joint_for_motor(motor)
    samples = []
    for trial in range(cycles):
        plant.new_trial()
        for direction, cmds in (
            (SweepDirection.FORWARD, grid),
            (SweepDirection.REVERSE, grid[::-1]),
        ):
            for cmd in cmds:
                plant.move_to(motor, float(cmd), settle_time)
                samples.append(
                    SweepSample(float(cmd), plant.measure_joint(measured),
                                direction, trial)
                )
    return SweepTrajectory(motor=motor, joint=measured, samples=tuple(samples))


def loop_area(traj: SweepTrajectory, trial: int) -> float:
    """Area enclosed between the forward and reverse branches of one trial."""
    fwd = traj.grid(trial, SweepDirection.FORWARD)
    rev = traj.grid(trial, SweepDirection.REVERSE)[::-1]
    if fwd.shape != rev.shape or not np.allclose(fwd[:, 0], rev[:, 0]):
        raise ValueError("forward and reverse branches use different grids")
    return float(np.trapezoid(np.abs(fwd[:, 1] - rev[:, 1]), fwd[:, 0]))


# ---------------------------------------------------------------------------
# plant config file

def default_true_cals(tick_span: float = 2000.0, p_start: float = 1000.0
                      ) -> dict[int, CalibrationRecord]:
    """Ground-truth records: Table-of-limits angle ranges over a uniform
    tick span per motor."""
    model = build_default_model()
    cals = {}
    for m in range(NUM_MOTORS):
        j = driving_joint_for_motor(model, m)
        lim = model.limits[j]
        cals[m] = CalibrationRecord(
            p_min=p_start, p_max=p_start + tick_span,
            theta_min=lim.theta_min, theta_max=lim.theta_max, c=1.0,
        )
    return cals


def ideal_plant_config(**overrides) -> PlantConfig:
    return PlantConfig(true_cals=default_true_cals(), **overrides)


def save_plant_config(cfg: PlantConfig, path: str | Path) -> None:
    doc = {
        "schema_version": 1,
        "slack": cfg.slack,
        "coulomb_band": cfg.coulomb_band,
        "noise_sigma": cfg.noise_sigma,
        "coupling_mode": cfg.coupling_mode.value,
        "uncoupled_ratio_jitter": cfg.uncoupled_ratio_jitter,
        "motor_rate": cfg.motor_rate,
        "true_cals": {
            m: {"p_min": c.p_min, "p_max": c.p_max, "theta_min": c.theta_min,
                "theta_max": c.theta_max, "c": c.c}
            for m, c in sorted(cfg.true_cals.items())
        },
        "thermal": {
            g: {"T_ambient": p.T_ambient, "R_th": p.R_th, "C_th": p.C_th,
                "P_active": p.P_active, "P_idle": p.P_idle}
            for g, p in sorted(cfg.thermal.items())
        },
    }
    with open(path, "w") as f:
        yaml.safe_dump(doc, f, sort_keys=True)


def load_plant_config(path: str | Path) -> PlantConfig:
    with open(path) as f:
        doc = yaml.safe_load(f)
    if doc.get("schema_version") != 1:
        raise ValueError(f"unsupported plant schema_version {doc.get('schema_version')!r}")
    return PlantConfig(
        true_cals={int(m): CalibrationRecord(**c) for m, c in doc["true_cals"].items()},
        slack=float(doc["slack"]),
        coulomb_band=float(doc["coulomb_band"]),
        noise_sigma=float(doc["noise_sigma"]),
        coupling_mode=CouplingMode(doc["coupling_mode"]),
        uncoupled_ratio_jitter=float(doc["uncoupled_ratio_jitter"]),
        motor_rate=float(doc["motor_rate"]),
        thermal={g: ThermalParams(**p) for g, p in doc["thermal"].items()},
    )
