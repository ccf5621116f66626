"""Linear joint-angle <-> motor-position mapping over calibrated records.

p = p_min + c * (theta - theta_min) / (theta_max - theta_min) * (p_max - p_min)

With theta_min = 0 (the convention for all flexion joints) this reduces to
the plain normalized interpolation; the generalized form covers the wrist,
whose calibrated range is signed. c > 1 overdrives the tendon to compensate
friction and detector underestimation, then saturates at the motor limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
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
    apply_coupling,
)

NUM_MOTORS = 16


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class CalibrationRecord:
    p_min: float
    p_max: float
    theta_min: float
    theta_max: float
    c: float = 1.0

    def __post_init__(self):
        if self.p_min == self.p_max:
            raise ConfigurationError("p_min and p_max must differ")
        if not self.theta_min < self.theta_max:
            raise ConfigurationError("theta_min must be < theta_max")
        if not self.c > 0:
            raise ConfigurationError("scaling factor c must be > 0")

    @property
    def tick_span(self) -> float:
        return self.p_max - self.p_min

    @property
    def theta_span(self) -> float:
        return self.theta_max - self.theta_min


@dataclass(frozen=True)
class MotorVector:
    positions: np.ndarray  # 16 motor positions, ticks

    def __post_init__(self):
        p = np.asarray(self.positions, dtype=float)
        if p.shape != (NUM_MOTORS,):
            raise ValueError(f"expected {NUM_MOTORS} motor positions, got {p.shape}")
        if not np.all(np.isfinite(p)):
            raise ValueError("motor positions must be finite")
        object.__setattr__(self, "positions", p)

    def __getitem__(self, i: int) -> float:
        return float(self.positions[i])


def joint_to_motor(theta: float, cal: CalibrationRecord) -> float:
    """Continuous motor position for a joint angle, clamped to the motor range."""
    if not math.isfinite(theta):
        raise ValueError("theta must be finite")
    frac = (theta - cal.theta_min) / cal.theta_span
    p = cal.p_min + cal.c * frac * cal.tick_span
    lo, hi = min(cal.p_min, cal.p_max), max(cal.p_min, cal.p_max)
    return min(max(p, lo), hi)


def motor_to_joint(p: float, cal: CalibrationRecord) -> float:
    """Inverse of joint_to_motor (same c), clamped to [theta_min, theta_max]."""
    if not math.isfinite(p):
        raise ValueError("p must be finite")
    theta = cal.theta_min + (p - cal.p_min) / (cal.c * cal.tick_span) * cal.theta_span
    return min(max(theta, cal.theta_min), cal.theta_max)


def quantize_ticks(p: float) -> int:
    """Round to the nearest integral tick, ties away from zero."""
    return int(math.copysign(math.floor(abs(p) + 0.5), p))


def _driving_joint(j: JointId) -> bool:
    """Whether this joint's angle drives its motor (PIP drives coupled pairs)."""
    return not (j.finger is not Finger.THUMB and j.kind is JointKind.DIP)


def driving_joint_for_motor(model: HandModel, motor: int) -> JointId:
    for j in ALL_JOINTS:
        if model.motor_of(j) == motor and _driving_joint(j):
            return j
    raise ConfigurationError(f"no driving joint for motor {motor}")


def state_to_motor_vector(
    model: HandModel,
    state: JointState,
    cals: dict[int, CalibrationRecord],
    quantize: bool = True,
) -> MotorVector:
    """Motor commands for a limit-valid, coupling-consistent joint state."""
    state = apply_coupling(model, state, CouplingMode.RIGID)
    positions = np.zeros(NUM_MOTORS)
    for m in range(NUM_MOTORS):
        if m not in cals:
            raise ConfigurationError(f"missing calibration for motor {m}")
        theta = state[driving_joint_for_motor(model, m)]
        p = joint_to_motor(theta, cals[m])
        positions[m] = quantize_ticks(p) if quantize else p
    return MotorVector(positions)


# ---------------------------------------------------------------------------
# calibration file format: YAML, one record per motor index.

def save_calibrations(cals: dict[int, CalibrationRecord], path: str | Path) -> None:
    doc = {
        "schema_version": 1,
        "motors": {int(m): asdict(rec) for m, rec in sorted(cals.items())},
    }
    with open(path, "w") as f:
        yaml.safe_dump(doc, f, sort_keys=True)


def load_calibrations(path: str | Path) -> dict[int, CalibrationRecord]:
    with open(path) as f:
        doc = yaml.safe_load(f)
    if doc.get("schema_version") != 1:
        raise ConfigurationError(
            f"unsupported calibration schema_version {doc.get('schema_version')!r}"
        )
    return {int(m): CalibrationRecord(**rec) for m, rec in doc["motors"].items()}
