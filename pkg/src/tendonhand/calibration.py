"""Automated per-motor limit discovery and encoder offset calibration.

The motor is advanced in small tick increments from a slack position:
p_min is the first position where tendon load exceeds the tension
threshold for a debounced number of probes, p_max the position where the
joint angle stops increasing against the mechanical limit. theta_min is
fixed at 0 and theta_max is the measured angle span, so the resulting
record reflects the hand's actual (not nominal) range of motion.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass

from .hand_model import JointId
from .motor_map import CalibrationRecord
from .plant_sim import Plant


class CalibrationFailure(RuntimeError):
    pass


class UnstablePoseError(ValueError):
    pass


@dataclass(frozen=True)
class CalibrationProcedureConfig:
    step: float = 5.0               # ticks per probe
    tension_threshold: float = 0.5  # load units
    debounce: int = 3               # consecutive probes above threshold
    settle_time: float = 0.05       # seconds per probe
    angle_eps: float = 0.005        # deg; "stopped" if growth below this.
                                    # Must sit below the smallest per-step
                                    # motion (a 20 deg joint over 2000 ticks
                                    # moves 0.05 deg per 5-tick probe).
    stall_probes: int = 3           # consecutive stalled probes = hard stop
    load_ceiling: float = 50.0      # abort above this load
    max_travel: float = 20000.0     # ticks, give up after this

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("step must be > 0")
        if self.debounce < 1:
            raise ValueError("debounce must be >= 1")


def auto_calibrate_motor(
    plant: Plant, motor: int, cfg: CalibrationProcedureConfig | None = None
) -> CalibrationRecord:
    """Discover (p_min, p_max, theta_max) for one motor against a plant."""
    cfg = cfg or CalibrationProcedureConfig()
    true_cal = plant.config.true_cals[motor]
    d = 1.0 if true_cal.p_max > true_cal.p_min else -1.0
    measured = plant.measured_joint_for_motor(motor)

    # phase 0: release until the tendon is fully slack, plus a backoff, so
    # repeated calibrations start from the same condition
    pos = float(plant.state.motor_pos[motor])
    slack_probes = 0
    traveled = 0.0
    while slack_probes < cfg.debounce:
        if plant.read_load(motor) <= 0.0:
            slack_probes += 1
        else:
            slack_probes = 0
        pos -= d * cfg.step
        traveled += cfg.step
        if traveled > cfg.max_travel:
            raise CalibrationFailure(f"motor {motor}: could not release tension")
        plant.move_to(motor, pos, cfg.settle_time)
    pos -= d * 10 * cfg.step
    plant.move_to(motor, pos, cfg.settle_time)
    resting_angle = plant.measure_joint(measured)

    p_min = None
    above = 0
    first_above = None
    traveled = 0.0

    # phase 1: find the tension point
    while traveled <= cfg.max_travel:
        pos += d * cfg.step
        traveled += cfg.step
        plant.move_to(motor, pos, cfg.settle_time)
        load = plant.read_load(motor)
        if load > cfg.load_ceiling:
            raise CalibrationFailure(
                f"motor {motor}: load {load:.1f} exceeded safety ceiling "
                f"{cfg.load_ceiling} at {pos:.0f} ticks"
            )
        if load > cfg.tension_threshold:
            if above == 0:
                first_above = pos
            above += 1
            if above >= cfg.debounce:
                p_min = first_above
                break
        else:
            above = 0
    if p_min is None:
        raise CalibrationFailure(f"motor {motor}: no tension detected within travel")

    # phase 2: advance to the mechanical limit
    prev_angle = plant.measure_joint(measured)
    stalled = 0
    p_max = None
    while traveled <= cfg.max_travel:
        pos += d * cfg.step
        traveled += cfg.step
        plant.move_to(motor, pos, cfg.settle_time)
        load = plant.read_load(motor)
        if load > cfg.load_ceiling:
            raise CalibrationFailure(
                f"motor {motor}: load {load:.1f} exceeded safety ceiling "
                f"{cfg.load_ceiling} at {pos:.0f} ticks"
            )
        angle = plant.measure_joint(measured)
        if abs(angle - prev_angle) < cfg.angle_eps:
            stalled += 1
            if stalled >= cfg.stall_probes:
                p_max = pos - d * cfg.step * cfg.stall_probes
                break
        else:
            stalled = 0
        prev_angle = angle
    if p_max is None:
        raise CalibrationFailure(f"motor {motor}: no mechanical limit found")

    theta_max = plant.measure_joint(measured) - resting_angle
    return CalibrationRecord(
        p_min=p_min, p_max=p_max, theta_min=0.0, theta_max=theta_max, c=1.0
    )


def auto_calibrate_all(
    plant: Plant, cfg: CalibrationProcedureConfig | None = None
) -> dict[int, CalibrationRecord]:
    return {m: auto_calibrate_motor(plant, m, cfg) for m in range(16)}


def encoder_offset_calibrate(
    readings: list[float], joint: JointId, theta_min: float = 0.0,
    max_spread: float = 2.0,
) -> float:
    """Offset that maps the fully-extended resting pose to theta_min."""
    if not readings:
        raise ValueError("need at least one reading")
    if max(readings) - min(readings) > max_spread:
        raise UnstablePoseError(
            f"reading spread {max(readings) - min(readings):.2f} deg > "
            f"{max_spread} deg; hold the pose steady"
        )
    return statistics.fmean(readings) - theta_min
