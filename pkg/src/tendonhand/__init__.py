"""Hardware-free control stack for a 20-DOF tendon-driven humanoid hand."""

from .hand_model import (
    ALL_JOINTS,
    HAND_JOINTS,
    CouplingMode,
    Finger,
    HandModel,
    JointId,
    JointKind,
    JointLimits,
    JointState,
    RigidTransform,
    apply_coupling,
    build_default_model,
    clamp_to_limits,
    forward_kinematics,
    joint,
    link_vectors,
    load_model,
    wrist_transform,
)
from .motor_map import (
    CalibrationRecord,
    MotorVector,
    joint_to_motor,
    load_calibrations,
    motor_to_joint,
    quantize_ticks,
    save_calibrations,
    state_to_motor_vector,
)
from .retargeting import (
    HumanHandPose,
    RetargetConfig,
    RetargetResult,
    extract_human_vectors,
    smooth_step,
    solve_retarget,
)
from .plant_sim import Plant, PlantConfig, ThermalParams, ideal_plant_config, run_sweep

__version__ = "0.1.0"
