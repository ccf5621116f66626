"""Kinematic model of the tendon-driven hand.

20 joints (15 finger, 3 thumb, 2 wrist) actuated by 16 motors: the DIP and
PIP of each non-thumb finger share one curl motor. The wrist has two DOFs
whose rotation axes intersect at a single pivot point.

Frames: x distal, y radial (thumb side), z dorsal. Units mm / degrees.
Flexion positive, radial deviation positive, abduction positive = splay
away from the middle finger.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path

import numpy as np
import yaml


class Finger(Enum):
    THUMB = "thumb"
    INDEX = "index"
    MIDDLE = "middle"
    RING = "ring"
    PINKY = "pinky"
    WRIST = "wrist"


class JointKind(Enum):
    DIP = "dip"
    PIP = "pip"
    MCP = "mcp"
    ABDUCTION = "abduction"
    CMC = "cmc"
    IP = "ip"
    WRIST_FE = "wrist_fe"
    WRIST_RUD = "wrist_rud"


def _enumerate_joints():
    joints = []
    for f in (Finger.INDEX, Finger.MIDDLE, Finger.RING, Finger.PINKY):
        if f is not Finger.MIDDLE:
            joints.append((f, JointKind.ABDUCTION))
        joints.append((f, JointKind.MCP))
        joints.append((f, JointKind.PIP))
        joints.append((f, JointKind.DIP))
    joints += [
        (Finger.THUMB, JointKind.CMC),
        (Finger.THUMB, JointKind.MCP),
        (Finger.THUMB, JointKind.IP),
        (Finger.WRIST, JointKind.WRIST_FE),
        (Finger.WRIST, JointKind.WRIST_RUD),
    ]
    return joints


_VALID_PAIRS = frozenset(_enumerate_joints())


@dataclass(frozen=True)
class JointId:
    finger: Finger
    kind: JointKind

    def __post_init__(self):
        if (self.finger, self.kind) not in _VALID_PAIRS:
            raise ValueError(f"invalid joint: {self.finger.value}/{self.kind.value}")

    def __repr__(self):
        return f"{self.finger.value}_{self.kind.value}"


# Canonical joint order: fingers index->pinky (abd, mcp, pip, dip), thumb, wrist.
ALL_JOINTS: tuple[JointId, ...] = tuple(JointId(f, k) for f, k in _enumerate_joints())
HAND_JOINTS: tuple[JointId, ...] = tuple(
    j for j in ALL_JOINTS if j.finger is not Finger.WRIST
)
WRIST_FE = JointId(Finger.WRIST, JointKind.WRIST_FE)
WRIST_RUD = JointId(Finger.WRIST, JointKind.WRIST_RUD)

assert len(ALL_JOINTS) == 20 and len(HAND_JOINTS) == 18

DIGITS = (Finger.THUMB, Finger.INDEX, Finger.MIDDLE, Finger.RING, Finger.PINKY)
NON_THUMB = (Finger.INDEX, Finger.MIDDLE, Finger.RING, Finger.PINKY)


def joint(finger: Finger | str, kind: JointKind | str) -> JointId:
    """Look up a joint id by finger/kind, accepting enum values or names."""
    f = finger if isinstance(finger, Finger) else Finger(finger)
    k = kind if isinstance(kind, JointKind) else JointKind(kind)
    for j in ALL_JOINTS:
        if j.finger is f and j.kind is k:
            return j
    raise ValueError(f"invalid joint: {f.value}/{k.value}")


class ModelValidationError(ValueError):
    pass


@dataclass(frozen=True)
class JointLimits:
    theta_min: float
    theta_max: float

    def __post_init__(self):
        if not (self.theta_min < self.theta_max):
            raise ModelValidationError(
                f"theta_min must be < theta_max, got [{self.theta_min}, {self.theta_max}]"
            )

    def clamp(self, theta: float) -> float:
        return min(max(theta, self.theta_min), self.theta_max)

    def contains(self, theta: float, tol: float = 1e-9) -> bool:
        return self.theta_min - tol <= theta <= self.theta_max + tol


@dataclass(frozen=True)
class RigidTransform:
    """Proper rigid transform p -> rotation @ p + translation."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        R = np.asarray(self.rotation, dtype=float)
        t = np.asarray(self.translation, dtype=float)
        if R.shape != (3, 3) or t.shape != (3,):
            raise ModelValidationError("rotation must be 3x3, translation length 3")
        if np.max(np.abs(R.T @ R - np.eye(3))) > 1e-9:
            raise ModelValidationError("rotation is not orthonormal within 1e-9")
        if abs(np.linalg.det(R) - 1.0) > 1e-9:
            raise ModelValidationError("rotation determinant is not +1 within 1e-9")
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", t)

    @classmethod
    def identity(cls) -> "RigidTransform":
        return cls(np.eye(3), np.zeros(3))

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Apply to a (3,) point or (N, 3) point array."""
        p = np.asarray(points, dtype=float)
        return p @ self.rotation.T + self.translation


@dataclass(frozen=True)
class DigitChain:
    base: np.ndarray            # knuckle / CMC base point, palm frame (mm)
    base_rot: np.ndarray        # base orientation, 3x3
    links: tuple[float, float, float]   # proximal..distal lengths (mm)
    abduction_sign: int         # +1 / -1 yaw direction, 0 = no abduction DOF

    def __post_init__(self):
        if any(length <= 0 for length in self.links):
            raise ModelValidationError(f"link lengths must be > 0, got {self.links}")


@dataclass(frozen=True)
class HandModel:
    digits: dict[Finger, DigitChain]
    limits: dict[JointId, JointLimits]
    actuation_map: dict[JointId, int]
    wrist_pivot: np.ndarray
    coupling: tuple[tuple[JointId, JointId], ...] = ()  # (PIP, DIP) pairs

    def __post_init__(self):
        motors = set(self.actuation_map.values())
        if motors != set(range(16)):
            raise ModelValidationError(
                f"actuation map must cover motors 0..15, got {sorted(motors)}"
            )
        missing = set(ALL_JOINTS) - set(self.limits)
        if missing:
            raise ModelValidationError(f"missing limits for {sorted(map(repr, missing))}")

    def motor_of(self, j: JointId) -> int:
        return self.actuation_map[j]

    def is_limit_valid(self, state: "JointState", tol: float = 1e-9) -> bool:
        return all(self.limits[j].contains(state[j], tol) for j in ALL_JOINTS)


@dataclass
class JointState:
    """Angles for all 20 joints, degrees."""

    angles: dict[JointId, float] = field(default_factory=dict)

    def __post_init__(self):
        full = {j: 0.0 for j in ALL_JOINTS}
        for j, v in self.angles.items():
            if j not in full:
                raise ValueError(f"unknown joint {j!r}")
            full[j] = float(v)
        if not all(math.isfinite(v) for v in full.values()):
            raise ValueError("joint angles must be finite")
        self.angles = full

    @classmethod
    def zeros(cls) -> "JointState":
        return cls({})

    @classmethod
    def from_vector(cls, vec, order: tuple[JointId, ...] = ALL_JOINTS) -> "JointState":
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (len(order),):
            raise ValueError(f"expected vector of length {len(order)}")
        return cls(dict(zip(order, vec)))

    def as_vector(self, order: tuple[JointId, ...] = ALL_JOINTS) -> np.ndarray:
        return np.array([self.angles[j] for j in order])

    def replace(self, updates: dict[JointId, float]) -> "JointState":
        merged = dict(self.angles)
        merged.update(updates)
        return JointState(merged)

    def __getitem__(self, j: JointId) -> float:
        return self.angles[j]


class CouplingMode(Enum):
    RIGID = "rigid"
    FREE = "free"


# ---------------------------------------------------------------------------
# rotation helpers

def rot_x(deg: float) -> np.ndarray:
    c, s = math.cos(math.radians(deg)), math.sin(math.radians(deg))
    return np.array([[1, 0, 0], [0, c, -s], [0, s, c]], dtype=float)


def rot_y(deg: float) -> np.ndarray:
    c, s = math.cos(math.radians(deg)), math.sin(math.radians(deg))
    return np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]], dtype=float)


def rot_z(deg: float) -> np.ndarray:
    c, s = math.cos(math.radians(deg)), math.sin(math.radians(deg))
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]], dtype=float)


def _ypr_matrix(yaw: float, pitch: float, roll: float) -> np.ndarray:
    return rot_z(yaw) @ rot_y(pitch) @ rot_x(roll)


# ---------------------------------------------------------------------------
# model construction

_KIND_TO_LIMIT_KEY = {
    (False, JointKind.DIP): "finger_dip",
    (False, JointKind.PIP): "finger_pip",
    (False, JointKind.MCP): "finger_mcp",
    (True, JointKind.IP): "thumb_ip",
    (True, JointKind.MCP): "thumb_mcp",
    (True, JointKind.CMC): "thumb_cmc",
}


def load_model(path: str | Path) -> HandModel:
    """Load a HandModel from a kinematic description file (YAML, schema v1)."""
    with open(path) as f:
        cfg = yaml.safe_load(f)
    return model_from_config(cfg)


def model_from_config(cfg: dict) -> HandModel:
    if cfg.get("schema_version") != 1:
        raise ModelValidationError(
            f"unsupported schema_version {cfg.get('schema_version')!r}"
        )
    digits = {}
    for f in DIGITS:
        d = cfg["digits"][f.value]
        digits[f] = DigitChain(
            base=np.asarray(d["base"], dtype=float),
            base_rot=_ypr_matrix(*d["base_ypr"]),
            links=tuple(float(x) for x in d["links"]),
            abduction_sign=int(d["abduction_sign"]),
        )

    lim = cfg["limits"]
    limits: dict[JointId, JointLimits] = {}
    for j in ALL_JOINTS:
        if j.kind is JointKind.ABDUCTION:
            key = f"abduction_{j.finger.value}"
        elif j.finger is Finger.WRIST:
            key = j.kind.value
        else:
            key = _KIND_TO_LIMIT_KEY[(j.finger is Finger.THUMB, j.kind)]
        limits[j] = JointLimits(*map(float, lim[key]))

    amap_cfg = cfg["actuation_map"]
    actuation_map: dict[JointId, int] = {}
    for j in ALL_JOINTS:
        if j.finger in NON_THUMB and j.kind in (JointKind.PIP, JointKind.DIP):
            key = f"{j.finger.value}_curl"
        elif j.finger is Finger.WRIST:
            key = j.kind.value
        else:
            key = f"{j.finger.value}_{j.kind.value}"
        actuation_map[j] = int(amap_cfg[key])

    coupling = tuple(
        (joint(f, JointKind.PIP), joint(f, JointKind.DIP)) for f in NON_THUMB
    )
    return HandModel(
        digits=digits,
        limits=limits,
        actuation_map=actuation_map,
        wrist_pivot=np.asarray(cfg["wrist_pivot"], dtype=float),
        coupling=coupling,
    )


def build_default_model() -> HandModel:
    """Model with the shipped anthropometric configuration."""
    text = resources.files("tendonhand.data").joinpath("hand_config.yaml").read_text()
    return model_from_config(yaml.safe_load(text))


# ---------------------------------------------------------------------------
# operations

def clamp_to_limits(model: HandModel, state: JointState) -> JointState:
    return JointState({j: model.limits[j].clamp(state[j]) for j in ALL_JOINTS})


def wrist_transform(alpha_fe: float, beta_rud: float, pivot) -> RigidTransform:
    """Wrist rotation about two orthogonal axes through `pivot`.

    Flexion/extension (about the radial y axis) is applied first, then
    radial/ulnar deviation (about the dorsal z axis). The pivot is a fixed
    point of the returned transform.
    """
    if not (math.isfinite(alpha_fe) and math.isfinite(beta_rud)):
        raise ValueError("wrist angles must be finite")
    pivot = np.asarray(pivot, dtype=float)
    R = rot_y(alpha_fe) @ rot_z(beta_rud)
    return RigidTransform(R, pivot - R @ pivot)


def apply_coupling(
    model: HandModel, state: JointState, mode: CouplingMode
) -> JointState:
    """Rigid mode forces DIP := PIP per coupled pair (clamped to DIP limits)."""
    if mode is CouplingMode.FREE:
        return state
    updates = {
        dip: model.limits[dip].clamp(state[pip]) for pip, dip in model.coupling
    }
    return state.replace(updates)


# MediaPipe-style keypoint layout: wrist, then 4 points per digit.
KEYPOINT_DIGIT_ORDER = DIGITS
KEYPOINT_NAMES = ["wrist"] + [
    f"{f.value}_{part}"
    for f in KEYPOINT_DIGIT_ORDER
    for part in ("base", "joint1", "joint2", "tip")
]


def _digit_joint_angles(state: JointState, f: Finger) -> tuple[float, float, float, float]:
    """(abduction_yaw, flex1, flex2, flex3) for one digit."""
    if f is Finger.THUMB:
        return (
            0.0,
            state[joint(f, JointKind.CMC)],
            state[joint(f, JointKind.MCP)],
            state[joint(f, JointKind.IP)],
        )
    abd = state[joint(f, JointKind.ABDUCTION)] if f is not Finger.MIDDLE else 0.0
    return (
        abd,
        state[joint(f, JointKind.MCP)],
        state[joint(f, JointKind.PIP)],
        state[joint(f, JointKind.DIP)],
    )


def forward_kinematics(model: HandModel, state: JointState) -> np.ndarray:
    """21 keypoints (mm) in the forearm frame: wrist + {base, joint1, joint2,
    tip} per digit. Wrist DOFs rotate the whole palm subtree about the pivot.
    """
    T = wrist_transform(state[WRIST_FE], state[WRIST_RUD], model.wrist_pivot)
    pts = [np.zeros(3)]
    for f in KEYPOINT_DIGIT_ORDER:
        chain = model.digits[f]
        abd, th1, th2, th3 = _digit_joint_angles(state, f)
        R = chain.base_rot @ rot_z(chain.abduction_sign * abd)
        p = chain.base.copy()
        pts.append(p)
        for theta, length in zip((th1, th2, th3), chain.links):
            R = R @ rot_y(theta)
            p = p + R @ np.array([length, 0.0, 0.0])
            pts.append(p)
    return T.apply(np.asarray(pts))


def link_vectors(model: HandModel, state: JointState) -> np.ndarray:
    """15 unit phalanx vectors (3 per digit, proximal to distal)."""
    return link_vectors_from_keypoints(forward_kinematics(model, state))


def link_vectors_from_keypoints(keypoints: np.ndarray) -> np.ndarray:
    kp = np.asarray(keypoints, dtype=float)
    if kp.shape != (21, 3):
        raise ValueError(f"expected 21 keypoints, got shape {kp.shape}")
    vecs = []
    for d in range(5):
        seg = kp[1 + 4 * d : 5 + 4 * d]
        diffs = np.diff(seg, axis=0)
        norms = np.linalg.norm(diffs, axis=1, keepdims=True)
        if np.any(norms == 0):
            raise ValueError("zero-length link in keypoints")
        vecs.append(diffs / norms)
    return np.vstack(vecs)
