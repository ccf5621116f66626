"""Human-to-robot hand retargeting.

Maps 21 human hand keypoints to limit-valid robot joint angles by
minimizing the misalignment between the robot's unit phalanx vectors and
the corresponding human finger direction vectors:

    J(theta) = sum_i w_i * || u_i - v_i(theta) ||^2

subject to box constraints from the joint limits. Because both vector
sets are unit-normalized, the cost is invariant to uniform scaling and
rigid translation of the input keypoints. Solved with a projected damped
Gauss-Newton iteration over the 18 hand joints (the wrist is commanded
directly by the teleop layer, not retargeted).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .hand_model import (
    HAND_JOINTS,
    KEYPOINT_DIGIT_ORDER,
    Finger,
    HandModel,
    JointKind,
    JointState,
    joint,
    rot_y,
    rot_z,
)
from .hand_model import forward_kinematics, link_vectors  # noqa: F401 (re-export)

NUM_LINKS = 15
MIN_LINK_LENGTH_M = 1e-3  # 1 mm


class DegeneratePoseError(ValueError):
    pass


@dataclass(frozen=True)
class HumanHandPose:
    keypoints: np.ndarray   # 21 x 3, meters, robot base frame
    timestamp: float = 0.0

    def __post_init__(self):
        kp = np.asarray(self.keypoints, dtype=float)
        if kp.shape != (21, 3):
            raise ValueError(f"expected 21 keypoints, got shape {kp.shape}")
        if not np.all(np.isfinite(kp)):
            raise ValueError("keypoints must be finite")
        object.__setattr__(self, "keypoints", kp)


@dataclass(frozen=True)
class RetargetConfig:
    weights: np.ndarray = field(default_factory=lambda: np.ones(NUM_LINKS))
    max_iters: int = 60
    tol: float = 1e-10          # stop when the cost decrease falls below this
    damping: float = 1e-3       # initial Levenberg parameter
    smoothing_lambda: float = 1.0
    fd_step: float = 1e-4       # degrees, central-difference Jacobian step

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (NUM_LINKS,) or np.any(w < 0):
            raise ValueError(f"weights must be {NUM_LINKS} nonnegative values")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be > 0")
        if not 0.0 <= self.smoothing_lambda <= 1.0:
            raise ValueError("smoothing_lambda must be in [0, 1]")
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class RetargetResult:
    theta: JointState
    residual: float
    iters: int
    converged: bool


def extract_human_vectors(pose: HumanHandPose) -> np.ndarray:
    """15 unit phalanx direction vectors from a human pose."""
    kp = pose.keypoints
    vecs = np.empty((NUM_LINKS, 3))
    i = 0
    for d in range(5):
        seg = kp[1 + 4 * d : 5 + 4 * d]
        for a, b in zip(seg[:-1], seg[1:]):
            diff = b - a
            n = np.linalg.norm(diff)
            if n < MIN_LINK_LENGTH_M:
                raise DegeneratePoseError(
                    f"link {i} is {n * 1e3:.3f} mm long; pose is degenerate"
                )
            vecs[i] = diff / n
            i += 1
    return vecs


def _bounds(model: HandModel) -> tuple[np.ndarray, np.ndarray]:
    lo = np.array([model.limits[j].theta_min for j in HAND_JOINTS])
    hi = np.array([model.limits[j].theta_max for j in HAND_JOINTS])
    return lo, hi


# per-digit slices of the HAND_JOINTS vector: (abduction index or -1, three
# flexion indices), in keypoint digit order
def _digit_indices() -> list[tuple[int, tuple[int, int, int]]]:
    idx = {j: i for i, j in enumerate(HAND_JOINTS)}
    out = []
    for f in KEYPOINT_DIGIT_ORDER:
        if f is Finger.THUMB:
            flex = (JointKind.CMC, JointKind.MCP, JointKind.IP)
            abd = -1
        else:
            flex = (JointKind.MCP, JointKind.PIP, JointKind.DIP)
            abd = idx[joint(f, JointKind.ABDUCTION)] if f is not Finger.MIDDLE else -1
        out.append((abd, tuple(idx[joint(f, k)] for k in flex)))
    return out


_DIGIT_IDX = _digit_indices()


def _hand_link_vectors(model: HandModel, x: np.ndarray) -> np.ndarray:
    """Unit phalanx vectors for a HAND_JOINTS angle vector (wrist at zero).

    Same chain composition as forward_kinematics, skipping keypoint
    assembly: each link direction is the local x axis of the cumulative
    rotation.
    """
    vecs = np.empty((NUM_LINKS, 3))
    row = 0
    for (abd_i, flex_i), f in zip(_DIGIT_IDX, KEYPOINT_DIGIT_ORDER):
        chain = model.digits[f]
        R = chain.base_rot
        if abd_i >= 0:
            R = R @ rot_z(chain.abduction_sign * x[abd_i])
        for k in flex_i:
            R = R @ rot_y(x[k])
            vecs[row] = R[:, 0]
            row += 1
    return vecs


def _cost_and_residual(
    model: HandModel, x: np.ndarray, target: np.ndarray, sqrt_w: np.ndarray
) -> tuple[float, np.ndarray]:
    v = _hand_link_vectors(model, x)
    r = (sqrt_w[:, None] * (target - v)).ravel()
    return float(r @ r), r


def solve_retarget(
    pose: HumanHandPose,
    model: HandModel,
    warm_start: JointState | None = None,
    cfg: RetargetConfig | None = None,
) -> RetargetResult:
    """Projected damped Gauss-Newton fit of joint angles to a human pose."""
    cfg = cfg or RetargetConfig()
    target = extract_human_vectors(pose)
    sqrt_w = np.sqrt(cfg.weights)
    lo, hi = _bounds(model)

    if warm_start is None:
        warm_start = JointState.zeros()
    x = np.clip(warm_start.as_vector(HAND_JOINTS), lo, hi)
    cost, r = _cost_and_residual(model, x, target, sqrt_w)
    best_x, best_cost = x.copy(), cost

    lam = cfg.damping
    n = len(x)
    converged = False
    iters = 0
    for iters in range(1, cfg.max_iters + 1):
        # central-difference Jacobian of the residual vector
        J = np.empty((r.size, n))
        for k in range(n):
            h = cfg.fd_step
            xp, xm = x.copy(), x.copy()
            xp[k] += h
            xm[k] -= h
            _, rp = _cost_and_residual(model, xp, target, sqrt_w)
            _, rm = _cost_and_residual(model, xm, target, sqrt_w)
            J[:, k] = (rp - rm) / (2 * h)

        g = J.T @ r
        H = J.T @ J
        accepted = False
        for _ in range(12):
            try:
                step = np.linalg.solve(H + lam * np.eye(n), -g)
            except np.linalg.LinAlgError:
                lam *= 10
                continue
            x_new = np.clip(x + step, lo, hi)
            cost_new, r_new = _cost_and_residual(model, x_new, target, sqrt_w)
            if cost_new < cost:
                accepted = True
                lam = max(lam * 0.3, 1e-9)
                break
            lam *= 10
        if not accepted:
            converged = True  # no descent direction left; at a local minimum
            break
        decrease = cost - cost_new
        x, cost, r = x_new, cost_new, r_new
        if cost < best_cost:
            best_x, best_cost = x.copy(), cost
        if decrease < cfg.tol:
            converged = True
            break

    theta = JointState.from_vector(best_x, HAND_JOINTS)
    return RetargetResult(
        theta=theta, residual=best_cost, iters=iters, converged=converged
    )


def smooth_step(
    theta_new: JointState, theta_prev: JointState, lam: float
) -> JointState:
    """Elementwise convex blend lam*new + (1-lam)*prev; limit-valid by
    convexity of the box."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lambda must be in [0, 1]")
    v = lam * theta_new.as_vector() + (1.0 - lam) * theta_prev.as_vector()
    return JointState.from_vector(v)


# ---------------------------------------------------------------------------
# offline keypoint stream format: newline-delimited JSON records with a
# timestamp and 21 [x, y, z] triples in meters.

def load_keypoint_stream(path) -> list[HumanHandPose]:
    import json

    poses = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            poses.append(
                HumanHandPose(
                    keypoints=np.asarray(rec["keypoints"], dtype=float),
                    timestamp=float(rec.get("timestamp", 0.0)),
                )
            )
    return poses


def save_keypoint_stream(poses, path) -> None:
    import json

    with open(path, "w") as f:
        for p in poses:
            f.write(
                json.dumps(
                    {"timestamp": p.timestamp, "keypoints": p.keypoints.tolist()}
                )
                + "\n"
            )
