"""Forward kinematics and human-pose retargeting walkthrough.

Builds the default hand model, renders keypoints for a couple of poses,
then closes the loop: synthesize keypoints from a known joint state and
recover that state with the retargeting solver.
"""

import numpy as np

from tendonhand.hand_model import (
    ALL_JOINTS,
    HAND_JOINTS,
    Finger,
    JointKind,
    JointState,
    build_default_model,
    forward_kinematics,
    joint,
)
from tendonhand.retargeting import HumanHandPose, solve_retarget

model = build_default_model()

# flat hand: every joint at its zero pose
flat = JointState.zeros()
kp = forward_kinematics(model, flat)
print("flat-hand fingertips (mm):")
for name, idx in [("thumb", 4), ("index", 8), ("middle", 12),
                  ("ring", 16), ("pinky", 20)]:
    print(f"  {name:7s} {np.round(kp[idx], 1)}")

# a power-grasp-like pose: curl every finger most of the way
grasp = JointState({
    j: 0.75 * model.limits[j].theta_max
    for j in ALL_JOINTS
    if j.kind in (JointKind.MCP, JointKind.PIP, JointKind.DIP, JointKind.IP)
    and j.finger is not Finger.THUMB or j == joint(Finger.THUMB, JointKind.IP)
})
kp_grasp = forward_kinematics(model, grasp)
print("\ncurled index fingertip moves from",
      np.round(kp[8], 1), "to", np.round(kp_grasp[8], 1))

# round trip: pretend the grasp keypoints came from a human hand tracker
# (meters, arbitrary global scale; the solver is scale invariant)
pose = HumanHandPose(keypoints=kp_grasp * 1e-3)
result = solve_retarget(pose, model)
err = np.abs(result.theta.as_vector(HAND_JOINTS) - grasp.as_vector(HAND_JOINTS))
print(f"\nretargeting: {result.iters} iterations, residual {result.residual:.2e}")
print(f"max joint recovery error: {err.max():.4f} deg")
