// Slider panel model and the synthetic keypoint generator: curl sliders
// drive each finger's flexion angles proportionally toward their limits,
// spread sliders drive abduction; u = 0 is the flat extended hand.

import {
  DIGIT_ORDER,
  DIGITS,
  DigitName,
  Mat3,
  Vec3,
  add,
  matMul,
  matVec,
  rotY,
  rotZ,
  yprMatrix,
} from "./geometry.js";
import { PoseMessage } from "./messages.js";

export interface SliderValues {
  curl: Record<DigitName, number>; // [0, 1]
  spread: Record<DigitName, number>; // [0, 1]; ignored for thumb/middle
  wristAlpha: number; // degrees, [-30, 45]
  wristBeta: number; // degrees, [-35, 35]
}

export function zeroSliders(): SliderValues {
  return {
    curl: { thumb: 0, index: 0, middle: 0, ring: 0, pinky: 0 },
    spread: { thumb: 0, index: 0, middle: 0, ring: 0, pinky: 0 },
    wristAlpha: 0,
    wristBeta: 0,
  };
}

const clamp01 = (v: number) => Math.min(1, Math.max(0, v));

export function clampSliders(s: SliderValues): SliderValues {
  const out = zeroSliders();
  for (const d of DIGIT_ORDER) {
    out.curl[d] = clamp01(s.curl[d]);
    out.spread[d] = clamp01(s.spread[d]);
  }
  out.wristAlpha = Math.min(45, Math.max(-30, s.wristAlpha));
  out.wristBeta = Math.min(35, Math.max(-35, s.wristBeta));
  return out;
}

// 21 keypoints in meters: wrist origin, then base/joint1/joint2/tip per
// digit, composed with the same chain math the service uses for its own
// forward kinematics (wrist DOFs are sent separately, not baked in here).
export function slidersToKeypoints(sliders: SliderValues): number[][] {
  const s = clampSliders(sliders);
  const MM = 1e-3;
  const points: number[][] = [[0, 0, 0]];
  for (const name of DIGIT_ORDER) {
    const g = DIGITS[name];
    let R: Mat3 = yprMatrix(...g.baseYpr);
    if (g.abductionSign !== 0) {
      R = matMul(R, rotZ(g.abductionSign * s.spread[name] * g.abductionMax));
    }
    let p: Vec3 = [g.base[0] * MM, g.base[1] * MM, g.base[2] * MM];
    points.push([...p]);
    for (let k = 0; k < 3; k++) {
      R = matMul(R, rotY(s.curl[name] * g.flexLimits[k]));
      p = add(p, matVec(R, [g.links[k] * MM, 0, 0]));
      points.push([...p]);
    }
  }
  return points;
}

export function slidersToPose(sliders: SliderValues): PoseMessage {
  return { type: "pose", keypoints: slidersToKeypoints(sliders) };
}
