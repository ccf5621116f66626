import { describe, expect, it } from "vitest";

import { Vec3, norm, sub } from "../src/geometry.js";
import {
  clampSliders,
  slidersToKeypoints,
  slidersToPose,
  zeroSliders,
} from "../src/sliders.js";

function linkVectors(keypoints: number[][]): Vec3[][] {
  const digits: Vec3[][] = [];
  for (let d = 0; d < 5; d++) {
    const seg = keypoints.slice(1 + 4 * d, 5 + 4 * d) as Vec3[];
    const vecs: Vec3[] = [];
    for (let i = 0; i < 3; i++) {
      const v = sub(seg[i + 1], seg[i]);
      const n = norm(v);
      vecs.push([v[0] / n, v[1] / n, v[2] / n]);
    }
    digits.push(vecs);
  }
  return digits;
}

function interiorAngle(a: Vec3, b: Vec3): number {
  const dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  return (Math.acos(Math.min(1, Math.max(-1, dot))) * 180) / Math.PI;
}

describe("slidersToKeypoints", () => {
  it("zero sliders give a flat hand: collinear links per digit", () => {
    const kp = slidersToKeypoints(zeroSliders());
    expect(kp).toHaveLength(21);
    for (const digit of linkVectors(kp)) {
      expect(interiorAngle(digit[0], digit[1])).toBeLessThan(1e-9);
      expect(interiorAngle(digit[1], digit[2])).toBeLessThan(1e-9);
    }
  });

  it("full index curl bends PIP and DIP toward their limits", () => {
    const s = zeroSliders();
    s.curl.index = 1.0;
    const digits = linkVectors(slidersToKeypoints(s));
    const index = digits[1];
    expect(interiorAngle(index[0], index[1])).toBeCloseTo(120, 5); // PIP
    expect(interiorAngle(index[1], index[2])).toBeCloseTo(120, 5); // DIP
  });

  it("curl is monotone in the slider on a 10-point grid, every finger", () => {
    for (let d = 0; d < 5; d++) {
      const name = (["thumb", "index", "middle", "ring", "pinky"] as const)[d];
      let prev = -1;
      for (let i = 0; i < 10; i++) {
        const s = zeroSliders();
        s.curl[name] = i / 9;
        const vecs = linkVectors(slidersToKeypoints(s))[d];
        const pip = interiorAngle(vecs[0], vecs[1]);
        expect(pip).toBeGreaterThanOrEqual(prev);
        prev = pip;
      }
    }
  });

  it("full spread rotates digit bases by the abduction limits", () => {
    const s = zeroSliders();
    s.spread.index = 1.0;
    s.spread.ring = 1.0;
    s.spread.pinky = 1.0;
    const digits = linkVectors(slidersToKeypoints(s));
    const yaw = (v: Vec3) => (Math.atan2(v[1], v[0]) * 180) / Math.PI;
    expect(yaw(digits[1][0])).toBeCloseTo(20, 5); // index splays radial
    expect(yaw(digits[3][0])).toBeCloseTo(-23, 5); // ring splays ulnar
    expect(yaw(digits[4][0])).toBeCloseTo(-45, 5);
  });

  it("out-of-range sliders are clamped, not propagated", () => {
    const s = zeroSliders();
    s.curl.index = 3.0;
    s.spread.pinky = -0.5;
    s.wristAlpha = 200;
    const c = clampSliders(s);
    expect(c.curl.index).toBe(1);
    expect(c.spread.pinky).toBe(0);
    expect(c.wristAlpha).toBe(45);
  });

  it("pose message wraps the keypoints", () => {
    const msg = slidersToPose(zeroSliders());
    expect(msg.type).toBe("pose");
    expect(msg.keypoints).toHaveLength(21);
    expect(msg.keypoints[0]).toEqual([0, 0, 0]);
  });
});
