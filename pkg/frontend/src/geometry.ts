// Minimal 3-D helpers plus the hand's digit geometry, mirrored from the
// service's kinematic description so synthetic slider poses retarget back
// to the intended joint angles.

export type Vec3 = [number, number, number];
export type Mat3 = [Vec3, Vec3, Vec3]; // row-major

const DEG = Math.PI / 180;

export function rotX(deg: number): Mat3 {
  const c = Math.cos(deg * DEG), s = Math.sin(deg * DEG);
  return [[1, 0, 0], [0, c, -s], [0, s, c]];
}

export function rotY(deg: number): Mat3 {
  const c = Math.cos(deg * DEG), s = Math.sin(deg * DEG);
  return [[c, 0, s], [0, 1, 0], [-s, 0, c]];
}

export function rotZ(deg: number): Mat3 {
  const c = Math.cos(deg * DEG), s = Math.sin(deg * DEG);
  return [[c, -s, 0], [s, c, 0], [0, 0, 1]];
}

export function matMul(a: Mat3, b: Mat3): Mat3 {
  const out: number[][] = [[0, 0, 0], [0, 0, 0], [0, 0, 0]];
  for (let i = 0; i < 3; i++)
    for (let j = 0; j < 3; j++)
      for (let k = 0; k < 3; k++) out[i][j] += a[i][k] * b[k][j];
  return out as Mat3;
}

export function matVec(m: Mat3, v: Vec3): Vec3 {
  return [
    m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
    m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
    m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
  ];
}

export function add(a: Vec3, b: Vec3): Vec3 {
  return [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
}

export function sub(a: Vec3, b: Vec3): Vec3 {
  return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}

export function norm(v: Vec3): number {
  return Math.hypot(v[0], v[1], v[2]);
}

// yaw-pitch-roll applied z-y-x, matching the service
export function yprMatrix(yaw: number, pitch: number, roll: number): Mat3 {
  return matMul(matMul(rotZ(yaw), rotY(pitch)), rotX(roll));
}

export type DigitName = "thumb" | "index" | "middle" | "ring" | "pinky";

export interface DigitGeometry {
  base: Vec3; // mm, forearm frame
  baseYpr: [number, number, number];
  links: [number, number, number]; // mm, proximal to distal
  abductionSign: 0 | 1 | -1;
  flexLimits: [number, number, number]; // per-joint max flexion, degrees
  abductionMax: number; // degrees (0 if no abduction DOF)
}

// keypoint order: wrist, then thumb/index/middle/ring/pinky
export const DIGIT_ORDER: DigitName[] = [
  "thumb",
  "index",
  "middle",
  "ring",
  "pinky",
];

export const DIGITS: Record<DigitName, DigitGeometry> = {
  thumb: {
    base: [25, 40, -8],
    baseYpr: [70, 0, -75],
    links: [50, 35, 28],
    abductionSign: 0,
    flexLimits: [170, 90, 120], // CMC, MCP, IP
    abductionMax: 0,
  },
  index: {
    base: [90, 25, 0],
    baseYpr: [0, 0, 0],
    links: [45, 25, 22],
    abductionSign: 1,
    flexLimits: [140, 120, 120], // MCP, PIP, DIP
    abductionMax: 20,
  },
  middle: {
    base: [95, 8, 0],
    baseYpr: [0, 0, 0],
    links: [50, 30, 23],
    abductionSign: 0,
    flexLimits: [140, 120, 120],
    abductionMax: 0,
  },
  ring: {
    base: [90, -10, 0],
    baseYpr: [0, 0, 0],
    links: [45, 28, 22],
    abductionSign: -1,
    flexLimits: [140, 120, 120],
    abductionMax: 23,
  },
  pinky: {
    base: [80, -28, 0],
    baseYpr: [0, 0, 0],
    links: [35, 22, 20],
    abductionSign: -1,
    flexLimits: [140, 120, 120],
    abductionMax: 45,
  },
};
