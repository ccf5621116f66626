// 2.5-D orthographic skeleton rendering helpers. Pure data-in, path-out
// functions so the drawing logic is testable without a DOM; main.ts feeds
// the output to an SVG element.

import { StateMessage } from "./messages.js";
import {
  DIGIT_ORDER,
  DIGITS,
  Mat3,
  Vec3,
  add,
  matMul,
  matVec,
  rotY,
  rotZ,
  yprMatrix,
} from "./geometry.js";

export interface Projected {
  x: number;
  y: number;
}

// orthographic top-down view: screen x = distal axis, screen y = -radial
// axis (thumb at the top), slight z shading handled by the caller
export function project(p: Vec3): Projected {
  return { x: p[0], y: -p[1] };
}

// joint order broadcast by the service: per finger abd?, mcp, pip, dip,
// then thumb cmc/mcp/ip, then wrist fe/rud
const FINGER_LAYOUT: {
  name: (typeof DIGIT_ORDER)[number];
  hasAbduction: boolean;
}[] = [
  { name: "index", hasAbduction: true },
  { name: "middle", hasAbduction: false },
  { name: "ring", hasAbduction: true },
  { name: "pinky", hasAbduction: true },
];

// rebuild 21 keypoints (mm) from a State broadcast's joint vector; this is
// the service's pose, not a client-side estimate
export function stateToKeypoints(state: StateMessage): Vec3[] {
  const j = state.joints;
  let i = 0;
  const angles: Record<string, { abd: number; flex: [number, number, number] }> =
    {};
  for (const f of FINGER_LAYOUT) {
    const abd = f.hasAbduction ? j[i++] : 0;
    const mcp = j[i++], pip = j[i++], dip = j[i++];
    angles[f.name] = { abd, flex: [mcp, pip, dip] };
  }
  angles["thumb"] = { abd: 0, flex: [j[i++], j[i++], j[i++]] };
  // wrist fe/rud (j[i], j[i+1]) rotate the whole palm; the top-down console
  // view draws the palm frame, so they show in the telemetry panel instead

  const points: Vec3[] = [[0, 0, 0]];
  for (const name of DIGIT_ORDER) {
    const g = DIGITS[name];
    const a = angles[name];
    let R: Mat3 = yprMatrix(...g.baseYpr);
    if (g.abductionSign !== 0) R = matMul(R, rotZ(g.abductionSign * a.abd));
    let p: Vec3 = [...g.base] as Vec3;
    points.push([...p] as Vec3);
    for (let k = 0; k < 3; k++) {
      R = matMul(R, rotY(a.flex[k]));
      p = add(p, matVec(R, [g.links[k], 0, 0]));
      points.push([...p] as Vec3);
    }
  }
  return points;
}

// one SVG polyline path per digit, plus wrist-to-base spokes
export function skeletonPaths(keypoints: Vec3[]): string[] {
  const paths: string[] = [];
  const wrist = project(keypoints[0]);
  for (let d = 0; d < 5; d++) {
    const pts = keypoints.slice(1 + 4 * d, 5 + 4 * d).map(project);
    const chain = [wrist, ...pts];
    paths.push(
      "M " + chain.map((p) => `${p.x.toFixed(1)} ${p.y.toFixed(1)}`).join(" L "),
    );
  }
  return paths;
}

export interface SparklineSeries {
  fingers: number[];
  thumb: number[];
  wrist: number[];
}

export function pushTemps(
  series: SparklineSeries,
  state: StateMessage,
  maxLen = 300,
): SparklineSeries {
  const out: SparklineSeries = {
    fingers: [...series.fingers, state.temps.fingers].slice(-maxLen),
    thumb: [...series.thumb, state.temps.thumb].slice(-maxLen),
    wrist: [...series.wrist, state.temps.wrist].slice(-maxLen),
  };
  return out;
}

export function sparklinePath(
  values: number[],
  width: number,
  height: number,
  tMin = 20,
  tMax = 60,
): string {
  if (values.length === 0) return "";
  const n = Math.max(values.length - 1, 1);
  return (
    "M " +
    values
      .map((v, i) => {
        const x = (i / n) * width;
        const y = height - ((v - tMin) / (tMax - tMin)) * height;
        return `${x.toFixed(1)} ${y.toFixed(1)}`;
      })
      .join(" L ")
  );
}

// motor bar: fraction of the calibrated range, for a horizontal gauge
export function motorFraction(
  ticks: number,
  pMin: number,
  pMax: number,
): number {
  const lo = Math.min(pMin, pMax);
  const hi = Math.max(pMin, pMax);
  if (hi === lo) return 0;
  return Math.min(1, Math.max(0, (ticks - lo) / (hi - lo)));
}
