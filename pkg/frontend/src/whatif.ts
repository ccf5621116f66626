// Scaling-factor what-if overlay: predicted motor command under the
// linear joint-to-motor map for the current pose, old c versus proposed
// c, clamp included. Explicitly client-side speculation; the committed
// value always comes back in the next State broadcast.

export interface MotorRecord {
  pMin: number;
  pMax: number;
  thetaMin: number;
  thetaMax: number;
}

export function jointToMotor(
  theta: number,
  rec: MotorRecord,
  c: number,
): number {
  if (c <= 0) throw new Error("scaling factor c must be > 0");
  const frac =
    ((theta - rec.thetaMin) / (rec.thetaMax - rec.thetaMin)) * c;
  const p = rec.pMin + frac * (rec.pMax - rec.pMin);
  const lo = Math.min(rec.pMin, rec.pMax);
  const hi = Math.max(rec.pMin, rec.pMax);
  return Math.min(hi, Math.max(lo, p));
}

export interface WhatIfPoint {
  theta: number;
  before: number;
  after: number;
}

export function whatIfScaling(
  rec: MotorRecord,
  cOld: number,
  cNew: number,
  nPoints = 50,
): WhatIfPoint[] {
  if (cNew <= 0) throw new Error("scaling factor c must be > 0");
  const out: WhatIfPoint[] = [];
  for (let i = 0; i < nPoints; i++) {
    const theta =
      rec.thetaMin + ((rec.thetaMax - rec.thetaMin) * i) / (nPoints - 1);
    out.push({
      theta,
      before: jointToMotor(theta, rec, cOld),
      after: jointToMotor(theta, rec, cNew),
    });
  }
  return out;
}
