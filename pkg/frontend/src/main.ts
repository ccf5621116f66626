// Browser entry point: wires the WebSocket to the session, sliders to
// outbound pose messages, and the render loop to SVG elements.

import { ConsoleSession } from "./session.js";
import { OutboundMessage } from "./messages.js";
import {
  pushTemps,
  skeletonPaths,
  sparklinePath,
  stateToKeypoints,
  SparklineSeries,
} from "./render.js";
import { SliderValues, slidersToPose, zeroSliders } from "./sliders.js";
import { MotorRecord, whatIfScaling } from "./whatif.js";

const WS_URL =
  new URLSearchParams(location.search).get("ws") ?? "ws://127.0.0.1:8765/ws";

const session = new ConsoleSession();
const sliders: SliderValues = zeroSliders();
let temps: SparklineSeries = { fingers: [], thumb: [], wrist: [] };

const ws = new WebSocket(WS_URL);
ws.onmessage = (ev) => {
  let parsed: unknown;
  try {
    parsed = JSON.parse(ev.data);
  } catch {
    return;
  }
  if (session.onMessage(parsed, performance.now()) && session.latestState) {
    temps = pushTemps(temps, session.latestState);
  }
};

function send(msg: OutboundMessage) {
  if (ws.readyState === WebSocket.OPEN) ws.send(JSON.stringify(msg));
}

function el<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T;
}

function bindSlider(id: string, apply: (v: number) => void) {
  const input = el<HTMLInputElement>(id);
  input.addEventListener("input", () => {
    apply(Number(input.value));
    send(slidersToPose(sliders));
  });
}

for (const digit of ["thumb", "index", "middle", "ring", "pinky"] as const) {
  bindSlider(`curl-${digit}`, (v) => (sliders.curl[digit] = v));
}
for (const digit of ["index", "ring", "pinky"] as const) {
  bindSlider(`spread-${digit}`, (v) => (sliders.spread[digit] = v));
}
for (const [id, key] of [
  ["wrist-alpha", "wristAlpha"],
  ["wrist-beta", "wristBeta"],
] as const) {
  const input = el<HTMLInputElement>(id);
  input.addEventListener("input", () => {
    sliders[key] = Number(input.value);
    send({ type: "wrist_cmd", alpha: sliders.wristAlpha, beta: sliders.wristBeta });
  });
}

el<HTMLButtonElement>("record-toggle").addEventListener("click", () => {
  send({ type: session.recording ? "record_stop" : "record_start" });
});

el<HTMLButtonElement>("apply-c").addEventListener("click", () => {
  const motor = el<HTMLInputElement>("whatif-motor").value;
  const c = Number(el<HTMLInputElement>("whatif-c").value);
  if (!(c > 0)) {
    el("whatif-error").textContent = "c must be > 0";
    return;
  }
  el("whatif-error").textContent = "";
  send({ type: "config_update", c: { [motor]: c } });
});

el<HTMLInputElement>("whatif-c").addEventListener("input", () => {
  const state = session.latestState;
  const c = Number(el<HTMLInputElement>("whatif-c").value);
  if (!state || !(c > 0)) return;
  const motor = el<HTMLInputElement>("whatif-motor").value;
  const cOld = state.c[motor] ?? 1.0;
  // demo record for the overlay; calibrated ranges arrive with State in a
  // fuller build, the default plant uses [1000, 3000] over the joint range
  const rec: MotorRecord = { pMin: 1000, pMax: 3000, thetaMin: 0, thetaMax: 120 };
  const pts = whatIfScaling(rec, cOld, c, 60);
  const w = 220, h = 80;
  const toPath = (get: (p: { before: number; after: number }) => number) =>
    "M " +
    pts
      .map((p, i) => {
        const x = (i / (pts.length - 1)) * w;
        const y = h - ((get(p) - 1000) / 2000) * h;
        return `${x.toFixed(1)} ${y.toFixed(1)}`;
      })
      .join(" L ");
  el("whatif-before").setAttribute("d", toPath((p) => p.before));
  el("whatif-after").setAttribute("d", toPath((p) => p.after));
});

// keypoint-file replay: NDJSON records {timestamp, keypoints}
el<HTMLInputElement>("keypoint-file").addEventListener("change", async (ev) => {
  const file = (ev.target as HTMLInputElement).files?.[0];
  if (!file) return;
  session.inputMode = "keypoint_file";
  const lines = (await file.text()).split("\n").filter((l) => l.trim());
  for (const line of lines) {
    const rec = JSON.parse(line);
    send({ type: "pose", keypoints: rec.keypoints, timestamp: rec.timestamp });
    await new Promise((r) => setTimeout(r, 20));
  }
  session.inputMode = "sliders";
});

function render() {
  const state = session.latestState;
  el("stale-banner").style.display = session.isStale(performance.now())
    ? "block"
    : "none";
  if (state) {
    const paths = skeletonPaths(stateToKeypoints(state));
    paths.forEach((d, i) => el(`digit-path-${i}`).setAttribute("d", d));
    el("residual").textContent = state.residual.toExponential(2);
    el("record-toggle").textContent = state.recording ? "stop" : "record";
    el("temp-fingers").setAttribute("d", sparklinePath(temps.fingers, 220, 40));
    el("temp-thumb").setAttribute("d", sparklinePath(temps.thumb, 220, 40));
    el("temp-wrist").setAttribute("d", sparklinePath(temps.wrist, 220, 40));
    const bars = el("motor-bars");
    bars.textContent = state.motors
      .map((m, i) => `m${i.toString().padStart(2, "0")} ${m.toFixed(0)}`)
      .join("  ");
  }
  if (session.lastError) {
    el("error-banner").textContent = session.lastError.message;
  }
  requestAnimationFrame(render);
}
requestAnimationFrame(render);
