// End-to-end: spawn the real teleop service and drive it over WebSocket
// exactly as the browser console would. Skipped automatically when the
// Python service is not available on this machine.

import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { spawn, spawnSync, ChildProcess } from "node:child_process";
import WebSocket from "ws";

import { StateMessage, isStateMessage } from "../src/messages.js";
import { slidersToPose, zeroSliders } from "../src/sliders.js";

const PORT = 8971;
const URL = `ws://127.0.0.1:${PORT}/ws`;

const havePython =
  spawnSync("python3", ["-c", "import tendonhand"], { timeout: 20000 })
    .status === 0;

const d = describe.runIf(havePython);

let server: ChildProcess | null = null;

async function waitForHealth(): Promise<void> {
  for (let i = 0; i < 100; i++) {
    try {
      const r = await fetch(`http://127.0.0.1:${PORT}/healthz`);
      if (r.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 100));
  }
  throw new Error("teleop service did not come up");
}

function connect(): Promise<WebSocket> {
  return new Promise((resolve, reject) => {
    const ws = new WebSocket(URL);
    ws.once("open", () => resolve(ws));
    ws.once("error", reject);
  });
}

// run until a state satisfying pred arrives (or n states pass)
function awaitState(
  ws: WebSocket,
  pred: (s: StateMessage) => boolean,
  maxStates = 400,
): Promise<StateMessage> {
  return new Promise((resolve, reject) => {
    let seen = 0;
    let last: StateMessage | null = null;
    const onMessage = (data: WebSocket.RawData) => {
      const msg = JSON.parse(data.toString());
      if (!isStateMessage(msg)) return;
      last = msg;
      seen += 1;
      if (pred(msg)) {
        ws.off("message", onMessage);
        resolve(msg);
      } else if (seen >= maxStates) {
        ws.off("message", onMessage);
        reject(
          new Error(
            `state condition not met after ${maxStates} states; ` +
              `last joints ${JSON.stringify(last?.joints.map((j) => +j.toFixed(2)))}`,
          ),
        );
      }
    };
    ws.on("message", onMessage);
  });
}

const settled = (n: number) => {
  let count = 0;
  return () => ++count >= n;
};

beforeAll(async () => {
  server = spawn(
    "python3",
    ["-m", "tendonhand.cli", "serve", "--port", String(PORT), "--rate", "200"],
    { stdio: "ignore" },
  );
  await waitForHealth();
}, 30000);

afterAll(() => {
  server?.kill();
});

d("console against the live service", () => {
  it(
    "zero sliders broadcast a near-zero hand (< 1 deg per joint)",
    async () => {
      const ws = await connect();
      const msg = slidersToPose(zeroSliders());
      ws.send(JSON.stringify(msg));
      ws.send(JSON.stringify(msg)); // second send after smoothing settles
      const state = await awaitState(ws, (s) => {
        const hand = s.joints.slice(0, 18);
        return Math.max(...hand.map(Math.abs)) < 1.0;
      });
      expect(Math.max(...state.joints.slice(0, 18).map(Math.abs))).toBeLessThan(1);
      ws.close();
    },
    30000,
  );

  it(
    "index curl slider is monotone in the broadcast PIP angle (10-point grid)",
    async () => {
      const ws = await connect();
      // broadcast order: index abd, mcp, pip, dip, ...
      const PIP = 2;
      const angles: number[] = [];
      for (let i = 0; i < 10; i++) {
        const s = zeroSliders();
        s.curl.index = i / 9;
        const msg = JSON.stringify(slidersToPose(s));
        // resend while waiting so the smoothing filter converges
        for (let k = 0; k < 8; k++) {
          ws.send(msg);
          const drain = settled(6);
          await awaitState(ws, () => drain());
        }
        const state = await awaitState(ws, () => true);
        angles.push(state.joints[PIP]);
      }
      for (let i = 1; i < angles.length; i++) {
        expect(angles[i]).toBeGreaterThanOrEqual(angles[i - 1] - 0.25);
      }
      expect(angles[9]).toBeGreaterThan(angles[0] + 60);
      ws.close();
    },
    60000,
  );

  it(
    "config update round-trips the scaling factor through State",
    async () => {
      const ws = await connect();
      ws.send(JSON.stringify({ type: "config_update", c: { "1": 1.1 } }));
      const state = await awaitState(ws, (s) => s.c["1"] === 1.1);
      expect(state.c["1"]).toBe(1.1);
      ws.send(JSON.stringify({ type: "config_update", c: { "1": 1.0 } }));
      await awaitState(ws, (s) => s.c["1"] === 1.0);
      ws.close();
    },
    30000,
  );

  it(
    "recording flag follows record_start / record_stop acknowledgements",
    async () => {
      const ws = await connect();
      ws.send(JSON.stringify({ type: "record_start" }));
      await awaitState(ws, (s) => s.recording);
      ws.send(JSON.stringify({ type: "record_stop" }));
      await awaitState(ws, (s) => !s.recording);
      ws.close();
    },
    30000,
  );
});
