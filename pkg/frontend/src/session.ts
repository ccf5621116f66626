// Console session state: last State broadcast, staleness tracking, and
// recording acknowledgement. Transport-agnostic; the WebSocket wiring in
// main.ts feeds messages in and polls staleness on its render timer.

import { ErrorMessage, StateMessage, isStateMessage } from "./messages.js";

export const STALE_AFTER_MS = 1000;

export type InputMode = "sliders" | "keypoint_file";

export class ConsoleSession {
  latestState: StateMessage | null = null;
  lastError: ErrorMessage | null = null;
  inputMode: InputMode = "sliders";
  private lastMessageAt: number | null = null;
  private droppedMessages = 0;

  // returns true if the message updated the rendered state
  onMessage(raw: unknown, nowMs: number): boolean {
    this.lastMessageAt = nowMs;
    const msg = raw as { type?: string };
    if (isStateMessage(raw)) {
      // never step backwards: out-of-order frames are dropped
      if (this.latestState !== null && raw.seq <= this.latestState.seq) {
        this.droppedMessages += 1;
        return false;
      }
      this.latestState = raw;
      return true;
    }
    if (msg && msg.type === "error") {
      this.lastError = raw as ErrorMessage;
      return false;
    }
    // malformed or unknown: keep the last good frame
    this.droppedMessages += 1;
    return false;
  }

  // recording indicator mirrors the service, never a local toggle
  get recording(): boolean {
    return this.latestState?.recording ?? false;
  }

  isStale(nowMs: number): boolean {
    if (this.lastMessageAt === null) return true;
    return nowMs - this.lastMessageAt > STALE_AFTER_MS;
  }

  get dropped(): number {
    return this.droppedMessages;
  }
}
