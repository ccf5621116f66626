// Message schema spoken by the teleop service (JSON, one object per
// WebSocket frame). Field-for-field mirror of the Python side; the console
// never invents state of its own.

export const SCHEMA_VERSION = 1;

export interface Envelope {
  type: string;
  seq: number;
  timestamp: number; // simulated seconds
  schema_version: number;
}

export interface StateMessage extends Envelope {
  type: "state";
  joints: number[]; // 20 joint angles, degrees, fixed order
  joint_order: string[];
  motors: number[]; // 16 motor positions, ticks
  temps: { fingers: number; thumb: number; wrist: number };
  residual: number;
  recording: boolean;
  c: Record<string, number>; // per-motor scaling factor
}

export interface ErrorMessage extends Envelope {
  type: "error";
  message: string;
}

export interface PoseMessage {
  type: "pose";
  keypoints: number[][]; // 21 x [x, y, z] in meters
  timestamp?: number;
}

export interface WristMessage {
  type: "wrist_cmd";
  alpha: number; // flexion/extension, degrees
  beta: number; // radial/ulnar deviation, degrees
}

export interface ConfigUpdateMessage {
  type: "config_update";
  smoothing_lambda?: number;
  c?: Record<string, number>;
}

export interface RecordMessage {
  type: "record_start" | "record_stop";
}

export type OutboundMessage =
  | PoseMessage
  | WristMessage
  | ConfigUpdateMessage
  | RecordMessage;

export function isStateMessage(msg: unknown): msg is StateMessage {
  const m = msg as StateMessage;
  return (
    typeof m === "object" &&
    m !== null &&
    m.type === "state" &&
    Array.isArray(m.joints) &&
    m.joints.length === 20 &&
    Array.isArray(m.motors) &&
    m.motors.length === 16 &&
    typeof m.temps === "object" &&
    typeof m.seq === "number"
  );
}
