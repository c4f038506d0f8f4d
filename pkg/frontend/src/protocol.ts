/** Wire protocol for the telemetry websocket.
 *
 * JSON text frames with a "type" discriminator and a "v" version field.
 * The console only ever sends command frames; everything else is inbound.
 */

export const PROTOCOL_VERSION = 1;

export type CommandAction = "forward" | "backward" | "stop" | "launch_override";

export interface AgentSnap {
  id: number;
  mode: string;
  x: number;
  y: number;
  heading: number;
  abscissa: number;
}

export interface LinkSnap {
  src: number;
  dst: number;
  raw: number | null;
  filtered: number | null;
}

export interface HelloMessage {
  type: "hello";
  environment: string;
  walls: number[][][];
  centerline: number[][];
  s_min: number;
  decision_dt: number;
}

export interface SnapshotMessage {
  type: "snapshot";
  tick: number;
  time_s: number;
  agents: AgentSnap[];
  links: LinkSnap[];
}

export interface ErrorMessage {
  type: "error";
  reason: string;
}

export type ServerMessage = HelloMessage | SnapshotMessage | ErrorMessage;

export class ProtocolError extends Error {}

export function decodeMessage(data: string): ServerMessage {
  let msg: unknown;
  try {
    msg = JSON.parse(data);
  } catch (e) {
    throw new ProtocolError(`bad frame: ${e}`);
  }
  if (typeof msg !== "object" || msg === null || Array.isArray(msg)) {
    throw new ProtocolError("frame must be a JSON object");
  }
  const m = msg as Record<string, unknown>;
  if (m.v !== PROTOCOL_VERSION) {
    throw new ProtocolError(`unsupported protocol version ${m.v}`);
  }
  if (m.type !== "hello" && m.type !== "snapshot" && m.type !== "error") {
    throw new ProtocolError(`unknown message type ${m.type}`);
  }
  return m as unknown as ServerMessage;
}

export function encodeCommand(action: CommandAction): string {
  return JSON.stringify({ type: "command", action, v: PROTOCOL_VERSION });
}
