/** View model: everything the renderer reads.
 *
 * Socket callbacks mutate this; rendering only reads it. Snapshot history is
 * bounded (the last two frames for pose interpolation, a rolling 60 s window
 * per link for the strip chart), so a long session never grows memory.
 */

import type {
  AgentSnap,
  HelloMessage,
  SnapshotMessage,
} from "./protocol.js";

export const SERIES_WINDOW_S = 60;

export type ConnectionStatus = "connecting" | "connected" | "disconnected";

export interface SeriesPoint {
  t: number;
  raw: number | null;
  filtered: number | null;
}

export interface InterpolatedAgent extends AgentSnap {}

interface TimedSnapshot {
  snap: SnapshotMessage;
  arrivedMs: number;
}

function lerpAngle(a: number, b: number, f: number): number {
  let d = b - a;
  while (d > Math.PI) d -= 2 * Math.PI;
  while (d < -Math.PI) d += 2 * Math.PI;
  return a + d * f;
}

export class ViewModel {
  status: ConnectionStatus = "connecting";
  hello: HelloMessage | null = null;
  series = new Map<string, SeriesPoint[]>();
  launchMarkers: number[] = []; // sim times (s) when a relay went airborne
  lastError = "";

  private prev: TimedSnapshot | null = null;
  private latest: TimedSnapshot | null = null;
  private seenAirborne = new Set<number>();

  setStatus(status: ConnectionStatus): void {
    this.status = status;
  }

  applyHello(msg: HelloMessage): void {
    // a reconnect starts a fresh session: redraw from the next snapshot
    this.hello = msg;
    this.prev = this.latest = null;
    this.series.clear();
    this.launchMarkers = [];
    this.seenAirborne.clear();
  }

  applySnapshot(msg: SnapshotMessage, nowMs: number): void {
    this.prev = this.latest;
    this.latest = { snap: msg, arrivedMs: nowMs };
    for (const link of msg.links) {
      const key = `${link.src}-${link.dst}`;
      let pts = this.series.get(key);
      if (!pts) {
        pts = [];
        this.series.set(key, pts);
      }
      pts.push({ t: msg.time_s, raw: link.raw, filtered: link.filtered });
      const cutoff = msg.time_s - SERIES_WINDOW_S;
      while (pts.length > 0 && pts[0].t < cutoff) pts.shift();
    }
    for (const agent of msg.agents) {
      const airborne = agent.mode !== "idle" && agent.mode !== "base";
      if (airborne && !this.seenAirborne.has(agent.id)) {
        this.seenAirborne.add(agent.id);
        if (this.prev !== null) {
          // skip agents that were already flying at connect time
          this.launchMarkers.push(msg.time_s);
        }
      }
    }
  }

  get snapshot(): SnapshotMessage | null {
    return this.latest?.snap ?? null;
  }

  /** Agent poses interpolated between the two most recent snapshots. */
  interpolatedAgents(nowMs: number): InterpolatedAgent[] {
    if (this.latest === null) return [];
    if (this.prev === null) return this.latest.snap.agents;
    const span = this.latest.arrivedMs - this.prev.arrivedMs;
    const f =
      span <= 0
        ? 1
        : Math.min(1, Math.max(0, (nowMs - this.latest.arrivedMs) / span));
    const before = new Map(this.prev.snap.agents.map((a) => [a.id, a]));
    return this.latest.snap.agents.map((a) => {
      const b = before.get(a.id);
      if (!b) return a;
      return {
        ...a,
        x: b.x + (a.x - b.x) * f,
        y: b.y + (a.y - b.y) * f,
        heading: lerpAngle(b.heading, a.heading, f),
        abscissa: b.abscissa + (a.abscissa - b.abscissa) * f,
      };
    });
  }
}
