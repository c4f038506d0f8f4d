/** Keyboard piloting of the head UAV.
 *
 * Hold-to-move: key-down emits forward/backward, key-up emits stop. Holding
 * both directions at once resolves to stop. The emitter is rate limited to
 * one command per 100 ms; a change arriving inside the quiet window is held
 * as pending and flushed on the next poll. Commands are only ever produced
 * in response to key events — never synthesized — and never while
 * disconnected.
 */

export type PilotAction = "forward" | "backward" | "stop";
export type PilotKey = "forward" | "backward";

export const MIN_COMMAND_INTERVAL_MS = 100;

export class KeyboardPilot {
  private held = new Set<PilotKey>();
  private connected = false;
  private lastSent: PilotAction | null = null;
  private lastSentAt = -Infinity;
  private pending = false;

  setConnected(connected: boolean): void {
    this.connected = connected;
    if (!connected) {
      // keys released while offline must not replay a stale state later
      this.held.clear();
      this.lastSent = null;
      this.pending = false;
    }
  }

  keyDown(key: PilotKey, nowMs: number): PilotAction | null {
    if (!this.held.has(key)) {
      this.held.add(key);
      this.pending = true;
    }
    return this.poll(nowMs);
  }

  keyUp(key: PilotKey, nowMs: number): PilotAction | null {
    if (this.held.delete(key)) {
      this.pending = true;
    }
    return this.poll(nowMs);
  }

  /** Flush a pending change if the rate limiter allows it. */
  poll(nowMs: number): PilotAction | null {
    if (!this.connected || !this.pending) return null;
    const want = this.desired();
    if (want === this.lastSent) {
      this.pending = false;
      return null;
    }
    if (nowMs - this.lastSentAt < MIN_COMMAND_INTERVAL_MS) return null;
    this.lastSent = want;
    this.lastSentAt = nowMs;
    this.pending = false;
    return want;
  }

  private desired(): PilotAction {
    const fwd = this.held.has("forward");
    const back = this.held.has("backward");
    if (fwd && !back) return "forward";
    if (back && !fwd) return "backward";
    return "stop"; // nothing held, or a conflict
  }
}
