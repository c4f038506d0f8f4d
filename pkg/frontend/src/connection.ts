/** Websocket lifecycle: connect, decode, auto-reconnect with backoff.
 *
 * The endpoint comes from the page URL query (?host=...&port=...), so the
 * console itself stays stateless across reloads apart from those settings.
 */

import { decodeMessage, ProtocolError, ServerMessage } from "./protocol.js";

export interface Endpoint {
  host: string;
  port: number;
}

export const DEFAULT_ENDPOINT: Endpoint = { host: "localhost", port: 8008 };
const RECONNECT_DELAY_MS = 1000;

export function parseEndpoint(search: string): Endpoint {
  const q = new URLSearchParams(search);
  const port = Number(q.get("port"));
  return {
    host: q.get("host") || DEFAULT_ENDPOINT.host,
    port: Number.isInteger(port) && port > 0 ? port : DEFAULT_ENDPOINT.port,
  };
}

export function endpointUrl(ep: Endpoint): string {
  return `ws://${ep.host}:${ep.port}/ws`;
}

export class Connection {
  onMessage: (msg: ServerMessage) => void = () => {};
  onStatus: (connected: boolean) => void = () => {};
  onProtocolError: (reason: string) => void = () => {};

  private ws: WebSocket | null = null;
  private closed = false;

  constructor(private url: string) {}

  start(): void {
    this.closed = false;
    this.open();
  }

  stop(): void {
    this.closed = true;
    this.ws?.close();
  }

  send(frame: string): boolean {
    if (this.ws?.readyState === WebSocket.OPEN) {
      this.ws.send(frame);
      return true;
    }
    return false;
  }

  private open(): void {
    const ws = new WebSocket(this.url);
    this.ws = ws;
    ws.onopen = () => this.onStatus(true);
    ws.onmessage = (ev) => {
      try {
        this.onMessage(decodeMessage(String(ev.data)));
      } catch (e) {
        if (e instanceof ProtocolError) this.onProtocolError(e.message);
        else throw e;
      }
    };
    ws.onclose = () => {
      this.onStatus(false);
      if (!this.closed) {
        setTimeout(() => this.open(), RECONNECT_DELAY_MS);
      }
    };
  }
}
