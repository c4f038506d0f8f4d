/** Console entry point: wires socket, keyboard, view model and renderer. */

import { Connection, endpointUrl, parseEndpoint } from "./connection.js";
import { ViewModel } from "./model.js";
import { KeyboardPilot, PilotKey } from "./pilot.js";
import { encodeCommand } from "./protocol.js";
import { drawMap, drawStripChart } from "./render.js";

const KEY_MAP: Record<string, PilotKey> = {
  ArrowUp: "forward",
  KeyW: "forward",
  ArrowDown: "backward",
  KeyS: "backward",
};

function element<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
}

const mapCanvas = element<HTMLCanvasElement>("map");
const stripCanvas = element<HTMLCanvasElement>("strip");
const banner = element<HTMLDivElement>("banner");
const statusLine = element<HTMLDivElement>("status");

const vm = new ViewModel();
const pilot = new KeyboardPilot();
const endpoint = parseEndpoint(window.location.search);
const conn = new Connection(endpointUrl(endpoint));

function sendPilot(action: ReturnType<KeyboardPilot["poll"]>): void {
  if (action !== null) conn.send(encodeCommand(action));
}

conn.onStatus = (connected) => {
  vm.setStatus(connected ? "connected" : "disconnected");
  pilot.setConnected(connected);
  banner.hidden = connected;
};
conn.onMessage = (msg) => {
  if (msg.type === "hello") vm.applyHello(msg);
  else if (msg.type === "snapshot") vm.applySnapshot(msg, performance.now());
  else vm.lastError = msg.reason;
};
conn.onProtocolError = (reason) => {
  vm.lastError = reason;
};
conn.start();

window.addEventListener("keydown", (ev) => {
  const key = KEY_MAP[ev.code];
  if (key && !ev.repeat) {
    ev.preventDefault();
    sendPilot(pilot.keyDown(key, performance.now()));
  }
});
window.addEventListener("keyup", (ev) => {
  const key = KEY_MAP[ev.code];
  if (key) {
    ev.preventDefault();
    sendPilot(pilot.keyUp(key, performance.now()));
  }
});
// flush rate-limited changes
setInterval(() => sendPilot(pilot.poll(performance.now())), 25);

let frames = 0;
let fps = 0;
let fpsStamp = performance.now();

function frame(): void {
  const now = performance.now();
  drawMap(mapCanvas.getContext("2d")!, vm, now);
  drawStripChart(stripCanvas.getContext("2d")!, vm);
  frames += 1;
  if (now - fpsStamp >= 1000) {
    fps = frames;
    frames = 0;
    fpsStamp = now;
  }
  const snap = vm.snapshot;
  statusLine.textContent =
    `${vm.status} to ${endpoint.host}:${endpoint.port}` +
    (snap ? ` | t=${snap.time_s.toFixed(1)} s tick=${snap.tick}` : "") +
    ` | ${fps} fps` +
    (vm.lastError ? ` | last error: ${vm.lastError}` : "");
  requestAnimationFrame(frame);
}
requestAnimationFrame(frame);
