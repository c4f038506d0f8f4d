/** Immediate-mode 2-D drawing: top-down map plus a link-quality strip chart.
 *
 * The scene is tens of primitives, so everything is redrawn each frame from
 * the view model; nothing here mutates it.
 */

import { SERIES_WINDOW_S, ViewModel } from "./model.js";

const MODE_COLORS: Record<string, string> = {
  head: "#3f8efc",
  base: "#8d99ae",
  idle: "#c8c8c8",
  taking_off: "#f4a259",
  relaying: "#34a853",
  retreating: "#e03131",
};

const STRIP_FLOOR = -60; // quality axis lower bound

interface Transform {
  scale: number;
  ox: number;
  oy: number;
}

function mapTransform(
  walls: number[][][],
  width: number,
  height: number,
): Transform {
  let minX = Infinity,
    maxX = -Infinity,
    minY = Infinity,
    maxY = -Infinity;
  for (const [[x1, y1], [x2, y2]] of walls) {
    minX = Math.min(minX, x1, x2);
    maxX = Math.max(maxX, x1, x2);
    minY = Math.min(minY, y1, y2);
    maxY = Math.max(maxY, y1, y2);
  }
  const pad = 24;
  const scale = Math.min(
    (width - 2 * pad) / Math.max(maxX - minX, 1e-6),
    (height - 2 * pad) / Math.max(maxY - minY, 1e-6),
  );
  return {
    scale,
    ox: pad - minX * scale,
    oy: height - pad + minY * scale,
  };
}

const sx = (t: Transform, x: number) => t.ox + x * t.scale;
const sy = (t: Transform, y: number) => t.oy - y * t.scale;

function linkColor(filtered: number | null, sMin: number): string {
  if (filtered === null) return "#999";
  if (filtered <= sMin) return "#e03131";
  if (filtered <= sMin + 5) return "#f4a259";
  return "#34a853";
}

export function drawMap(
  ctx: CanvasRenderingContext2D,
  vm: ViewModel,
  nowMs: number,
): void {
  const { width, height } = ctx.canvas;
  ctx.clearRect(0, 0, width, height);
  if (!vm.hello) return;
  const t = mapTransform(vm.hello.walls, width, height);

  ctx.strokeStyle = "#bbb";
  ctx.setLineDash([4, 4]);
  ctx.lineWidth = 1;
  ctx.beginPath();
  vm.hello.centerline.forEach(([x, y], i) => {
    if (i === 0) ctx.moveTo(sx(t, x), sy(t, y));
    else ctx.lineTo(sx(t, x), sy(t, y));
  });
  ctx.stroke();
  ctx.setLineDash([]);

  ctx.strokeStyle = "#222";
  ctx.lineWidth = 2;
  for (const [[x1, y1], [x2, y2]] of vm.hello.walls) {
    ctx.beginPath();
    ctx.moveTo(sx(t, x1), sy(t, y1));
    ctx.lineTo(sx(t, x2), sy(t, y2));
    ctx.stroke();
  }

  const agents = vm.interpolatedAgents(nowMs);
  const byId = new Map(agents.map((a) => [a.id, a]));
  const snap = vm.snapshot;
  if (snap) {
    ctx.lineWidth = 2;
    for (const link of snap.links) {
      const a = byId.get(link.src);
      const b = byId.get(link.dst);
      if (!a || !b) continue;
      ctx.strokeStyle = linkColor(link.filtered, vm.hello.s_min);
      ctx.setLineDash(
        link.filtered !== null && link.filtered <= vm.hello.s_min
          ? [3, 3]
          : [],
      );
      ctx.beginPath();
      ctx.moveTo(sx(t, a.x), sy(t, a.y));
      ctx.lineTo(sx(t, b.x), sy(t, b.y));
      ctx.stroke();
    }
    ctx.setLineDash([]);
  }

  for (const a of agents) {
    const px = sx(t, a.x);
    const py = sy(t, a.y);
    ctx.fillStyle = MODE_COLORS[a.mode] ?? "#555";
    ctx.beginPath();
    ctx.arc(px, py, 6, 0, 2 * Math.PI);
    ctx.fill();
    // heading tick; a retreating relay's arrow points back toward the base
    const dir = a.mode === "retreating" ? a.heading + Math.PI : a.heading;
    ctx.strokeStyle = "#111";
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(px, py);
    ctx.lineTo(px + 11 * Math.cos(dir), py - 11 * Math.sin(dir));
    ctx.stroke();
    ctx.fillStyle = "#111";
    ctx.font = "10px sans-serif";
    ctx.fillText(String(a.id), px + 8, py - 8);
  }
}

export function drawStripChart(
  ctx: CanvasRenderingContext2D,
  vm: ViewModel,
): void {
  const { width, height } = ctx.canvas;
  ctx.clearRect(0, 0, width, height);
  if (!vm.hello || !vm.snapshot) return;
  const tNow = vm.snapshot.time_s;
  const t0 = Math.max(0, tNow - SERIES_WINDOW_S);
  const xOf = (t: number) =>
    ((t - t0) / Math.max(tNow - t0, 1e-6)) * (width - 40) + 35;
  const yOf = (q: number) =>
    height - 16 - ((q - STRIP_FLOOR) / -STRIP_FLOOR) * (height - 28);

  ctx.strokeStyle = "#e03131";
  ctx.setLineDash([5, 3]);
  ctx.beginPath();
  ctx.moveTo(35, yOf(vm.hello.s_min));
  ctx.lineTo(width - 5, yOf(vm.hello.s_min));
  ctx.stroke();
  ctx.setLineDash([]);
  ctx.fillStyle = "#e03131";
  ctx.font = "10px sans-serif";
  ctx.fillText("s_min", 2, yOf(vm.hello.s_min) + 3);

  ctx.strokeStyle = "#aaa";
  for (const tm of vm.launchMarkers) {
    if (tm < t0) continue;
    ctx.beginPath();
    ctx.moveTo(xOf(tm), 4);
    ctx.lineTo(xOf(tm), height - 14);
    ctx.stroke();
  }

  const palette = ["#3f8efc", "#34a853", "#f4a259", "#9b5de5", "#00a6a6"];
  let i = 0;
  for (const [key, pts] of vm.series) {
    const color = palette[i++ % palette.length];
    ctx.fillStyle = color;
    for (const p of pts) {
      if (p.raw !== null) ctx.fillRect(xOf(p.t), yOf(p.raw), 1.5, 1.5);
    }
    ctx.strokeStyle = color;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    let started = false;
    for (const p of pts) {
      if (p.filtered === null) continue;
      if (!started) {
        ctx.moveTo(xOf(p.t), yOf(p.filtered));
        started = true;
      } else ctx.lineTo(xOf(p.t), yOf(p.filtered));
    }
    ctx.stroke();
    ctx.fillText(key, width - 30, 12 + 11 * (i - 1));
  }
}
