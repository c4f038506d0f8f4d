"""Live telemetry bridge for interactive mode.

Streams world snapshots to operator consoles over a websocket and accepts
head-pilot commands. Wire format: JSON text frames with a "type" discriminator
("hello", "snapshot", "command", "error") and a "v": 1 version field. The
hello frame carries the environment digest (walls, centerline, s_min) once per
connection; snapshots follow at up to 10 Hz, only when the simulation tick has
advanced. Commands funnel through a latest-wins slot drained once per decision
tick. When the last client disconnects the head is stopped within one tick
(dead-man rule).
"""

from __future__ import annotations

import asyncio
import json
import time

from .config import DECISION_DT, ScenarioConfig
from .engine import World

PROTOCOL_VERSION = 1
SNAPSHOT_PERIOD = 0.1   # 10 Hz
COMMANDS = ("forward", "backward", "stop", "launch_override")
MESSAGE_TYPES = ("hello", "snapshot", "command", "error")


class ProtocolError(ValueError):
    pass


def encode(msg: dict) -> str:
    """Serialize a message, stamping the protocol version."""
    if msg.get("type") not in MESSAGE_TYPES:
        raise ProtocolError(f"unknown message type {msg.get('type')!r}")
    out = dict(msg)
    out["v"] = PROTOCOL_VERSION
    return json.dumps(out, separators=(",", ":"))


def decode(data: str | bytes) -> dict:
    """Parse a wire frame. Unknown fields are kept (and ignored by callers);
    unknown types or a version mismatch are protocol errors."""
    try:
        msg = json.loads(data)
    except (ValueError, UnicodeDecodeError) as e:
        raise ProtocolError(f"bad frame: {e}") from e
    if not isinstance(msg, dict):
        raise ProtocolError("frame must be a JSON object")
    if msg.get("v") != PROTOCOL_VERSION:
        raise ProtocolError(f"unsupported protocol version {msg.get('v')!r}")
    if msg.get("type") not in MESSAGE_TYPES:
        raise ProtocolError(f"unknown message type {msg.get('type')!r}")
    if msg["type"] == "command" and msg.get("action") not in COMMANDS:
        raise ProtocolError(f"unknown command action {msg.get('action')!r}")
    return msg


def error_frame(reason: str) -> str:
    return encode({"type": "error", "reason": reason})


def hello_message(world: World) -> dict:
    env = world.env
    return {
        "type": "hello",
        "environment": env.name,
        "walls": [[list(map(float, p)) for p in w] for w in env.walls],
        "centerline": [list(map(float, p)) for p in env.centerline],
        "s_min": world.cfg.radio.s_min,
        "decision_dt": DECISION_DT,
    }


def snapshot_message(world: World) -> dict:
    chain = world.chain_agents()
    agents = [
        {
            "id": a.agent_id,
            "mode": a.mode.value,
            "x": float(a.pose.x),
            "y": float(a.pose.y),
            "heading": float(a.pose.heading),
            "abscissa": float(a.abscissa),
        }
        for a in world.agents.values()
    ]
    links = []
    for i in range(len(chain) - 1):
        a, b = chain[i], chain[i + 1]
        links.append({
            "src": a.agent_id,
            "dst": b.agent_id,
            "raw": a.base_ch.raw,
            "filtered": a.base_ch.est.r_hat if a.base_ch.est else None,
        })
    return {
        "type": "snapshot",
        "tick": world.tick,
        "time_s": world.time_s,
        "agents": agents,
        "links": links,
    }


class TelemetryServer:
    """Interactive-mode service: real-time-paced world plus websocket bridge.

    ``realtime=False`` removes wall-clock pacing (used by headless protocol
    tests); the decision loop then free-runs as fast as asyncio schedules it.
    """

    def __init__(self, world: World, port: int = 8008, realtime: bool = True):
        self.world = world
        self.port = port
        self.realtime = realtime
        self.clients: set = set()
        self.pending_command: dict | None = None   # latest wins
        self.command_tick_applied: int | None = None
        self._stop = asyncio.Event()
        self._last_sent_tick = -1

    # ------------------------------------------------------------- client side

    async def _handle_client(self, ws):
        await ws.send(encode(hello_message(self.world)))
        self.clients.add(ws)
        try:
            async for raw in ws:
                try:
                    msg = decode(raw)
                except ProtocolError as e:
                    await ws.send(error_frame(str(e)))
                    continue
                if msg["type"] != "command":
                    await ws.send(error_frame(
                        f"clients may only send commands, not {msg['type']}"))
                    continue
                if msg["action"] == "launch_override":
                    await ws.send(error_frame("manual launch is not enabled"))
                    continue
                self.pending_command = msg
        finally:
            self.clients.discard(ws)
            if not self.clients:
                # dead-man rule: nobody piloting, stop the head
                self.pending_command = {"type": "command", "action": "stop"}

    # --------------------------------------------------------------- sim side

    def _apply_pending(self):
        cmd = self.pending_command
        if cmd is None:
            return
        self.pending_command = None
        speed = self.world.cfg.head.speed
        action = cmd["action"]
        if action == "forward":
            self.world.head_pilot_v = speed
        elif action == "backward":
            self.world.head_pilot_v = -speed
        elif action == "stop":
            self.world.head_pilot_v = 0.0
        self.command_tick_applied = self.world.tick

    async def _sim_loop(self):
        next_deadline = time.monotonic()
        while not self._stop.is_set():
            self._apply_pending()
            self.world.step()
            if self.realtime:
                next_deadline += DECISION_DT
                delay = next_deadline - time.monotonic()
                if delay > 0:
                    await asyncio.sleep(delay)
                else:
                    next_deadline = time.monotonic()
            else:
                await asyncio.sleep(0)

    async def _broadcast_loop(self):
        while not self._stop.is_set():
            if self.clients and self.world.tick != self._last_sent_tick:
                frame = encode(snapshot_message(self.world))
                self._last_sent_tick = self.world.tick
                for ws in list(self.clients):
                    try:
                        await ws.send(frame)
                    except Exception:
                        self.clients.discard(ws)
            # the snapshot rate is part of the wire contract; it holds even
            # when the simulation itself free-runs
            await asyncio.sleep(SNAPSHOT_PERIOD)

    # -------------------------------------------------------------- lifecycle

    def stop(self):
        self._stop.set()

    async def run(self):
        import websockets.asyncio.server

        async with websockets.asyncio.server.serve(
            self._handle_client, "localhost", self.port
        ):
            await asyncio.gather(self._sim_loop(), self._broadcast_loop())


def serve_interactive(cfg: ScenarioConfig, port: int = 8008,
                      realtime: bool = True):
    """Run an interactive session until interrupted."""
    import dataclasses

    if cfg.head.mode != "interactive":
        head = dataclasses.replace(cfg.head, mode="interactive")
        cfg = dataclasses.replace(cfg, head=head)
    world = World(cfg, cfg.seed)
    server = TelemetryServer(world, port=port, realtime=realtime)
    try:
        asyncio.run(server.run())
    except KeyboardInterrupt:
        pass
    return world
