"""Deterministic discrete-time world for the relay chain.

One decision tick (0.2 s): packets fly on every active link, each agent
filters its link estimates, runs its state machine and movement policy, and
the kinematics integrate ten 50 Hz substeps. Agents are stepped in a fixed
head-to-base order; all randomness comes from named per-link streams spawned
from the scenario seed, so a (config, seed) pair fully determines every trace.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field

import numpy as np

from . import estimator as kf
from .agent import (
    LINK_TIMEOUT_TICKS,
    AgentMode,
    ReactiveNavigator,
    decide_motion,
    head_uplink_weak,
    transition,
)
from .config import DECISION_DT, KINEMATIC_SUBSTEPS, ScenarioConfig
from .geometry import (
    Environment,
    OutsideTunnelError,
    Pose,
    arc_position,
    raycast_ranges,
    segment_hits_any_wall,
    wrap_angle,
)
from .maps import load_environment
from .metrics import Metrics, convergence_band, convergence_detector, position_variance
from .radio import sample_quality, true_quality, try_transmit

TAKEOFF_TICKS = 5          # 1 s to get airborne
CONVERGED_HOLD_TICKS = 10  # 2 s of equalized links before a launch
DIR_FLIP_TICKS = 3         # consecutive ticks before a travel-direction flip


@dataclass
class SideChannel:
    """One agent's view of one of its links."""

    est: kf.LinkEstimate | None = None
    raw: float | None = None
    missed: int = 0

    def reset(self):
        self.est = None
        self.raw = None
        self.missed = 0


@dataclass
class AgentState:
    agent_id: int
    mode: AgentMode
    pose: Pose
    forward_v: float = 0.0       # commanded, signed toward the head
    lateral_v: float = 0.0
    yaw_rate: float = 0.0
    base_ch: SideChannel = field(default_factory=SideChannel)
    head_ch: SideChannel = field(default_factory=SideChannel)
    takeoff_left: int = 0
    launch_commanded: bool = False
    abscissa: float = 0.0
    nav: ReactiveNavigator | None = None
    nav_dir: int = 1             # sign of travel the navigator state assumes
    dir_run: int = 0             # consecutive ticks disagreeing with nav_dir

    @property
    def position(self) -> np.ndarray:
        return np.array([self.pose.x, self.pose.y])

    @property
    def airborne_moving(self) -> bool:
        return self.mode in (AgentMode.HEAD, AgentMode.RELAYING, AgentMode.RETREATING)


class World:
    """Single simulation run. Drive with step(); inspect agents/traces."""

    def __init__(self, cfg: ScenarioConfig, seed: int,
                 env: Environment | None = None):
        self.cfg = cfg
        self.seed = seed
        self.env = env if env is not None else load_environment(cfg.environment)
        self.tick = 0
        self.head_pilot_v = 0.0          # interactive mode command, m/s
        self._streams: dict[tuple, np.random.Generator] = {}
        self._converged_ticks = 0
        self._inband_ticks = 0

        # traces
        self.rdiff_max_trace: list[float] = []
        self.min_true_quality: list[float] = []
        self.launch_events: list[tuple[int, int]] = []
        self.faults: list[tuple[int, str]] = []
        self.abscissa_traces: dict[int, list[float]] = {}
        self.log_rows: list[tuple] = []
        self._tick_events: dict[int, list[str]] = {}

        self._build_agents()

    # ------------------------------------------------------------------ setup

    def _build_agents(self):
        cfg = self.cfg
        env = self.env
        n_relays = cfg.agents.relays
        head_id, base_id = 0, n_relays + 1
        spawn = env.spawn

        if cfg.head.mode == "fixed":
            s = cfg.head.abscissa
            p = env.point_at_arc(s)
            head_pose = Pose(p[0], p[1], env.tangent_at_arc(s))
        else:
            head_pose = spawn
        head = AgentState(head_id, AgentMode.HEAD, head_pose)

        relays = []
        if cfg.agents.placement == "random" and n_relays > 0:
            if cfg.head.mode != "fixed":
                raise ValueError("random placement needs a fixed head")
            rng = self._stream("placement")
            xs = np.sort(rng.uniform(0.5, cfg.head.abscissa - 0.5, n_relays))[::-1]
            for i, s in enumerate(xs):
                p = env.point_at_arc(float(s))
                pose = Pose(p[0], p[1], env.tangent_at_arc(float(s)))
                relays.append(AgentState(head_id + 1 + i, AgentMode.RELAYING, pose))
        else:
            for i in range(n_relays):
                relays.append(AgentState(head_id + 1 + i, AgentMode.IDLE, spawn))

        base = AgentState(base_id, AgentMode.BASE, spawn)
        self.agents = {a.agent_id: a for a in [head, *relays, base]}
        self.head, self.base = head, base
        active_relays = [r.agent_id for r in relays if r.mode is AgentMode.RELAYING]
        self.chain: list[int] = [head_id, *active_relays, base_id]
        self.idle_queue: list[int] = [r.agent_id for r in relays
                                      if r.mode is AgentMode.IDLE]
        for a in self.agents.values():
            self.abscissa_traces[a.agent_id] = []
            a.abscissa = self._safe_abscissa(a, a.abscissa)

    def _stream(self, *key) -> np.random.Generator:
        if key not in self._streams:
            # crc32, not hash(): string hashing is randomized per process and
            # would break cross-process reproducibility
            ints = [self.seed] + [
                k if isinstance(k, int) else zlib.crc32(k.encode()) for k in key
            ]
            self._streams[key] = np.random.default_rng(ints)
        return self._streams[key]

    def _link_stream(self, a: int, b: int, kind: str) -> np.random.Generator:
        lo, hi = (a, b) if a < b else (b, a)
        return self._stream("link", lo, hi, kind)

    # ------------------------------------------------------------- inspection

    @property
    def time_s(self) -> float:
        return self.tick * DECISION_DT

    def chain_agents(self) -> list[AgentState]:
        return [self.agents[i] for i in self.chain]

    def relay_ids_by_chain_order(self) -> list[int]:
        return [i for i in self.chain[1:-1]]

    def _safe_abscissa(self, a: AgentState, fallback: float) -> float:
        try:
            return arc_position(self.env, a.position)
        except OutsideTunnelError:
            self._fault(f"agent {a.agent_id} left the tunnel")
            return fallback

    def _fault(self, desc: str):
        self.faults.append((self.tick, desc))
        self._tick_events.setdefault(self.tick, []).append(f"fault:{desc}")

    def policy_value(self, ch: SideChannel) -> float | None:
        """The quality value the movement policy consumes for this channel."""
        if self.cfg.variant == "kalman":
            return ch.est.r_hat if ch.est is not None else None
        return ch.raw

    # ------------------------------------------------------------------ step

    def step(self):
        cfg = self.cfg
        chain = self.chain_agents()
        radio = cfg.radio
        v_prev = {a.agent_id: a.forward_v for a in self.agents.values()}

        # -- packet phase: one attempt each way on every active link
        link_true: dict[int, float] = {}      # keyed by head-side agent id
        for i in range(len(chain) - 1):
            a, b = chain[i], chain[i + 1]     # a is head-side (larger abscissa)
            tq = true_quality(self.env, a.position, b.position, radio)
            link_true[a.agent_id] = tq
            u = v_prev[a.agent_id] - v_prev[b.agent_id]   # separation rate
            loss_rng = self._link_stream(a.agent_id, b.agent_id, "loss")
            noise_rng = self._link_stream(a.agent_id, b.agent_id, "noise")
            for receiver, ch in ((a, a.base_ch), (b, b.head_ch)):
                delivered = try_transmit(tq, radio, loss_rng)
                z = None
                if delivered:
                    z = sample_quality(self.env, a.position, b.position, radio,
                                       noise_rng)
                    ch.raw = z
                    ch.missed = 0
                else:
                    ch.missed += 1
                if ch.est is None:
                    if z is not None:
                        ch.est = kf.LinkEstimate(z, cfg.kalman.R, self.tick)
                else:
                    ch.est = kf.step(ch.est, u, z, cfg.kalman, self.tick)
        self.min_true_quality.append(
            min(link_true.values()) if link_true else math.nan
        )

        # -- state machine (relays only; head and base never change mode)
        for a in chain[1:-1]:
            self._relay_transition(a)
        for aid in list(self.idle_queue):
            a = self.agents[aid]
            new_mode = transition(a.mode, None, 0, a.launch_commanded, False,
                                  cfg.policy)
            if new_mode is not a.mode:
                a.mode = new_mode
                a.takeoff_left = TAKEOFF_TICKS
        self._takeoff_progress()

        # -- movement decisions
        rdiffs: list[float] = []
        for a in self.chain_agents():
            if a.mode is AgentMode.HEAD:
                a.forward_v = self._head_velocity(a)
            elif a.mode is AgentMode.RELAYING:
                r_b = self.policy_value(a.base_ch)
                r_f = self.policy_value(a.head_ch)
                if r_b is None or r_f is None:
                    a.forward_v = 0.0
                    rdiffs.append(math.inf)
                else:
                    d = decide_motion(r_b, r_f, cfg.policy)
                    a.forward_v = d.forward_velocity
                    rdiffs.append(abs(d.r_diff))
            elif a.mode is AgentMode.RETREATING:
                a.forward_v = -cfg.policy.v_max
                rdiffs.append(math.inf)
            else:
                a.forward_v = 0.0

        # -- reactive centering (sensor read at tick-start pose)
        for a in self.chain_agents():
            if a.airborne_moving:
                if a.nav is None:
                    a.nav = ReactiveNavigator(cfg.policy)
                # forward_v is signed toward the head along the corridor; which
                # way that is relative to the body depends on whether the
                # heading currently points up- or down-tunnel
                tangent = self.env.tangent_at_arc(a.abscissa)
                aligned = abs(wrap_angle(a.pose.heading - tangent)) <= math.pi / 2
                direction = 1 if (a.forward_v >= 0.0) == aligned else -1
                # debounced: at a corner the tangent is discontinuous and the
                # alignment test can flip every tick
                if direction != a.nav_dir:
                    a.dir_run += 1
                    if a.dir_run >= DIR_FLIP_TICKS:
                        a.nav.flip()
                        a.nav_dir = direction
                        a.dir_run = 0
                else:
                    a.dir_run = 0
                eff = a.pose.heading if direction > 0 else wrap_angle(
                    a.pose.heading + math.pi)
                ranges = raycast_ranges(
                    self.env, Pose(a.pose.x, a.pose.y, eff))
                a.lateral_v, a.yaw_rate = a.nav.command(ranges)
                cap = a.nav.speed_cap
                a.forward_v = max(-cap, min(cap, a.forward_v))
            else:
                if a.nav is not None:
                    a.nav.reset()
                a.lateral_v, a.yaw_rate = 0.0, 0.0

        # -- base launch monitor
        self._launch_monitor(rdiffs)
        self.rdiff_max_trace.append(max(rdiffs) if rdiffs else 0.0)
        self._inband_ticks = (
            self._inband_ticks + 1
            if (self.rdiff_max_trace[-1] <= convergence_band(cfg.policy.T))
            else 0
        )

        # -- kinematics, 50 Hz
        dt = DECISION_DT / KINEMATIC_SUBSTEPS
        for a in self.chain_agents():
            if not a.airborne_moving:
                continue
            start = a.position
            x, y, h = a.pose.x, a.pose.y, a.pose.heading
            for _ in range(KINEMATIC_SUBSTEPS):
                eff = h if a.nav_dir > 0 else h + math.pi
                speed = abs(a.forward_v)
                c, s = math.cos(eff), math.sin(eff)
                x += (c * speed - s * a.lateral_v) * dt
                y += (s * speed + c * a.lateral_v) * dt
                h = wrap_angle(h + a.yaw_rate * dt)
            a.pose = Pose(x, y, h)
            if segment_hits_any_wall(self.env, start, a.position):
                self._fault(f"agent {a.agent_id} crossed a wall")

        # -- bookkeeping
        prev = math.inf
        for a in self.chain_agents():
            a.abscissa = self._safe_abscissa(a, a.abscissa)
            if a.abscissa > prev + 1e-6:
                self._fault(f"chain order violated at agent {a.agent_id}")
            prev = a.abscissa
        for aid, a in self.agents.items():
            self.abscissa_traces[aid].append(
                a.abscissa if aid in self.chain else math.nan
            )
        self._append_log_rows(link_true)
        self.tick += 1

    # ------------------------------------------------------------ step pieces

    def _relay_transition(self, a: AgentState):
        q = self.policy_value(a.base_ch)
        new_mode = transition(a.mode, q, a.base_ch.missed, a.launch_commanded,
                              a.takeoff_left == 0, self.cfg.policy)
        if new_mode is not a.mode:
            self._tick_events.setdefault(self.tick, []).append(
                f"agent{a.agent_id}:{a.mode.value}->{new_mode.value}")
            a.mode = new_mode

    def _takeoff_progress(self):
        for aid in list(self.idle_queue):
            a = self.agents[aid]
            if a.mode is not AgentMode.TAKING_OFF:
                continue
            a.takeoff_left -= 1
            if a.takeoff_left <= 0:
                a.takeoff_left = 0
                a.mode = AgentMode.RELAYING
                self.idle_queue.remove(aid)
                # the base and its former neighbor get a new peer: their old
                # link estimates no longer describe an existing link
                former_neighbor = self.agents[self.chain[-2]]
                former_neighbor.base_ch.reset()
                self.base.head_ch.reset()
                self.chain.insert(len(self.chain) - 1, aid)
                a.base_ch.reset()
                a.head_ch.reset()
                self._tick_events.setdefault(self.tick, []).append(
                    f"agent{aid}:airborne")

    def _head_velocity(self, head: AgentState) -> float:
        cfg = self.cfg
        if cfg.head.mode == "scripted":
            v = cfg.head.speed if self.time_s < cfg.head.duration_s else 0.0
        elif cfg.head.mode == "interactive":
            v = self.head_pilot_v
        else:
            v = 0.0
        if len(self.chain) > 1 and v > 0.0:
            q = self.policy_value(head.base_ch)
            if head_uplink_weak(q, head.base_ch.missed, cfg.policy):
                v = 0.0
        return v

    def _launch_monitor(self, rdiffs: list[float]):
        cfg = self.cfg
        band = convergence_band(cfg.policy.T)
        relay_rdiffs = [r for r in rdiffs if math.isfinite(r)]
        converged_now = (
            len(relay_rdiffs) == sum(1 for a in self.chain_agents()[1:-1]
                                     if a.mode is AgentMode.RELAYING)
            and all(r <= band for r in relay_rdiffs)
        )
        self._converged_ticks = self._converged_ticks + 1 if converged_now else 0
        if not self.idle_queue:
            return
        if any(self.agents[i].mode is AgentMode.TAKING_OFF for i in self.idle_queue):
            return
        values = [
            v for a in self.chain_agents()
            for v in (self.policy_value(a.base_ch), self.policy_value(a.head_ch))
            if v is not None
        ]
        if not values:
            return
        weakest = min(values)
        if (self._converged_ticks >= CONVERGED_HOLD_TICKS
                and weakest < cfg.policy.s_min + cfg.policy.launch_margin):
            aid = self.idle_queue[0]
            self.agents[aid].launch_commanded = True
            self.launch_events.append((self.tick, aid))
            self._tick_events.setdefault(self.tick, []).append(f"launch:agent{aid}")
            self._converged_ticks = 0

    # ---------------------------------------------------------------- logging

    def _y_offset(self, a: AgentState) -> float:
        p = self.env.point_at_arc(a.abscissa)
        t = self.env.tangent_at_arc(a.abscissa)
        dx, dy = a.pose.x - p[0], a.pose.y - p[1]
        return -math.sin(t) * dx + math.cos(t) * dy

    def _append_log_rows(self, link_true: dict[int, float]):
        events = self._tick_events.pop(self.tick, [])
        chain = self.chain_agents()
        for idx, a in enumerate(chain):
            if idx + 1 < len(chain):
                link_id = f"{a.agent_id}-{chain[idx + 1].agent_id}"
                tq = link_true.get(a.agent_id, math.nan)
                raw = a.base_ch.raw if a.base_ch.raw is not None else math.nan
                filt = a.base_ch.est.r_hat if a.base_ch.est is not None else math.nan
            else:
                link_id, tq, raw, filt = "", math.nan, math.nan, math.nan
            self.log_rows.append((
                self.tick, self.time_s, a.agent_id, a.mode.value,
                a.abscissa, self._y_offset(a), link_id, tq, raw, filt,
                a.forward_v, ";".join(events) if idx == 0 else "",
            ))

    # ------------------------------------------------------------------- runs

    def run(self, horizon_s: float | None = None) -> Metrics:
        cfg = self.cfg
        horizon = horizon_s if horizon_s is not None else cfg.horizon_s
        n_ticks = int(round(horizon / DECISION_DT))
        hold = int(round(5.0 / DECISION_DT))
        for _ in range(n_ticks):
            self.step()
            if (cfg.stop_on_convergence and self._inband_ticks >= hold
                    and len(self.chain) > 2):
                break
        return self.metrics()

    def metrics(self) -> Metrics:
        cfg = self.cfg
        if cfg.head.mode == "scripted":
            start = int(round(cfg.head.duration_s / DECISION_DT))
            start = min(start, max(len(self.rdiff_max_trace) - 1, 0))
        else:
            start = 0
        conv = convergence_detector(
            self.rdiff_max_trace, cfg.policy.T, start_index=start)
        traces = {k: np.asarray(v) for k, v in self.abscissa_traces.items()}
        var = position_variance(traces, self.relay_ids_by_chain_order())
        return Metrics(
            convergence_time_s=conv,
            position_variance=var,
            min_true_quality=np.asarray(self.min_true_quality),
            launch_events=list(self.launch_events),
            faults=list(self.faults),
            rdiff_max_trace=np.asarray(self.rdiff_max_trace),
            abscissa_traces=traces,
        )


def run_scenario(cfg: ScenarioConfig, seed: int | None = None,
                 env: Environment | None = None) -> tuple[World, Metrics]:
    """Run one replicate to its horizon and return the world plus metrics."""
    world = World(cfg, cfg.seed if seed is None else seed, env=env)
    m = world.run()
    return world, m


LOG_COLUMNS = (
    "tick", "time_s", "agent_id", "mode", "x_abscissa", "y_offset",
    "link_id", "true_q", "raw_q", "filtered_q", "velocity", "event",
)


def write_log_csv(world: World, path):
    import csv

    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(LOG_COLUMNS)
        for row in world.log_rows:
            out = []
            for v in row:
                if isinstance(v, float):
                    out.append("" if math.isnan(v) else f"{v:.6f}")
                else:
                    out.append(v)
            w.writerow(out)
