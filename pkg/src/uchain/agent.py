"""Per-UAV control: chain equalization policy, launch/retreat state machine and
the corridor centering / wall-following controller.

Conventions: forward velocity is signed along the tunnel axis, positive toward
the exploration front (the head). r_b is the quality of the link to the
base-side neighbor, r_f toward the head side.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .geometry import RangeReadings

# Consecutive decision ticks without a packet from the base-side neighbor
# before the link is declared lost (2 s at 5 Hz).
LINK_TIMEOUT_TICKS = 10


class AgentMode(enum.Enum):
    BASE = "base"
    IDLE = "idle"
    TAKING_OFF = "taking_off"
    RELAYING = "relaying"
    RETREATING = "retreating"
    HEAD = "head"


@dataclass(frozen=True)
class PolicyParams:
    T: float = 0.0                   # quality tolerance band
    v_max: float = 0.5               # m/s
    k_v: float = 0.05                # (m/s) per quality unit
    C_t: float = 1.0                 # centering translational gain, 1/s
    C_r: float = 1.5                 # yaw gain, rad/(m*s)
    D: float = 0.75                  # wall-follow preset distance, m
    invalid_wall_ratio: float = 0.4
    s_min: float = -55.0
    launch_margin: float = 5.0

    def __post_init__(self):
        if self.T < 0.0 or self.v_max <= 0.0 or self.C_t <= 0.0 or self.C_r <= 0.0:
            raise ValueError("bad policy gains")
        if not (0.0 < self.D < 2.0):
            raise ValueError("D must be in (0, 2)")
        if not (0.0 < self.invalid_wall_ratio < 1.0):
            raise ValueError("invalid_wall_ratio must be in (0, 1)")


@dataclass(frozen=True)
class ChainDecision:
    forward_velocity: float   # signed, positive toward the head
    r_diff: float
    acted: bool


def decide_motion(r_b: float, r_f: float, params: PolicyParams) -> ChainDecision:
    """Move toward the neighbor with the weaker link, at a capped speed.

    r_diff = r_b - r_f. Positive beyond the tolerance band means the
    head-side link is the weaker one, so the agent advances toward the head;
    negative means it falls back toward the base.
    """
    r_diff = r_b - r_f
    if abs(r_diff) <= params.T:
        return ChainDecision(0.0, r_diff, False)
    speed = min(params.k_v * abs(r_diff), params.v_max)
    v = speed if r_diff > 0.0 else -speed
    return ChainDecision(v, r_diff, True)


def epsilon_bound(s_d: float, quality: float, alpha_est: float) -> float:
    """Max displacement that changes the improved link by s_d/3.

    Closed-form inversion of the log-distance model: the current distance is
    d = 10^(-s / (10*alpha)) and eps = d * (10^(s_d / (30*alpha)) - 1).
    Used in tests to check that the speed law never overshoots.
    """
    if alpha_est <= 0.0:
        raise ValueError("alpha_est must be positive")
    if s_d < 0.0:
        raise ValueError("s_d must be >= 0")
    d_hat = 10.0 ** (-quality / (10.0 * alpha_est))
    return d_hat * (10.0 ** (s_d / (30.0 * alpha_est)) - 1.0)


def wall_validity(ranges: RangeReadings, params: PolicyParams) -> tuple[bool, bool]:
    """A side is invalid when its two readings disagree by more than 40%
    (relative to the smaller one) or either reading is at max range."""

    def side_ok(d_front: float, d_rear: float, f_max: bool, r_max: bool) -> bool:
        if f_max or r_max:
            return False
        lo = min(d_front, d_rear)
        if lo <= 0.0:
            return True
        return abs(d_front - d_rear) / lo <= params.invalid_wall_ratio

    left = side_ok(ranges.d_nw, ranges.d_sw, ranges.nw_max, ranges.sw_max)
    right = side_ok(ranges.d_ne, ranges.d_se, ranges.ne_max, ranges.se_max)
    return left, right


def centering_command(ranges: RangeReadings, params: PolicyParams) -> tuple[float, float]:
    """Two-wall centering: front pair sets the lateral correction, the
    same-side pairs set the yaw."""
    y_dot = params.C_t * (ranges.d_nw - ranges.d_ne)
    omega = params.C_r * (ranges.d_nw - ranges.d_sw) + params.C_r * (
        ranges.d_se - ranges.d_ne
    )
    return y_dot, omega


def wall_follow_command(
    ranges: RangeReadings, left_valid: bool, right_valid: bool, params: PolicyParams
) -> tuple[float, float]:
    """Single-wall fallback: hold a preset distance to the remaining wall.

    With both walls invalid (a room), fly straight: zero correction.
    """
    if left_valid and not right_valid:
        y_dot = params.C_t * (ranges.d_nw - params.D)
        omega = 2.0 * params.C_r * (ranges.d_nw - ranges.d_sw)
        return y_dot, omega
    if right_valid and not left_valid:
        y_dot = -params.C_t * (ranges.d_ne - params.D)
        omega = -2.0 * params.C_r * (ranges.d_ne - ranges.d_se)
        return y_dot, omega
    return 0.0, 0.0


def lateral_command(ranges: RangeReadings, params: PolicyParams) -> tuple[float, float]:
    """Full reactive controller: centering when both walls are valid,
    wall-following otherwise."""
    left, right = wall_validity(ranges, params)
    if left and right:
        return centering_command(ranges, params)
    return wall_follow_command(ranges, left, right, params)


# Ticks a side must read consistent before it is trusted again, and ticks the
# last command is held while neither side reads consistent.
NAV_REVALIDATE_TICKS = 5
NAV_HOLD_TICKS = 15
# Forward speed limit while the wall geometry is ambiguous (a corner opening
# up): the yaw controller cannot complete a 90 degree turn at full speed.
NAV_SLOW_SPEED = 0.25
# Yaw search rate while hovering with no trusted wall: a badly skewed heading
# makes the diagonal sensors run parallel to the walls, which would otherwise
# deadlock the controller.
NAV_SEARCH_YAW = 0.4
# Forward clearance below which forward motion stops outright.
NAV_FRONT_STOP = 0.4


class ReactiveNavigator:
    """Stateful wrapper around the reactive controller for corner robustness.

    Raw per-tick validity flickers while a corner opens up: the front sensor on
    the inside of the turn briefly agrees with the rear one again when it picks
    up the facing wall of the next leg, which would steer the vehicle into the
    gap. Two pieces of memory fix this: a side that went invalid must read
    valid for NAV_REVALIDATE_TICKS consecutive ticks before it is trusted
    again, and when neither side is trusted the previous command is held for up
    to NAV_HOLD_TICKS (so a turn in progress completes) before falling back to
    flying straight. Lateral speed is clamped to v_max, and while any side is
    untrusted the speed_cap attribute limits forward speed to NAV_SLOW_SPEED.
    """

    def __init__(self, params: PolicyParams):
        self.params = params
        self.reset()

    def reset(self) -> None:
        self._left_run = 0
        self._right_run = 0
        self._left_ok = True
        self._right_ok = True
        self._hold = 0
        self._last = (0.0, 0.0)
        self.speed_cap = self.params.v_max

    def flip(self) -> None:
        """Mirror the side memory for a reversal of travel direction: the
        sensing frame rotates half a turn, so left and right swap roles and a
        held lateral command changes sign (yaw rate is frame-independent)."""
        self._left_run, self._right_run = self._right_run, self._left_run
        self._left_ok, self._right_ok = self._right_ok, self._left_ok
        self._last = (-self._last[0], self._last[1])

    def command(self, ranges: RangeReadings) -> tuple[float, float]:
        p = self.params
        left_raw, right_raw = wall_validity(ranges, p)
        self._left_run = self._left_run + 1 if left_raw else 0
        self._right_run = self._right_run + 1 if right_raw else 0
        if not left_raw:
            self._left_ok = False
        elif self._left_run >= NAV_REVALIDATE_TICKS:
            self._left_ok = True
        if not right_raw:
            self._right_ok = False
        elif self._right_run >= NAV_REVALIDATE_TICKS:
            self._right_ok = True

        if self._left_ok and self._right_ok:
            cmd = centering_command(ranges, p)
            self._hold = 0
            cap = p.v_max
        elif self._left_ok or self._right_ok:
            cmd = wall_follow_command(ranges, self._left_ok, self._right_ok, p)
            self._hold = 0
            cap = NAV_SLOW_SPEED
        else:
            self._hold += 1
            if self._hold <= NAV_HOLD_TICKS:
                # finish the turn in progress: keep yawing, but stop blind
                # sideways motion
                cmd = (0.0, self._last[1])
                cap = NAV_SLOW_SPEED
            else:
                # lost both walls for good: hover and yaw until the sensor
                # pattern becomes consistent again
                cmd = (0.0, NAV_SEARCH_YAW)
                cap = 0.0
        if min(ranges.d_nw, ranges.d_ne) < NAV_FRONT_STOP:
            cap = 0.0
        self.speed_cap = min(cap, p.v_max)
        cmd = (max(-p.v_max, min(p.v_max, cmd[0])), cmd[1])
        self._last = cmd
        return cmd


def transition(
    mode: AgentMode,
    base_link_quality: float | None,
    missed_ticks: int,
    launch_commanded: bool,
    airborne: bool,
    params: PolicyParams,
) -> AgentMode:
    """One state-machine step for a single agent.

    base_link_quality is the policy-facing estimate of the uplink toward the
    base (None while no estimate exists). missed_ticks counts consecutive
    decision ticks without a packet from the base-side neighbor.
    """
    if mode is AgentMode.BASE or mode is AgentMode.HEAD:
        return mode
    if mode is AgentMode.IDLE:
        return AgentMode.TAKING_OFF if launch_commanded else mode
    if mode is AgentMode.TAKING_OFF:
        return AgentMode.RELAYING if airborne else mode
    link_lost = missed_ticks >= LINK_TIMEOUT_TICKS
    link_weak = base_link_quality is not None and base_link_quality < params.s_min
    if mode is AgentMode.RELAYING:
        if link_lost or link_weak:
            return AgentMode.RETREATING
        return mode
    if mode is AgentMode.RETREATING:
        recovered = (
            not link_lost
            and base_link_quality is not None
            and base_link_quality >= params.s_min + params.launch_margin
        )
        return AgentMode.RELAYING if recovered else mode
    raise ValueError(f"unknown mode {mode}")


def head_uplink_weak(
    base_link_quality: float | None, missed_ticks: int, params: PolicyParams
) -> bool:
    """Head retreat condition: clamp pilot forward motion while the uplink is
    weak or lost, and back off instead."""
    if missed_ticks >= LINK_TIMEOUT_TICKS:
        return True
    return base_link_quality is not None and base_link_quality < params.s_min
