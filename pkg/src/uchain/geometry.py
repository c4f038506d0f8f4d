"""2-D tunnel geometry: wall maps, raycast range sensing and centerline bookkeeping.

The environment is planar. Walls are zero-thickness line segments; the tunnel
centerline is a polyline parameterized by arc length, with the base station at
arc length 0 and the exploration front at the far end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SENSOR_MAX_RANGE = 2.0
SENSOR_CONE_DEG = 27.0
RAYS_PER_CONE = 3


def wrap_angle(a: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    a = math.fmod(a, 2.0 * math.pi)
    if a <= -math.pi:
        a += 2.0 * math.pi
    elif a > math.pi:
        a -= 2.0 * math.pi
    return a


@dataclass(frozen=True)
class Pose:
    """Position (m) and heading (rad, wrapped to (-pi, pi])."""

    x: float
    y: float
    heading: float

    def __post_init__(self):
        object.__setattr__(self, "heading", wrap_angle(self.heading))

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y])


@dataclass(frozen=True)
class RangeReadings:
    """Four diagonal range readings, clamped to [0, SENSOR_MAX_RANGE].

    NW/NE are the front-left/front-right sensors, SW/SE the rear pair.
    A reading equal to the max range carries a max-range flag instead of a
    true distance.
    """

    d_nw: float
    d_ne: float
    d_sw: float
    d_se: float
    nw_max: bool = False
    ne_max: bool = False
    sw_max: bool = False
    se_max: bool = False


class OutsideTunnelError(ValueError):
    """A queried point is too far from the centerline to belong to the tunnel."""


@dataclass
class Environment:
    """Tunnel map: wall segments, centerline polyline and spawn pose.

    walls: (M, 2, 2) array of segments, walls[i] = [[x1, y1], [x2, y2]].
    centerline: (K, 2) array of points ordered from the base (arc length 0)
    toward the exploration front.
    """

    name: str
    walls: np.ndarray
    centerline: np.ndarray
    spawn: Pose
    _cumlen: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.walls = np.asarray(self.walls, dtype=float).reshape(-1, 2, 2)
        self.centerline = np.asarray(self.centerline, dtype=float).reshape(-1, 2)
        if len(self.centerline) < 2:
            raise ValueError("centerline needs at least 2 points")
        seg = np.diff(self.centerline, axis=0)
        seglen = np.hypot(seg[:, 0], seg[:, 1])
        if np.any(seglen <= 0.0):
            raise ValueError("centerline has a zero-length segment")
        self._cumlen = np.concatenate([[0.0], np.cumsum(seglen)])
        wall_vec = self.walls[:, 1] - self.walls[:, 0]
        if np.any(np.hypot(wall_vec[:, 0], wall_vec[:, 1]) <= 0.0):
            raise ValueError("wall segment with zero length")
        # spawn must sit within sensor range of the centerline
        d = self._distance_to_centerline(np.array([self.spawn.x, self.spawn.y]))
        if d >= SENSOR_MAX_RANGE:
            raise ValueError(f"spawn is {d:.2f} m from the centerline")

    @property
    def length(self) -> float:
        """Total centerline arc length in meters."""
        return float(self._cumlen[-1])

    def _distance_to_centerline(self, p: np.ndarray) -> float:
        _, dist = self._project(p)
        return dist

    def _project(self, p: np.ndarray) -> tuple[float, float]:
        """Project p onto the centerline; return (arc length, distance)."""
        a = self.centerline[:-1]
        b = self.centerline[1:]
        ab = b - a
        ab2 = np.einsum("ij,ij->i", ab, ab)
        t = np.clip(np.einsum("ij,ij->i", p - a, ab) / ab2, 0.0, 1.0)
        closest = a + t[:, None] * ab
        d2 = np.einsum("ij,ij->i", p - closest, p - closest)
        k = int(np.argmin(d2))
        arc = self._cumlen[k] + t[k] * math.sqrt(ab2[k])
        return float(arc), float(math.sqrt(d2[k]))

    def point_at_arc(self, s: float) -> np.ndarray:
        """Centerline point at arc length s (clamped to the polyline)."""
        s = float(np.clip(s, 0.0, self.length))
        k = int(np.searchsorted(self._cumlen, s, side="right")) - 1
        k = min(k, len(self.centerline) - 2)
        seg = self.centerline[k + 1] - self.centerline[k]
        seglen = self._cumlen[k + 1] - self._cumlen[k]
        t = (s - self._cumlen[k]) / seglen
        return self.centerline[k] + t * seg

    def tangent_at_arc(self, s: float) -> float:
        """Heading (rad) of the centerline at arc length s, pointing forward."""
        s = float(np.clip(s, 0.0, self.length))
        k = int(np.searchsorted(self._cumlen, s, side="right")) - 1
        k = min(max(k, 0), len(self.centerline) - 2)
        seg = self.centerline[k + 1] - self.centerline[k]
        return math.atan2(seg[1], seg[0])


_HALF_CONE = math.radians(SENSOR_CONE_DEG / 2.0)
# sensor center directions relative to the heading: NW, NE, SW, SE
_SENSOR_DIRS = np.array([math.pi / 4, -math.pi / 4, 3 * math.pi / 4, -3 * math.pi / 4])
_RAY_OFFSETS = np.array([-_HALF_CONE, 0.0, _HALF_CONE])
# (4, 3) relative ray angles, one row per sensor
_RAY_ANGLES = _SENSOR_DIRS[:, None] + _RAY_OFFSETS[None, :]


def raycast_ranges(env: Environment, pose: Pose) -> RangeReadings:
    """Simulate the four diagonal time-of-flight sensors.

    Each sensor covers a 27 degree cone approximated by 3 rays (center and
    both edges); the reading is the minimum hit distance, clamped to 2 m.
    """
    origin = np.array([pose.x, pose.y])
    angles = (pose.heading + _RAY_ANGLES).ravel()           # (12,)
    d = np.stack([np.cos(angles), np.sin(angles)], axis=1)  # (12, 2)
    p = env.walls[:, 0]
    r = env.walls[:, 1] - env.walls[:, 0]                   # (M, 2)
    po = p - origin                                         # (M, 2)
    denom = d[:, 0, None] * r[None, :, 1] - d[:, 1, None] * r[None, :, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        u = (po[None, :, 0] * r[None, :, 1] - po[None, :, 1] * r[None, :, 0]) / denom
        t = (po[None, :, 0] * d[:, 1, None] - po[None, :, 1] * d[:, 0, None]) / denom
    hit = (
        (np.abs(denom) > 1e-12)
        & (u >= 0.0)
        & (t >= -1e-12) & (t <= 1.0 + 1e-12)
    )
    u = np.where(hit, u, np.inf)
    dist = np.minimum(u.min(axis=1).reshape(4, 3).min(axis=1), SENSOR_MAX_RANGE)
    flags = dist >= SENSOR_MAX_RANGE
    return RangeReadings(
        d_nw=float(dist[0]), d_ne=float(dist[1]),
        d_sw=float(dist[2]), d_se=float(dist[3]),
        nw_max=bool(flags[0]), ne_max=bool(flags[1]),
        sw_max=bool(flags[2]), se_max=bool(flags[3]),
    )


def wall_crossings(env: Environment, p1, p2) -> int:
    """Count wall segments intersected by the segment (p1, p2).

    Endpoint touches count as crossings. p1 and p2 must differ.
    """
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    d = p2 - p1
    if not np.any(d):
        raise ValueError("wall_crossings needs two distinct points")
    p = env.walls[:, 0]
    r = env.walls[:, 1] - env.walls[:, 0]
    denom = d[0] * r[:, 1] - d[1] * r[:, 0]
    ok = np.abs(denom) > 1e-12
    po = p - p1
    with np.errstate(divide="ignore", invalid="ignore"):
        u = (po[:, 0] * r[:, 1] - po[:, 1] * r[:, 0]) / denom
        t = (po[:, 0] * d[1] - po[:, 1] * d[0]) / denom
    eps = 1e-9
    hit = ok & (u >= -eps) & (u <= 1.0 + eps) & (t >= -eps) & (t <= 1.0 + eps)
    return int(np.count_nonzero(hit))


def segment_hits_any_wall(env: Environment, p1, p2) -> bool:
    """True when the motion segment (p1, p2) touches a wall (penetration check)."""
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    if not np.any(p2 - p1):
        return False
    return wall_crossings(env, p1, p2) > 0


def arc_position(env: Environment, p) -> float:
    """Curvilinear abscissa of p: arc length of the closest centerline point.

    The base end maps to 0; the abscissa increases toward the exploration
    front. Points farther than 2 m from the centerline are rejected (the
    drone left the tunnel).
    """
    p = np.asarray(p, dtype=float)
    arc, dist = env._project(p)
    if dist > SENSOR_MAX_RANGE:
        raise OutsideTunnelError(
            f"point ({p[0]:.2f}, {p[1]:.2f}) is {dist:.2f} m from the centerline"
        )
    return arc
