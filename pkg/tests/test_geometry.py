import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from uchain.geometry import (
    SENSOR_MAX_RANGE,
    Environment,
    OutsideTunnelError,
    Pose,
    arc_position,
    raycast_ranges,
    segment_hits_any_wall,
    wall_crossings,
    wrap_angle,
)
from uchain.maps import l_corridor, s_corridor, straight_corridor

# centered in a 1.5 m corridor, the cone minimum is the edge ray at 58.5 deg
CENTERED_CONE_READING = 0.75 / math.sin(math.radians(45.0 + 13.5))


def test_wrap_angle_range():
    for a in (-10.0, -math.pi, 0.0, math.pi, 7.0, 123.456):
        w = wrap_angle(a)
        assert -math.pi < w <= math.pi


@given(st.floats(-50, 50, allow_nan=False))
def test_wrap_angle_preserves_direction(a):
    w = wrap_angle(a)
    assert math.isclose(math.cos(w), math.cos(a), abs_tol=1e-9)
    assert math.isclose(math.sin(w), math.sin(a), abs_tol=1e-9)


def test_pose_wraps_heading():
    assert Pose(0, 0, 3 * math.pi).heading == pytest.approx(math.pi)


def test_environment_rejects_degenerate_centerline():
    with pytest.raises(ValueError):
        Environment("bad", [[[0, 0], [1, 0]]], [[0, 0]], Pose(0, 0, 0))
    with pytest.raises(ValueError):
        Environment("bad", [[[0, 0], [1, 0]]], [[0, 0], [0, 0]], Pose(0, 0, 0))


def test_environment_rejects_zero_length_wall():
    with pytest.raises(ValueError):
        Environment("bad", [[[1, 1], [1, 1]]], [[0, 0], [1, 0]], Pose(0, 0, 0))


def test_environment_rejects_far_spawn():
    with pytest.raises(ValueError):
        Environment("bad", [[[0, -1], [30, -1]]], [[0, 0], [30, 0]],
                    Pose(0, 10.0, 0))


def test_centerline_arc_round_trip():
    env = l_corridor()
    for s in (0.0, 3.7, 15.0, 22.2, env.length):
        p = env.point_at_arc(s)
        assert arc_position(env, p) == pytest.approx(s, abs=1e-9)


def test_corner_abscissa_is_leg_length():
    env = l_corridor()
    assert np.allclose(env.point_at_arc(15.0), [15.0, 0.0])
    assert env.tangent_at_arc(14.9) == pytest.approx(0.0)
    assert env.tangent_at_arc(15.1) == pytest.approx(math.pi / 2)


def test_environment_lengths():
    assert straight_corridor().length == pytest.approx(30.0)
    assert l_corridor().length == pytest.approx(30.0)
    assert s_corridor().length == pytest.approx(30.0)


def test_centered_readings_symmetric():
    env = straight_corridor()
    rg = raycast_ranges(env, Pose(15.0, 0.0, 0.0))
    for d in (rg.d_nw, rg.d_ne, rg.d_sw, rg.d_se):
        assert d == pytest.approx(CENTERED_CONE_READING, abs=1e-9)
    assert not (rg.nw_max or rg.ne_max or rg.sw_max or rg.se_max)


@given(st.floats(2.0, 28.0))
def test_centerline_front_pair_balanced(s):
    env = straight_corridor()
    p = env.point_at_arc(s)
    rg = raycast_ranges(env, Pose(p[0], p[1], env.tangent_at_arc(s)))
    assert abs(rg.d_nw - rg.d_ne) < 1e-6


def test_offset_shrinks_near_side():
    env = straight_corridor()
    rg = raycast_ranges(env, Pose(15.0, 0.3, 0.0))
    assert rg.d_nw < rg.d_ne
    assert rg.d_sw < rg.d_se


def test_open_side_reads_max_range():
    env = l_corridor()
    # just before the corner the front-left cone looks into the gap
    rg = raycast_ranges(env, Pose(14.0, 0.0, 0.0))
    assert rg.nw_max and rg.d_nw == SENSOR_MAX_RANGE
    assert not rg.se_max


def test_wall_crossings_counts_blocking_walls():
    env = l_corridor()
    assert wall_crossings(env, (5.0, 0.0), (10.0, 0.0)) == 0
    # leg 1 to leg 2 interior, cutting the inside corner
    assert wall_crossings(env, (13.0, 0.0), (15.0, 3.0)) >= 1


def test_wall_crossings_rejects_identical_points():
    with pytest.raises(ValueError):
        wall_crossings(straight_corridor(), (1.0, 0.0), (1.0, 0.0))


def test_segment_hits_any_wall():
    env = straight_corridor()
    assert segment_hits_any_wall(env, (5.0, 0.0), (5.0, 1.0))
    assert not segment_hits_any_wall(env, (5.0, 0.0), (6.0, 0.5))
    assert not segment_hits_any_wall(env, (5.0, 0.0), (5.0, 0.0))


def test_arc_position_rejects_outside_points():
    with pytest.raises(OutsideTunnelError):
        arc_position(straight_corridor(), (15.0, 5.0))
