import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from uchain.maps import l_corridor, straight_corridor
from uchain.radio import (
    MIN_RADIO_DISTANCE,
    RadioParams,
    RadioSample,
    attenuation_factor,
    sample_quality,
    true_quality,
    try_transmit,
)

ENV = straight_corridor()
PARAMS = RadioParams()


def test_params_validation():
    with pytest.raises(ValueError):
        RadioParams(alpha_base=1.0)
    with pytest.raises(ValueError):
        RadioParams(alpha_base=5.0, alpha_max=3.0)
    with pytest.raises(ValueError):
        RadioParams(packet_loss_prob=1.0)
    with pytest.raises(ValueError):
        RadioParams(noise_variance=-1.0)


def test_sample_validation():
    with pytest.raises(ValueError):
        RadioSample(1, 1, -20.0, 0)
    with pytest.raises(ValueError):
        RadioSample(1, 2, math.nan, 0)


def test_free_space_quality_matches_log_distance():
    # alpha 2, distance 5 -> -10 * 2 * log10(5)
    q = true_quality(ENV, (5.0, 0.0), (10.0, 0.0), PARAMS)
    assert q == pytest.approx(-20.0 * math.log10(5.0))


def test_quality_is_zero_at_unit_distance():
    assert true_quality(ENV, (5.0, 0.0), (6.0, 0.0), PARAMS) == pytest.approx(0.0)


def test_min_distance_clamp():
    q_close = true_quality(ENV, (5.0, 0.0), (5.0 + 1e-4, 0.0), PARAMS)
    q_at_clamp = true_quality(ENV, (5.0, 0.0), (5.0 + MIN_RADIO_DISTANCE, 0.0), PARAMS)
    assert q_close == pytest.approx(q_at_clamp)


def test_coincident_points_use_base_alpha():
    assert attenuation_factor(ENV, (5.0, 0.0), (5.0, 0.0), PARAMS) == PARAMS.alpha_base


def test_shadowing_raises_alpha_per_wall():
    env = l_corridor()
    a_clear = attenuation_factor(env, (5.0, 0.0), (10.0, 0.0), PARAMS)
    a_shadow = attenuation_factor(env, (13.0, 0.0), (15.0, 3.0), PARAMS)
    assert a_clear == PARAMS.alpha_base
    assert a_shadow > a_clear


def test_alpha_cap():
    # a segment crossing many walls cannot exceed alpha_max
    env = l_corridor()
    a = attenuation_factor(env, (13.0, -0.7), (16.5, 3.0), RadioParams(alpha_max=2.0))
    assert a == 2.0


@given(
    st.floats(1.0, 28.0), st.floats(1.0, 28.0), st.floats(1.0, 28.0)
)
def test_quality_decreases_with_distance(x0, x1, x2):
    # same emitter, farther receiver, no shadowing: strictly worse quality
    d1, d2 = abs(x1 - x0), abs(x2 - x0)
    if min(d1, d2) < MIN_RADIO_DISTANCE or abs(d1 - d2) < 1e-9:
        return
    q1 = true_quality(ENV, (x0, 0.0), (x1, 0.0), PARAMS)
    q2 = true_quality(ENV, (x0, 0.0), (x2, 0.0), PARAMS)
    assert (q1 > q2) == (d1 < d2)


def test_sample_noise_statistics():
    rng = np.random.default_rng(123)
    truth = true_quality(ENV, (5.0, 0.0), (10.0, 0.0), PARAMS)
    draws = np.array([
        sample_quality(ENV, (5.0, 0.0), (10.0, 0.0), PARAMS, rng)
        for _ in range(10_000)
    ])
    assert np.mean(draws) == pytest.approx(truth, abs=0.1)
    assert 2.7 <= np.var(draws) <= 3.3


def test_noiseless_sampling_is_exact():
    rng = np.random.default_rng(0)
    quiet = RadioParams(noise_variance=0.0)
    assert sample_quality(ENV, (5.0, 0.0), (10.0, 0.0), quiet, rng) == pytest.approx(
        true_quality(ENV, (5.0, 0.0), (10.0, 0.0), quiet)
    )


def test_delivery_rate_above_threshold():
    rng = np.random.default_rng(7)
    delivered = sum(try_transmit(-20.0, PARAMS, rng) for _ in range(10_000))
    assert 0.79 <= delivered / 10_000 <= 0.81


def test_threshold_gates_all_packets():
    rng = np.random.default_rng(7)
    assert not any(
        try_transmit(PARAMS.s_min - 1.0, PARAMS, rng) for _ in range(100)
    )
    assert not try_transmit(PARAMS.s_min, PARAMS, rng)


def test_lossless_channel_always_delivers():
    rng = np.random.default_rng(7)
    sure = RadioParams(packet_loss_prob=0.0)
    assert all(try_transmit(-20.0, sure, rng) for _ in range(100))
