import numpy as np
import pytest

from uchain.config import DECISION_DT
from uchain.metrics import (
    CONVERGENCE_HOLD_S,
    NOISE_FLOOR_BAND,
    Metrics,
    convergence_band,
    convergence_detector,
    position_variance,
)

HOLD_TICKS = int(round(CONVERGENCE_HOLD_S / DECISION_DT))


def test_band_floors_at_noise_level():
    assert convergence_band(0.0) == NOISE_FLOOR_BAND
    assert convergence_band(5.0) == 5.0


def test_detector_finds_first_sustained_entry():
    trace = [10.0] * 10 + [1.0] * (HOLD_TICKS + 5)
    t = convergence_detector(trace, tolerance=0.0)
    assert t == pytest.approx(10 * DECISION_DT)


def test_detector_ignores_brief_dips():
    # in-band stretches shorter than the hold window never count
    trace = ([1.0] * (HOLD_TICKS - 1) + [10.0]) * 4
    assert convergence_detector(trace, tolerance=0.0) is None


def test_detector_restarts_after_excursion():
    trace = [1.0] * 10 + [10.0] + [1.0] * HOLD_TICKS
    t = convergence_detector(trace, tolerance=0.0)
    assert t == pytest.approx(11 * DECISION_DT)


def test_detector_start_index_offsets_time():
    trace = [0.5] * (HOLD_TICKS + 20)
    assert convergence_detector(trace, 0.0, start_index=20) == pytest.approx(0.0)


def test_detector_treats_inf_as_out_of_band():
    trace = [np.inf] * 5 + [0.0] * HOLD_TICKS
    t = convergence_detector(trace, tolerance=0.0)
    assert t == pytest.approx(5 * DECISION_DT)


def test_detector_none_when_never_held():
    assert convergence_detector([10.0] * 500, tolerance=0.0) is None
    assert convergence_detector([], tolerance=0.0) is None


def test_position_variance_uses_head_side_relays_only():
    ticks = int(round(20.0 / DECISION_DT))
    still = np.full(ticks, 7.0)
    noisy = 7.0 + np.sin(np.arange(ticks))
    traces = {1: still, 2: still, 3: still, 4: noisy}
    # chain order head-first: ids 1..3 count, the noisy relay 4 does not
    v = position_variance(traces, [1, 2, 3, 4])
    assert v == pytest.approx(0.0)


def test_position_variance_averages_over_relays():
    ticks = int(round(20.0 / DECISION_DT))
    a = np.full(ticks, 5.0)
    b = 5.0 + np.tile([0.5, -0.5], ticks // 2)
    v = position_variance({1: a, 2: b}, [1, 2])
    assert v == pytest.approx(np.var(b) / 2.0)


def test_position_variance_empty_chain():
    assert position_variance({}, []) is None


def test_position_variance_skips_nonfinite_prefix():
    ticks = int(round(20.0 / DECISION_DT))
    tr = np.concatenate([np.full(50, np.nan), np.full(ticks, 3.0)])
    assert position_variance({1: tr}, [1]) == pytest.approx(0.0)


def test_metrics_converged_property():
    m = Metrics(12.0, 0.01, np.array([-30.0]), [], [])
    assert m.converged
    m2 = Metrics(None, 0.01, np.array([-30.0]), [], [])
    assert not m2.converged
