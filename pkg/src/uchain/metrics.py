"""Run metrics: convergence detection and post-convergence position variance."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import DECISION_DT

CONVERGENCE_HOLD_S = 5.0
NOISE_FLOOR_BAND = 2.0
VARIANCE_WINDOW_S = 20.0
# Figures of merit only consider the chain portion nearest the head.
FIRST_LINKS = 3


def convergence_band(tolerance: float) -> float:
    """Detection band: the policy tolerance, floored at the noise level."""
    return max(tolerance, NOISE_FLOOR_BAND)


def convergence_detector(
    rdiff_trace, tolerance: float, window_s: float = CONVERGENCE_HOLD_S,
    start_index: int = 0, dt: float = DECISION_DT,
) -> float | None:
    """First time (s, relative to start_index) from which every relay's
    |r_diff| stays within the band continuously for window_s.

    rdiff_trace[t] is the max |r_diff| over active relays at tick t
    (inf while some relay has no usable estimate, 0 when no relay is active).
    """
    trace = np.asarray(rdiff_trace, dtype=float)[start_index:]
    band = convergence_band(tolerance)
    need = int(round(window_s / dt))
    in_band = trace <= band
    run = 0
    for i, ok in enumerate(in_band):
        run = run + 1 if ok else 0
        if run >= need:
            return (i - need + 1) * dt
    return None


def position_variance(
    abscissa_traces: dict[int, np.ndarray],
    relay_ids_by_chain_order: list[int],
    dt: float = DECISION_DT,
    window_s: float = VARIANCE_WINDOW_S,
) -> float | None:
    """Mean per-agent abscissa variance over the final window, restricted to
    the relays of the first three links (those nearest the head)."""
    ids = relay_ids_by_chain_order[:FIRST_LINKS]
    if not ids:
        return None
    n = int(round(window_s / dt))
    out = []
    for aid in ids:
        tr = np.asarray(abscissa_traces[aid], dtype=float)
        tail = tr[-n:]
        tail = tail[np.isfinite(tail)]
        if len(tail) >= 2:
            out.append(float(np.var(tail)))
    return float(np.mean(out)) if out else None


@dataclass
class Metrics:
    convergence_time_s: float | None
    position_variance: float | None
    min_true_quality: np.ndarray
    launch_events: list[tuple[int, int]]       # (tick, agent_id)
    faults: list[tuple[int, str]]              # (tick, description)
    rdiff_max_trace: np.ndarray = field(repr=False, default=None)
    abscissa_traces: dict[int, np.ndarray] = field(repr=False, default_factory=dict)

    @property
    def converged(self) -> bool:
        return self.convergence_time_s is not None
