"""Least-squares calibration of the Kalman control gain from a logged run.

The filter models the per-tick quality change as A times the separation rate.
Given a log of a constant-separation-rate straight-corridor run, the gain is
the least-squares slope of (quality change per tick) against (separation rate
times the tick duration's worth of relative displacement), i.e. delta_q = A * u
per tick with u in m/s scaled by the decision period.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .config import DECISION_DT


class DegenerateLogError(ValueError):
    """The log contains no relative motion, so A cannot be identified."""


def fit_gain(u: np.ndarray, delta_q: np.ndarray) -> tuple[float, float]:
    """Slope of delta_q = A * u through the origin, plus RMS residual."""
    u = np.asarray(u, dtype=float)
    delta_q = np.asarray(delta_q, dtype=float)
    denom = float(np.dot(u, u))
    if denom <= 1e-12:
        raise DegenerateLogError("zero separation rate throughout the log")
    a = float(np.dot(u, delta_q)) / denom
    resid = float(np.sqrt(np.mean((delta_q - a * u) ** 2)))
    return a, resid


def calibrate_from_log(path: str | Path) -> tuple[float, float]:
    """Fit A from a run log CSV (columns of engine.write_log_csv).

    Uses each logged link's raw measured quality: quality change between
    consecutive ticks against the separation rate inferred from the abscissa
    change of the link's head-side endpoint (the base-side endpoint must be
    static, e.g. a head separating from the base with no packet loss).
    Returns (fitted A in quality units per (m/s), RMS residual).
    """
    ticks: dict[int, dict[int, tuple[float, float]]] = {}
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            if not row["true_q"]:
                continue
            tick = int(row["tick"])
            aid = int(row["agent_id"])
            q = float(row["raw_q"] or row["true_q"])
            ticks.setdefault(tick, {})[aid] = (float(row["x_abscissa"]), q)
    order = sorted(ticks)
    us, dqs = [], []
    for t0, t1 in zip(order, order[1:]):
        for aid in ticks[t0]:
            if aid not in ticks[t1]:
                continue
            # separation rate relative to the base-side neighbor is encoded in
            # the abscissa change of the link's head-side endpoint
            x0, q0 = ticks[t0][aid]
            x1, q1 = ticks[t1][aid]
            us.append((x1 - x0) / DECISION_DT)
            dqs.append(q1 - q0)
    if not us:
        raise DegenerateLogError("log holds no usable link samples")
    return fit_gain(np.asarray(us) , np.asarray(dqs))
