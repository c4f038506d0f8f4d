"""Scalar Kalman filter over link quality with a relative-velocity control input.

The model: quality drifts linearly with the separation rate u of the two link
endpoints (control gain A < 0, so separating agents predict a quality drop),
plus process noise Q; measurements carry noise R. Missed packets trigger a
prediction-only update, which grows the variance and encodes staleness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class KalmanParams:
    """A: quality units per (m/s); Q: process noise; R: measurement noise."""

    A: float = -0.5
    Q: float = 0.05
    R: float = 3.0

    def __post_init__(self):
        if self.Q < 0.0 or self.R <= 0.0:
            raise ValueError("need Q >= 0 and R > 0")
        if not math.isfinite(self.A):
            raise ValueError("A must be finite")


@dataclass(frozen=True)
class LinkEstimate:
    """Filtered link quality and its variance."""

    r_hat: float
    p_var: float
    last_tick: int = 0

    def __post_init__(self):
        if not (self.p_var > 0.0 and math.isfinite(self.p_var)):
            raise ValueError("p_var must be positive and finite")
        if not math.isfinite(self.r_hat):
            raise ValueError("r_hat must be finite")


def predict(est: LinkEstimate, u: float, params: KalmanParams) -> LinkEstimate:
    """A-priori update: drift by A*u, inflate variance by Q.

    u > 0 means the endpoints are separating.
    """
    return LinkEstimate(est.r_hat + params.A * u, est.p_var + params.Q,
                        est.last_tick)


def correct(est: LinkEstimate, z: float, params: KalmanParams) -> LinkEstimate:
    """A-posteriori update with measurement z; the gain is always in (0, 1)."""
    k = est.p_var / (est.p_var + params.R)
    return LinkEstimate(est.r_hat + k * (z - est.r_hat),
                        (1.0 - k) * est.p_var, est.last_tick)


def step(
    est: LinkEstimate,
    u: float,
    measurement: float | None,
    params: KalmanParams,
    tick: int = 0,
) -> LinkEstimate:
    """One filter cycle: predict always, correct only when a packet arrived."""
    out = predict(est, u, params)
    if measurement is not None:
        out = correct(out, measurement, params)
    return LinkEstimate(out.r_hat, out.p_var, tick)


def steady_state_variance(params: KalmanParams) -> float:
    """Fixed point of the scalar Riccati recursion for constant Q, R."""
    q, r = params.Q, params.R
    return (q + math.sqrt(q * q + 4.0 * q * r)) / 2.0
