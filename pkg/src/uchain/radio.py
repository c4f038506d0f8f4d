"""Radio link model: log-distance path loss with wall shadowing, noise and loss.

Quality is the negated path loss, s = -10 * alpha * log10(d), so that larger
is better and s strictly decreases with distance. The attenuation exponent
alpha grows with the number of walls blocking the line of sight, which is what
makes relays settle at corners.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Environment, wall_crossings

# Below this separation two UAVs are in a collision regime, not a radio one.
MIN_RADIO_DISTANCE = 0.1


@dataclass(frozen=True)
class RadioParams:
    alpha_base: float = 2.0
    alpha_max: float = 6.0
    noise_variance: float = 3.0
    packet_loss_prob: float = 0.2
    s_min: float = -55.0

    def __post_init__(self):
        if not (2.0 <= self.alpha_base <= self.alpha_max <= 6.0):
            raise ValueError("need 2 <= alpha_base <= alpha_max <= 6")
        if not (0.0 <= self.packet_loss_prob < 1.0):
            raise ValueError("packet_loss_prob must be in [0, 1)")
        if self.noise_variance < 0.0:
            raise ValueError("noise_variance must be >= 0")


@dataclass(frozen=True)
class RadioSample:
    """One delivered packet's measured quality."""

    src: int
    dst: int
    quality: float
    tick: int

    def __post_init__(self):
        if self.src == self.dst:
            raise ValueError("src and dst must differ")
        if not math.isfinite(self.quality):
            raise ValueError("quality must be finite")


def attenuation_factor(env: Environment, p1, p2, params: RadioParams) -> float:
    """Path-loss exponent: alpha_base plus one per blocking wall, capped."""
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    if float(np.hypot(*(p2 - p1))) < 1e-9:
        return params.alpha_base   # coincident endpoints block nothing
    k = wall_crossings(env, p1, p2)
    return min(params.alpha_base + k, params.alpha_max)


def true_quality(env: Environment, p1, p2, params: RadioParams) -> float:
    """Noiseless link quality between two positions (Euclidean geometry)."""
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    d = float(np.hypot(*(p2 - p1)))
    if d < MIN_RADIO_DISTANCE:
        d = MIN_RADIO_DISTANCE
    alpha = attenuation_factor(env, p1, p2, params)
    return -10.0 * alpha * math.log10(d)


def sample_quality(
    env: Environment, p1, p2, params: RadioParams, rng: np.random.Generator
) -> float:
    """Noisy quality measurement: true quality plus Gaussian noise."""
    s = true_quality(env, p1, p2, params)
    if params.noise_variance > 0.0:
        s += rng.normal(0.0, math.sqrt(params.noise_variance))
    return s


def try_transmit(
    quality: float, params: RadioParams, rng: np.random.Generator
) -> bool:
    """One packet attempt: gated by s_min, then subject to random loss."""
    if quality <= params.s_min:
        return False
    if params.packet_loss_prob == 0.0:
        return True
    return rng.random() >= params.packet_loss_prob
