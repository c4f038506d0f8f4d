"""Reference solvers used for analysis and as test oracles.

maximin_oracle exhaustively searches a fixed-resolution grid of relay
abscissae for the placement that maximizes the weakest link's noiseless
quality (implemented as an exact dynamic program over the grid, equivalent to
enumerating every ordered relay tuple). equalization_rounds runs the
synchronous noiseless movement rule on a linear signal, the setting of the
convergence proof.
"""

from __future__ import annotations

import numpy as np

from .geometry import Environment
from .radio import RadioParams


def chain_points(env: Environment, abscissae) -> np.ndarray:
    """Centerline points for a list of abscissae."""
    return np.array([env.point_at_arc(s) for s in np.asarray(abscissae, float)])


def _pair_crossings(walls: np.ndarray, p1: np.ndarray, p2: np.ndarray) -> np.ndarray:
    """Wall-crossing counts for N point pairs at once."""
    d = p2 - p1                                    # (N, 2)
    r = walls[:, 1] - walls[:, 0]                  # (M, 2)
    po = walls[None, :, 0, :] - p1[:, None, :]     # (N, M, 2)
    denom = d[:, None, 0] * r[None, :, 1] - d[:, None, 1] * r[None, :, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        u = (po[..., 0] * r[None, :, 1] - po[..., 1] * r[None, :, 0]) / denom
        t = (po[..., 0] * d[:, None, 1] - po[..., 1] * d[:, None, 0]) / denom
    eps = 1e-9
    hit = (
        (np.abs(denom) > 1e-12)
        & (u >= -eps) & (u <= 1.0 + eps)
        & (t >= -eps) & (t <= 1.0 + eps)
    )
    return hit.sum(axis=1)


def grid_quality_matrix(
    env: Environment, params: RadioParams, grid: np.ndarray
) -> np.ndarray:
    """Noiseless quality between every ordered pair of grid abscissae.

    Entry [i, j] (i < j) is the quality between the centerline points at
    grid[i] and grid[j]; the lower triangle and diagonal are -inf.
    """
    pts = chain_points(env, grid)
    m = len(grid)
    ii, jj = np.triu_indices(m, k=1)
    p1, p2 = pts[ii], pts[jj]
    dist = np.hypot(*(p2 - p1).T)
    dist = np.maximum(dist, 0.1)
    crossings = _pair_crossings(env.walls, p1, p2)
    alpha = np.minimum(params.alpha_base + crossings, params.alpha_max)
    q = np.full((m, m), -np.inf)
    q[ii, jj] = -10.0 * alpha * np.log10(dist)
    return q


class InfeasibleGridError(ValueError):
    """The head is too close to the base to place the requested relays."""


def maximin_oracle(
    env: Environment,
    params: RadioParams,
    head_abscissa: float,
    n_relays: int,
    resolution: float = 0.05,
) -> tuple[np.ndarray, float]:
    """Optimal relay abscissae maximizing the minimum link quality.

    Endpoints are fixed (base at 0, head at head_abscissa); relays keep the
    chain ordering. Returns (abscissae including endpoints, optimal value).
    The search is exhaustive over the grid: the dynamic program considers
    every strictly increasing tuple of grid indices.
    """
    if n_relays < 1:
        raise ValueError("need at least one relay")
    if head_abscissa <= 0.0 or head_abscissa > env.length:
        raise ValueError("head abscissa outside the map")
    m = int(round(head_abscissa / resolution))
    if m < n_relays + 1:
        raise InfeasibleGridError(
            f"{n_relays} relays do not fit between 0 and {head_abscissa} m "
            f"at {resolution} m resolution"
        )
    grid = np.linspace(0.0, head_abscissa, m + 1)
    q = grid_quality_matrix(env, params, grid)

    # f[j] = best achievable min-quality from the base to a relay at grid[j]
    # using the links placed so far; parents recover the argmax placement.
    f = q[0, :].copy()
    parents = []
    for _ in range(n_relays - 1):
        prev = f
        f = np.full_like(prev, -np.inf)
        parent = np.zeros(len(grid), dtype=int)
        for j in range(2, len(grid)):
            cand = np.minimum(prev[1:j], q[1:j, j])
            k = int(np.argmax(cand))
            f[j] = cand[k]
            parent[j] = k + 1
        parents.append(parent)
    closing = np.minimum(f[1:-1], q[1:-1, -1])
    j = int(np.argmax(closing)) + 1
    value = float(closing[j - 1])
    relay_idx = [j]
    for parent in reversed(parents):
        j = int(parent[j])
        relay_idx.append(j)
    relay_idx.reverse()
    idx = [0, *relay_idx, len(grid) - 1]
    idx = _polish(q, idx)
    positions = grid[idx].copy()
    positions[0], positions[-1] = 0.0, head_abscissa
    return positions, value


def _polish(q: np.ndarray, idx: list[int]) -> list[int]:
    """Equalize non-binding links without lowering the optimum.

    Maximizing the minimum leaves slack in links that are not the bottleneck;
    coordinate ascent re-places each relay at the grid point maximizing the
    weaker of its two adjacent links, which only ever raises local minima.
    """
    idx = list(idx)
    for _ in range(50):
        changed = False
        for pos in range(1, len(idx) - 1):
            lo, hi = idx[pos - 1], idx[pos + 1]
            if hi - lo < 2:
                continue
            cand = np.minimum(q[lo, lo + 1:hi], q[lo + 1:hi, hi])
            best = lo + 1 + int(np.argmax(cand))
            if best != idx[pos]:
                idx[pos] = best
                changed = True
        if not changed:
            break
    return idx


def oracle_link_qualities(
    env: Environment, params: RadioParams, abscissae
) -> np.ndarray:
    """Noiseless qualities of every consecutive link of a chain."""
    from .radio import true_quality

    pts = chain_points(env, abscissae)
    return np.array(
        [true_quality(env, pts[i], pts[i + 1], params) for i in range(len(pts) - 1)]
    )


def equalization_rounds(
    positions, tol: float = 1e-3, max_rounds: int = 100_000
) -> tuple[np.ndarray, list[float], int]:
    """Synchronous noiseless equalization on a linear signal s = -(distance).

    positions is an increasing array of abscissae; both endpoints stay fixed.
    Each round, every interior agent moves toward its weaker link so that the
    weaker link improves by a third of the local quality difference. Returns
    (final positions, per-round min link quality trace, rounds used).
    """
    x = np.asarray(positions, dtype=float).copy()
    if np.any(np.diff(x) < 0.0):
        raise ValueError("positions must be nondecreasing")
    min_trace: list[float] = []
    rounds = 0
    while rounds < max_rounds:
        links = -np.diff(x)  # quality of link (i, i+1), larger is better
        min_trace.append(float(links.min()))
        if links.max() - links.min() <= tol:
            break
        # r_b - r_f for interior agent i: base link is (i-1, i), head link (i, i+1)
        s_d = links[:-1] - links[1:]
        x[1:-1] += s_d / 3.0
        rounds += 1
    return x, min_trace, rounds
