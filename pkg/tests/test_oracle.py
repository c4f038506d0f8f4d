import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from uchain.maps import l_corridor, straight_corridor
from uchain.oracle import (
    InfeasibleGridError,
    chain_points,
    equalization_rounds,
    grid_quality_matrix,
    maximin_oracle,
    oracle_link_qualities,
)
from uchain.radio import RadioParams, true_quality

PARAMS = RadioParams()


def brute_force(env, params, head_abscissa, n_relays, resolution):
    """Literal enumeration of every ordered relay tuple on the grid."""
    m = int(round(head_abscissa / resolution))
    grid = np.linspace(0.0, head_abscissa, m + 1)
    q = grid_quality_matrix(env, params, grid)
    best_val, best = -np.inf, None
    for combo in itertools.combinations(range(1, m), n_relays):
        idx = (0, *combo, m)
        val = min(q[idx[i], idx[i + 1]] for i in range(len(idx) - 1))
        if val > best_val:
            best_val, best = val, idx
    return grid[list(best)], best_val


def test_chain_points_follow_centerline():
    env = l_corridor()
    pts = chain_points(env, [0.0, 15.0, 20.0])
    assert np.allclose(pts, [[0.0, 0.0], [15.0, 0.0], [15.0, 5.0]])


def test_grid_matrix_matches_scalar_model():
    env = l_corridor()
    grid = np.array([0.0, 8.0, 14.0, 18.0, 25.0])
    q = grid_quality_matrix(env, PARAMS, grid)
    pts = chain_points(env, grid)
    for i in range(len(grid)):
        for j in range(len(grid)):
            if i < j:
                assert q[i, j] == pytest.approx(
                    true_quality(env, pts[i], pts[j], PARAMS), abs=1e-9
                )
            else:
                assert q[i, j] == -np.inf


@pytest.mark.parametrize("env_fn,head,n", [
    (straight_corridor, 10.0, 2),
    (straight_corridor, 12.0, 3),
    (l_corridor, 18.0, 2),
    (l_corridor, 20.0, 3),
])
def test_oracle_matches_brute_force(env_fn, head, n):
    env = env_fn()
    res = 0.5   # coarse grid keeps the naive enumeration tractable
    pos, val = maximin_oracle(env, PARAMS, head, n, resolution=res)
    naive_pos, naive_val = brute_force(env, PARAMS, head, n, res)
    assert val == pytest.approx(naive_val, abs=1e-9)
    # ties can pick different argmaxes; the returned placement must still
    # achieve the optimum
    links = oracle_link_qualities(env, PARAMS, pos)
    assert links.min() == pytest.approx(naive_val, abs=1e-9)


def test_oracle_positions_ordered_with_endpoints():
    env = straight_corridor()
    pos, _ = maximin_oracle(env, PARAMS, 24.0, 4)
    assert pos[0] == 0.0 and pos[-1] == 24.0
    assert np.all(np.diff(pos) > 0.0)


def test_oracle_free_space_is_even_split():
    # without shadowing the best maximin placement splits the span evenly
    env = straight_corridor()
    pos, val = maximin_oracle(env, PARAMS, 24.0, 3, resolution=0.05)
    assert np.allclose(pos, [0.0, 6.0, 12.0, 18.0, 24.0], atol=0.051)
    assert val == pytest.approx(-20.0 * math.log10(6.0), abs=0.1)


def test_oracle_links_equal_at_optimum():
    env = straight_corridor()
    pos, val = maximin_oracle(env, PARAMS, 24.0, 3, resolution=0.05)
    links = oracle_link_qualities(env, PARAMS, pos)
    # one grid cell of slack: quality changes at most this much per 0.05 m
    slack = 20.0 * (math.log10(6.0) - math.log10(5.95))
    assert links.max() - links.min() <= 2 * slack
    assert links.min() == pytest.approx(val, abs=1e-9)


def test_oracle_avoids_corner_shadow():
    # with the head around the corner, the middle relay hugs the corner so
    # neither link is shadowed
    env = l_corridor()
    pos, _ = maximin_oracle(env, PARAMS, 20.0, 3)
    assert np.min(np.abs(pos[1:-1] - 15.0)) <= 0.051


def test_oracle_input_validation():
    env = straight_corridor()
    with pytest.raises(ValueError):
        maximin_oracle(env, PARAMS, 10.0, 0)
    with pytest.raises(ValueError):
        maximin_oracle(env, PARAMS, -1.0, 2)
    with pytest.raises(ValueError):
        maximin_oracle(env, PARAMS, 99.0, 2)
    with pytest.raises(InfeasibleGridError):
        maximin_oracle(env, PARAMS, 1.0, 3, resolution=0.5)


# ---------------------------------------------------------- equalization rule

def test_equalization_rejects_disordered_input():
    with pytest.raises(ValueError):
        equalization_rounds([0.0, 5.0, 3.0, 10.0])


def test_equalization_reaches_even_spacing():
    x, trace, rounds = equalization_rounds([0.0, 1.0, 2.0, 30.0])
    assert np.allclose(np.diff(x), 10.0, atol=0.01)
    assert rounds < 100_000


def test_equalization_min_quality_nondecreasing():
    _, trace, _ = equalization_rounds([0.0, 0.5, 1.5, 4.0, 30.0])
    diffs = np.diff(trace)
    assert np.all(diffs >= -1e-9)


def test_equalization_fixed_point_is_stable():
    x, trace, rounds = equalization_rounds([0.0, 10.0, 20.0, 30.0])
    assert rounds == 0
    assert np.allclose(x, [0.0, 10.0, 20.0, 30.0])


@settings(max_examples=50, deadline=None)
@given(
    st.integers(1, 6),
    st.randoms(use_true_random=False),
)
def test_equalization_always_converges(n_relays, rnd):
    interior = sorted(rnd.uniform(0.1, 29.9) for _ in range(n_relays))
    x0 = np.array([0.0, *interior, 30.0])
    x, trace, rounds = equalization_rounds(x0, tol=1e-3)
    links = -np.diff(x)
    assert links.max() - links.min() <= 1e-3
    assert np.all(np.diff(trace) >= -1e-9)
    # endpoints pinned, order preserved
    assert x[0] == 0.0 and x[-1] == 30.0
    assert np.all(np.diff(x) >= 0.0)
