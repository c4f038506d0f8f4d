import math

import numpy as np
import pytest

from uchain.agent import AgentMode
from uchain.config import DECISION_DT, config_from_dict
from uchain.engine import (
    LOG_COLUMNS,
    TAKEOFF_TICKS,
    World,
    run_scenario,
    write_log_csv,
)

QUIET_RADIO = {"noise_variance": 0.0, "packet_loss_prob": 0.0}


def make_cfg(**over):
    doc = {
        "environment": "straight30",
        "horizon_s": 60.0,
        "head": {"speed": 0.2, "duration_s": 40.0},
        "agents": {"relays": 3},
    }
    doc.update(over)
    return config_from_dict(doc)


def test_world_builds_chain_and_reserve():
    w = World(make_cfg(), seed=0)
    assert w.chain == [0, 4]                 # head and base only at start
    assert w.idle_queue == [1, 2, 3]
    assert w.head.mode is AgentMode.HEAD
    assert w.base.mode is AgentMode.BASE


def test_same_seed_reproduces_every_log_row():
    cfg = make_cfg(horizon_s=30.0)
    w1, _ = run_scenario(cfg, seed=5)
    w2, _ = run_scenario(cfg, seed=5)
    assert w1.log_rows == w2.log_rows


def test_different_seeds_diverge():
    cfg = make_cfg(horizon_s=30.0)
    w1, _ = run_scenario(cfg, seed=5)
    w2, _ = run_scenario(cfg, seed=6)
    assert w1.log_rows != w2.log_rows


def test_scripted_head_advances_then_stops():
    cfg = make_cfg(horizon_s=50.0, radio=QUIET_RADIO)
    w, _ = run_scenario(cfg, seed=1)
    assert w.head.abscissa == pytest.approx(0.2 * 40.0, abs=0.3)
    assert w.head.forward_v == 0.0


def test_fixed_head_hovers():
    cfg = make_cfg(head={"mode": "fixed", "abscissa": 12.0}, horizon_s=10.0)
    w, _ = run_scenario(cfg, seed=0)
    assert w.head.abscissa == pytest.approx(12.0, abs=0.1)


def test_random_placement_needs_fixed_head():
    cfg = make_cfg(agents={"relays": 3, "placement": "random"})
    with pytest.raises(ValueError):
        World(cfg, seed=0)


def test_random_placement_spreads_relays():
    cfg = make_cfg(
        head={"mode": "fixed", "abscissa": 20.0},
        agents={"relays": 3, "placement": "random"},
    )
    w = World(cfg, seed=3)
    assert w.chain == [0, 1, 2, 3, 4]
    xs = [w.agents[i].abscissa for i in w.chain]
    assert all(a >= b - 1e-9 for a, b in zip(xs, xs[1:]))   # head-first order


def test_launch_fires_and_relay_joins_chain():
    # a -16 threshold makes the uplink launch-worthy within a few meters
    cfg = make_cfg(horizon_s=60.0, radio={"s_min": -16.0})
    w, m = run_scenario(cfg, seed=2)
    assert m.launch_events, "head walked 8 m; a relay launch was due"
    tick, aid = m.launch_events[0]
    assert aid == 1
    assert aid in w.chain
    # the command takes effect next tick; takeoff then lasts TAKEOFF_TICKS
    trace = w.abscissa_traces[aid]
    first_live = next(i for i, v in enumerate(trace) if not math.isnan(v))
    assert first_live == tick + TAKEOFF_TICKS


def test_launches_are_sequential_from_the_reserve():
    cfg = make_cfg(horizon_s=120.0, radio={"s_min": -16.0},
                   agents={"relays": 4})
    _, m = run_scenario(cfg, seed=4)
    launched = [aid for _, aid in m.launch_events]
    assert launched == sorted(launched)


def test_chain_order_and_walls_respected():
    cfg = make_cfg(horizon_s=90.0, environment="l_corridor",
                   head={"speed": 0.2, "duration_s": 70.0})
    _, m = run_scenario(cfg, seed=11)
    assert m.faults == []


def test_head_stops_when_uplink_weak():
    # with a -20 threshold the head cannot stray past ~10 m from the base
    cfg = make_cfg(
        horizon_s=90.0,
        radio={"s_min": -20.0, **QUIET_RADIO},
        head={"speed": 0.2, "duration_s": 90.0},
        agents={"relays": 0},
    )
    w, _ = run_scenario(cfg, seed=0)
    assert w.head.abscissa < 10.5
    assert w.head.forward_v == 0.0


def test_noiseless_run_converges_with_equal_links():
    cfg = make_cfg(horizon_s=90.0, radio=QUIET_RADIO,
                   head={"speed": 0.2, "duration_s": 50.0})
    w, m = run_scenario(cfg, seed=0)
    assert m.converged
    assert m.faults == []
    qs = [w.policy_value(a.base_ch) for a in w.chain_agents()[:-1]]
    assert max(qs) - min(qs) < 2.0


def test_stop_on_convergence_shortens_run():
    cfg = make_cfg(horizon_s=300.0,
                   radio={"s_min": -16.0, **QUIET_RADIO},
                   stop_on_convergence=True,
                   head={"speed": 0.2, "duration_s": 40.0})
    w, m = run_scenario(cfg, seed=0)
    assert w.time_s < 300.0
    assert len(w.chain) > 2    # stopped only once a relay chain equalized


def test_metrics_clock_starts_at_head_stop():
    cfg = make_cfg(horizon_s=70.0, radio=QUIET_RADIO,
                   head={"speed": 0.2, "duration_s": 50.0})
    _, m = run_scenario(cfg, seed=0)
    # relative to the head stopping at t=50, not to t=0
    assert m.convergence_time_s is not None
    assert 0.0 <= m.convergence_time_s <= 20.0


def test_log_csv_round_trip(tmp_path):
    cfg = make_cfg(horizon_s=5.0)
    w, _ = run_scenario(cfg, seed=0)
    out = tmp_path / "run.csv"
    write_log_csv(w, out)
    import csv

    with open(out, newline="") as f:
        rows = list(csv.reader(f))
    assert tuple(rows[0]) == LOG_COLUMNS
    assert len(rows) - 1 == len(w.log_rows)
    ticks = {int(r[0]) for r in rows[1:]}
    assert ticks == set(range(25))
