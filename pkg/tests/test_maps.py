import numpy as np
import pytest

from uchain.geometry import raycast_ranges
from uchain.maps import (
    BUNDLED,
    l_corridor,
    load_environment,
    s_corridor,
    save_environment,
    straight_corridor,
)


def test_bundled_names_resolve():
    for name in BUNDLED:
        env = load_environment(name)
        assert env.name == name


def test_unknown_environment_raises():
    with pytest.raises(FileNotFoundError, match="bundled maps"):
        load_environment("no_such_map")


def test_spawn_is_inside_every_map():
    for make in (straight_corridor, l_corridor, s_corridor):
        env = make()
        rg = raycast_ranges(env, env.spawn)
        # the spawn pose must see a wall on each side, not open space
        assert min(rg.d_nw, rg.d_ne, rg.d_sw, rg.d_se) > 0.0


def test_corridor_width_is_uniform():
    env = straight_corridor()
    ys = [w for seg in env.walls for p in seg for w in [p[1]] if abs(p[0]) < 31]
    assert max(ys) - min(ys) == pytest.approx(1.5)


def test_corner_abscissae():
    assert np.allclose(l_corridor().point_at_arc(15.0), [15.0, 0.0])
    assert np.allclose(s_corridor().point_at_arc(10.0), [10.0, 0.0])
    assert np.allclose(s_corridor().point_at_arc(20.0), [10.0, 10.0])


def test_save_load_round_trip(tmp_path):
    env = s_corridor()
    path = tmp_path / "custom.yaml"
    save_environment(env, path)
    back = load_environment(path)
    assert back.name == env.name
    assert np.allclose(back.walls, env.walls)
    assert np.allclose(back.centerline, env.centerline)
    assert (back.spawn.x, back.spawn.y, back.spawn.heading) == (
        env.spawn.x, env.spawn.y, env.spawn.heading,
    )
    assert back.length == pytest.approx(env.length)


def test_loaded_file_name_defaults_to_stem(tmp_path):
    env = straight_corridor()
    path = tmp_path / "mine.yaml"
    save_environment(env, path)
    doc = path.read_text().replace("name: straight30\n", "")
    path.write_text(doc)
    assert load_environment(path).name == "mine"
