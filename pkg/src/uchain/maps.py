"""Bundled tunnel maps and the environment file format.

Three constructed analogs are shipped: a 30 m straight corridor, an L-corridor
(two 15 m legs) and an S-corridor (three 10 m legs), all 1.5 m wide. Environment
files are YAML documents with `walls` (list of [[x1,y1],[x2,y2]]), `centerline`
(list of [x,y], base end first) and `spawn` ([x, y, heading_rad]).
"""

from __future__ import annotations

import math
from pathlib import Path

import yaml

from .geometry import Environment, Pose


def straight_corridor() -> Environment:
    """30 m straight tunnel, 1.5 m wide, base at the west end."""
    walls = [
        [[-0.75, -0.75], [30.75, -0.75]],
        [[-0.75, 0.75], [30.75, 0.75]],
        [[-0.75, -0.75], [-0.75, 0.75]],
        [[30.75, -0.75], [30.75, 0.75]],
    ]
    centerline = [[0.0, 0.0], [30.0, 0.0]]
    return Environment("straight30", walls, centerline, Pose(0.0, 0.0, 0.0))


def l_corridor() -> Environment:
    """Two 15 m legs joined by a 90 degree left turn; corner abscissa 15 m."""
    walls = [
        # outer boundary
        [[-0.75, -0.75], [15.75, -0.75]],
        [[15.75, -0.75], [15.75, 15.75]],
        # inner boundary
        [[-0.75, 0.75], [14.25, 0.75]],
        [[14.25, 0.75], [14.25, 15.75]],
        # end caps
        [[-0.75, -0.75], [-0.75, 0.75]],
        [[14.25, 15.75], [15.75, 15.75]],
    ]
    centerline = [[0.0, 0.0], [15.0, 0.0], [15.0, 15.0]]
    return Environment("l_corridor", walls, centerline, Pose(0.0, 0.0, 0.0))


def s_corridor() -> Environment:
    """Three 10 m legs (east, north, east); corners at abscissae 10 and 20 m."""
    walls = [
        [[-0.75, -0.75], [10.75, -0.75]],
        [[10.75, -0.75], [10.75, 9.25]],
        [[10.75, 9.25], [20.75, 9.25]],
        [[-0.75, 0.75], [9.25, 0.75]],
        [[9.25, 0.75], [9.25, 10.75]],
        [[9.25, 10.75], [20.75, 10.75]],
        [[-0.75, -0.75], [-0.75, 0.75]],
        [[20.75, 9.25], [20.75, 10.75]],
    ]
    centerline = [[0.0, 0.0], [10.0, 0.0], [10.0, 10.0], [20.0, 10.0]]
    return Environment("s_corridor", walls, centerline, Pose(0.0, 0.0, 0.0))


BUNDLED = {
    "straight30": straight_corridor,
    "l_corridor": l_corridor,
    "s_corridor": s_corridor,
}


def load_environment(source: str | Path) -> Environment:
    """Resolve a bundled map name or load an environment YAML file."""
    if str(source) in BUNDLED:
        return BUNDLED[str(source)]()
    path = Path(source)
    if not path.exists():
        raise FileNotFoundError(
            f"unknown environment {source!r}; bundled maps: {sorted(BUNDLED)}"
        )
    doc = yaml.safe_load(path.read_text())
    sx, sy, sh = doc["spawn"]
    return Environment(
        name=doc.get("name", path.stem),
        walls=doc["walls"],
        centerline=doc["centerline"],
        spawn=Pose(float(sx), float(sy), float(sh)),
    )


def save_environment(env: Environment, path: str | Path) -> None:
    doc = {
        "name": env.name,
        "walls": [[list(map(float, p)) for p in w] for w in env.walls],
        "centerline": [list(map(float, p)) for p in env.centerline],
        "spawn": [env.spawn.x, env.spawn.y, env.spawn.heading],
    }
    Path(path).write_text(yaml.safe_dump(doc, sort_keys=False))
