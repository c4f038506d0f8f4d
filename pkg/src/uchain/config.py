"""Scenario configuration: YAML files describing one experiment.

Schema (all keys optional unless noted, defaults shown):

    name: my_scenario          # used for output naming
    environment: straight30    # bundled map name or path to an environment file
    seed: 0
    replicates: 1
    horizon_s: 120.0
    variant: kalman            # t0 | t5 | kalman
    tolerance: null            # override T; defaults: t0 -> 0, t5 -> 5, kalman -> 0
    stop_on_convergence: false
    radio:
      alpha_base: 2.0          # path-loss exponent, free space
      alpha_max: 6.0           # cap reached after 4 blocking walls
      noise_variance: 3.0      # Gaussian measurement noise, dB^2
      packet_loss_prob: 0.2    # independent per-packet loss
      s_min: -55.0             # packet gating / retreat threshold
    kalman:
      A: -0.5                  # quality units per (m/s) of separation rate
      Q: 0.05
      R: 3.0
    policy:
      v_max: 0.5
      k_v: 0.05
      C_t: 1.0
      C_r: 1.5
      D: 0.75
      invalid_wall_ratio: 0.4
      launch_margin: 5.0
    head:
      mode: scripted           # scripted | fixed | interactive
      speed: 0.2               # m/s, scripted forward speed (also pilot speed)
      duration_s: 50.0         # scripted: stop after this long
      abscissa: 24.0           # fixed: where the head hovers
    agents:
      relays: 4                # relay UAV count
      placement: spawn         # spawn (idle reserve) | random (already flying)

The decision loop runs at 5 Hz; kinematics integrate at 50 Hz.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .agent import PolicyParams
from .estimator import KalmanParams
from .radio import RadioParams

DECISION_HZ = 5
DECISION_DT = 1.0 / DECISION_HZ
KINEMATIC_SUBSTEPS = 10

VARIANTS = ("t0", "t5", "kalman")
VARIANT_DEFAULT_T = {"t0": 0.0, "t5": 5.0, "kalman": 0.0}


class ConfigError(ValueError):
    pass


@dataclass
class HeadProfile:
    mode: str = "scripted"
    speed: float = 0.2
    duration_s: float = 50.0
    abscissa: float = 24.0


@dataclass
class AgentSetup:
    relays: int = 4
    placement: str = "spawn"


@dataclass
class ScenarioConfig:
    name: str = "scenario"
    environment: str = "straight30"
    environments: list[str] | None = None   # batch: run on each map
    variants: list[str] | None = None       # batch: run each policy variant
    seed: int = 0
    replicates: int = 1
    horizon_s: float = 120.0
    variant: str = "kalman"
    tolerance: float | None = None
    stop_on_convergence: bool = False
    radio: RadioParams = field(default_factory=RadioParams)
    kalman: KalmanParams = field(default_factory=KalmanParams)
    policy: PolicyParams = field(default_factory=PolicyParams)
    head: HeadProfile = field(default_factory=HeadProfile)
    agents: AgentSetup = field(default_factory=AgentSetup)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigError(f"variant must be one of {VARIANTS}")
        if self.variants is not None:
            bad = [v for v in self.variants if v not in VARIANTS]
            if bad:
                raise ConfigError(f"unknown variants {bad}")
        if self.replicates < 1:
            raise ConfigError("replicates must be >= 1")
        if self.horizon_s <= 0.0:
            raise ConfigError("horizon_s must be positive")
        if self.head.mode not in ("scripted", "fixed", "interactive"):
            raise ConfigError("head.mode must be scripted, fixed or interactive")
        if self.head.mode == "scripted" and self.head.speed > self.policy.v_max:
            raise ConfigError("scripted head speed exceeds v_max")
        if self.agents.placement not in ("spawn", "random"):
            raise ConfigError("agents.placement must be spawn or random")
        if self.agents.relays < 0:
            raise ConfigError("agents.relays must be >= 0")
        # the policy threshold follows the variant unless overridden
        t = self.tolerance if self.tolerance is not None else VARIANT_DEFAULT_T[self.variant]
        object.__setattr__(
            self, "policy",
            PolicyParams(
                T=t, v_max=self.policy.v_max, k_v=self.policy.k_v,
                C_t=self.policy.C_t, C_r=self.policy.C_r, D=self.policy.D,
                invalid_wall_ratio=self.policy.invalid_wall_ratio,
                s_min=self.radio.s_min, launch_margin=self.policy.launch_margin,
            ),
        )


def _build(doc: dict, source: str = "<config>") -> ScenarioConfig:
    doc = copy.deepcopy(doc)
    try:
        radio = RadioParams(**doc.pop("radio", {}))
        kalman = KalmanParams(**doc.pop("kalman", {}))
        policy = PolicyParams(**doc.pop("policy", {}))
        head = HeadProfile(**doc.pop("head", {}))
        agents = AgentSetup(**doc.pop("agents", {}))
        return ScenarioConfig(
            radio=radio, kalman=kalman, policy=policy, head=head, agents=agents,
            **doc,
        )
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{source}: {e}") from e


def load_config(path: str | Path, overrides: dict | None = None) -> ScenarioConfig:
    """Load a scenario YAML file, optionally applying flat overrides
    (seed, replicates, variant, ...)."""
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text())
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line = f" line {mark.line + 1}" if mark else ""
        raise ConfigError(f"{path}{line}: {e}") from e
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    doc.setdefault("name", path.stem)
    if overrides:
        doc.update({k: v for k, v in overrides.items() if v is not None})
    return _build(doc, str(path))


def config_from_dict(doc: dict) -> ScenarioConfig:
    return _build(dict(doc))


def expand_batch(cfg: ScenarioConfig) -> list[ScenarioConfig]:
    """Expand the environments/variants batch axes into concrete configs."""
    import dataclasses

    envs = cfg.environments or [cfg.environment]
    variants = cfg.variants or [cfg.variant]
    out = []
    for e in envs:
        for v in variants:
            out.append(dataclasses.replace(
                cfg, environment=e, variant=v, environments=None, variants=None,
                tolerance=cfg.tolerance if cfg.variants is None else None,
            ))
    return out
