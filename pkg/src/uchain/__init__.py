"""U-Chain: a deterministic 2-D simulator and coordination library for chains
of flying relay robots in tunnels."""

__version__ = "0.1.0"

from .agent import AgentMode, ChainDecision, PolicyParams
from .config import ScenarioConfig, config_from_dict, load_config
from .engine import World, run_scenario
from .estimator import KalmanParams, LinkEstimate
from .geometry import Environment, Pose, RangeReadings
from .maps import load_environment
from .metrics import Metrics
from .radio import RadioParams, RadioSample

__all__ = [
    "AgentMode", "ChainDecision", "PolicyParams", "ScenarioConfig",
    "config_from_dict", "load_config", "World", "run_scenario",
    "KalmanParams", "LinkEstimate", "Environment", "Pose", "RangeReadings",
    "load_environment", "Metrics", "RadioParams", "RadioSample",
]
