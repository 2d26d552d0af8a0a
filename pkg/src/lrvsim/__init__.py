"""Discrete-event, agent-based simulation of long-route freight trips and their help services."""

from .config import ConfigError, ScenarioConfig, cpec_config, load_scenario
from .engine import EventKind, RandomSource, SimEvent, Simulator
from .planning import plan_trip_time
from .report import emit_trace, metrics_from_trace, parse_trace, report
from .world import World, run

__all__ = [
    "ConfigError",
    "EventKind",
    "RandomSource",
    "ScenarioConfig",
    "SimEvent",
    "Simulator",
    "World",
    "cpec_config",
    "emit_trace",
    "load_scenario",
    "metrics_from_trace",
    "parse_trace",
    "plan_trip_time",
    "report",
    "run",
]
