"""Discrete-round simulator for LEACH, MODLEACH and iMODLEACH clustering."""

from imodleach.model import (
    ConfigError,
    NetworkConfig,
    NodeState,
    Position,
    ProtocolParams,
    RadioParams,
    SimState,
    SinkPosition,
    build_network,
    sink_coordinates,
)
from imodleach.metrics import RoundRecord, SimSummary, summarize
from imodleach.protocol import run_simulation, simulate_round

__all__ = [
    "ConfigError",
    "NetworkConfig",
    "NodeState",
    "Position",
    "ProtocolParams",
    "RadioParams",
    "RoundRecord",
    "SimState",
    "SimSummary",
    "SinkPosition",
    "build_network",
    "run_simulation",
    "simulate_round",
    "sink_coordinates",
    "summarize",
]
