import numpy as np
import pytest

from imodleach.model import NetworkConfig, Position, ProtocolParams, SimState


def make_state(positions, sink=(0.0, 0.0), **protocol):
    """SimState with hand-placed nodes, for frame-level oracles."""
    config = NetworkConfig(node_count=len(positions), protocol=ProtocolParams(**protocol))
    xs = np.array([float(p[0]) for p in positions])
    ys = np.array([float(p[1]) for p in positions])
    return SimState(config, xs, ys, Position(*sink))


@pytest.fixture
def small_state():
    return make_state


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-lifetime multi-seed simulations")
