import os
import sys

import pytest

# Add the repository root to the path
sys.path.append(os.path.join(os.path.dirname(__file__), ".."))

from mip_sim.network import NetworkConfig, Point, build_topology, deploy_connected, deployment_from_positions
from mip_sim.params import AgentParams, EnergyParams

SINK = Point(500.0, 250.0)

# Seven sources laid out so that LCF from the sink visits 1..7 in order and
# node 4 is the farthest; node 0 is a relay.
CLONE_LAYOUT = [
    Point(500.0, 220.0),  # 0 relay
    Point(530.0, 250.0),  # 1
    Point(560.0, 250.0),  # 2
    Point(590.0, 250.0),  # 3
    Point(620.0, 250.0),  # 4 FSN
    Point(600.0, 280.0),  # 5
    Point(570.0, 290.0),  # 6
    Point(540.0, 300.0),  # 7
]


@pytest.fixture
def params():
    return AgentParams()


@pytest.fixture
def energy():
    return EnergyParams()


@pytest.fixture
def clone_layout():
    deployment = deployment_from_positions(CLONE_LAYOUT, SINK, sources=range(1, 8))
    return deployment, build_topology(deployment, 60.0)


@pytest.fixture(scope="session")
def default_network():
    """Full-size default deployment and its topology"""
    return deploy_connected(NetworkConfig(), rng_seed=11)
