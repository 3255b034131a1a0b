"""Shared fixtures: the bundled four-bus network and simulated relay windows."""

from pathlib import Path

import pytest

from incrrelay import FaultSpec, fourbus_path, parse_network, simulate


@pytest.fixture(scope="session")
def net():
    return parse_network(Path(fourbus_path()).read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def scenario_ag(net):
    """Mid-line ag fault at half the maximum resistance."""
    return simulate(net, FaultSpec("ag", 0.5, 0.5, net.r_fault_max))


@pytest.fixture(scope="session")
def window_ag(scenario_ag):
    return scenario_ag.window


@pytest.fixture(scope="session")
def scenario_ab(net):
    return simulate(net, FaultSpec("ab", 0.5, 0.5, net.r_fault_max))


@pytest.fixture(scope="session")
def window_ab(scenario_ab):
    return scenario_ab.window
