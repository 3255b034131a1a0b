"""Selector maps and the incremental remote-current operator.

The remote-current map condenses the whole faulted-network solve into a 3x6
complex matrix acting on the relay's prefault measurements: it reconstructs
the prefault fault-bus voltage from the local window, pushes it through the
incremental system, and converts the voltage difference across the remote
segment into the incremental current feeding the fault from the remote end.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .admittance import (
    FaultSpec,
    assemble_incremental,
    assemble_y,
    fault_stamp,
    solve_omega,
)
from .network import BusRole, NetworkModel, phase_impedance
from .phasors import MeasurementWindow, Phasor3


def selector(net: NetworkModel, offsets: dict[str, int], bus_id: str) -> np.ndarray:
    """Row selector extracting bus ``bus_id``'s 3-block from the stacked state.

    Defined only for the virtual fault bus and non-SG buses: the SG slots of
    the stacked vector hold currents, not voltages.
    """
    if bus_id != "F" and net.bus(bus_id).role is BusRole.SG:
        raise ValueError(f"bus {bus_id!r} is an SG; its slot holds a current")
    size = 3 * (len(net.buses) + 1)
    d = np.zeros((3, size))
    off = 0 if bus_id == "F" else offsets[bus_id]
    d[:, off : off + 3] = np.eye(3)
    return d


@dataclass(frozen=True)
class RemoteCurrentMap:
    """3x6 operator on the stacked prefault window [v_prev; i_prev]."""

    omega: np.ndarray
    eta: str
    m_t: float
    m_f: float


def _remote_kcl_rows(net: NetworkModel, offsets: dict[str, int]) -> np.ndarray:
    """Row operator giving the incremental current into the protected line at R.

    Equivalent to dividing the voltage difference across the remote segment
    by its impedance, but expressed through the KCL balance at the remote
    bus: that form stays accurate when the segment shrinks to the clamp
    width and the voltage difference cancels catastrophically.
    """
    size = 3 * (len(net.buses) + 1)
    rows = np.zeros((3, size), dtype=complex)
    r_id = net.remote_bus
    bus = net.bus(r_id)
    d_r = selector(net, offsets, r_id)
    if bus.role is BusRole.JUNCTION:
        rows -= bus.shunt() @ d_r
    else:  # IBR: incremental source current is zero, Norton term remains
        rows += bus.shunt() @ d_r
    for line in net.lines:
        if line.id == net.protected_line:
            continue
        if line.from_bus == r_id:
            other = line.to_bus
        elif line.to_bus == r_id:
            other = line.from_bus
        else:
            continue
        w = np.linalg.inv(phase_impedance(line))
        rows -= w @ d_r
        if net.bus(other).role is not BusRole.SG:
            # SG incremental voltage is zero; its term drops
            rows += w @ selector(net, offsets, other)
    return rows


def build_omega_map(net: NetworkModel, fault: FaultSpec) -> RemoteCurrentMap:
    """Assemble and solve the incremental system, condensed to the relay window."""
    if fault.m_f <= 0.0:
        raise ValueError("remote-current map requires m_f > 0")
    m_t = fault.m_t
    faulted = assemble_y(net, m_t)
    stamp = fault_stamp(fault.eta, fault.m_f, fault.r_f)
    sys = assemble_incremental(net, faulted, stamp, m_t)
    omega = solve_omega(sys)

    z_abc = phase_impedance(net.protected)
    # prefault fault-bus voltage from the relay window: v_prev - m_t*Z*i_prev
    window_map = np.hstack([np.eye(3), -m_t * z_abc])
    omega_map = _remote_kcl_rows(net, faulted.offsets) @ omega @ window_map
    return RemoteCurrentMap(omega=omega_map, eta=fault.eta, m_t=m_t, m_f=fault.m_f)


def remote_current(rc_map: RemoteCurrentMap, w: MeasurementWindow) -> Phasor3:
    """Incremental current feeding the fault from the remote end.

    Depends only on the prefault half of the window; the during-fault
    measurements never enter.
    """
    stacked = np.concatenate([w.v_prev.as_array(), w.i_prev.as_array()])
    return Phasor3.from_array(rc_map.omega @ stacked)


class OmegaCache:
    """Per-network cache of remote-current maps over (eta, m) grid points."""

    def __init__(self, net: NetworkModel):
        self._net = net
        self._maps: dict[tuple, RemoteCurrentMap] = {}

    def get(self, fault: FaultSpec) -> RemoteCurrentMap:
        key = (fault.eta, fault.m_t, fault.m_f, fault.r_f)
        rc_map = self._maps.get(key)
        if rc_map is None:
            rc_map = build_omega_map(self._net, fault)
            self._maps[key] = rc_map
        return rc_map
