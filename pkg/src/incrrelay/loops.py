"""Fault-loop quantities and apparent impedance.

Each fault type is measured on one of six loops. For ground loops the loop
current carries zero-sequence compensation so that a bolted fault reads
m_T * z1 exactly. The fault-resistance term projects the fault-bus voltage
onto the loop through the pseudoinverse of the normalized fault stamp; for
single-phase-to-ground and two-phase faults this reduces to the familiar
closed forms, and it stays exact for the multi-branch fault types.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import config
from .admittance import FAULT_TYPES, FaultSpec, normalized_stamp
from .network import Line
from .phasors import (
    GROUND_LOOPS,
    PSI,
    MeasurementWindow,
    Phasor3,
    incremental,
    loop_projection,
    zero_sequence,
)

# Loop used to measure each fault type. Multi-phase faults (with or without
# ground) are measured on the line-to-line loop of the involved phase pair;
# three-phase faults use the ab loop by convention.
LOOP_FOR_FAULT = {
    "ag": "ag",
    "bg": "bg",
    "cg": "cg",
    "ab": "ab",
    "ac": "ca",
    "bc": "bc",
    "abg": "ab",
    "acg": "ca",
    "bcg": "bc",
    "abc": "ab",
    "abcg": "ab",
}


class UnenergizedLoopError(ValueError):
    """The loop current denominator is below the floor; loop not energized."""


class DegenerateDenominatorError(UnenergizedLoopError):
    """The incremental loop current is (near) zero, e.g. a healthy window."""


@dataclass(frozen=True)
class LoopQuantities:
    """During-fault and incremental apparent voltage/current for one loop."""

    v_a: complex
    i_a: complex
    v_a_inc: complex
    i_a_inc: complex
    k: complex  # zero-sequence compensation factor of the protected line


def compensation_factor(line: Line) -> complex:
    return line.z0 / line.z1 - 1.0


def _loop_current(loop: str, i: Phasor3, k: complex) -> complex:
    cur = loop_projection(PSI[loop], i)
    if loop in GROUND_LOOPS:
        cur += k * zero_sequence(i)
    return cur


def loop_quantities(eta: str, w: MeasurementWindow, line: Line) -> LoopQuantities:
    """Apparent voltage/current for the loop matched to fault type ``eta``."""
    loop = LOOP_FOR_FAULT[eta]
    psi = PSI[loop]
    k = compensation_factor(line)
    v_inc = incremental(w.v_now, w.v_prev)
    i_inc = incremental(w.i_now, w.i_prev)
    return LoopQuantities(
        v_a=loop_projection(psi, w.v_now),
        i_a=_loop_current(loop, w.i_now, k),
        v_a_inc=loop_projection(psi, v_inc),
        i_a_inc=_loop_current(loop, i_inc, k),
        k=k,
    )


def fault_voltage_row(eta: str) -> np.ndarray:
    """Row vector c with psi_loop . v_F = m_f*r_f * (c . i_F).

    i_F is the total current into the fault network, and c projects it back
    to the loop voltage through the pseudoinverse of the normalized stamp.
    The loop selector lies in the stamp's range for the matching loop, so the
    projection is well defined.
    """
    if eta not in FAULT_TYPES:
        raise ValueError(f"unknown fault type {eta!r}")
    pinv = np.linalg.pinv(normalized_stamp(eta))
    return PSI[LOOP_FOR_FAULT[eta]] @ pinv


def _resistance_numerator(eta: str, w: MeasurementWindow, sigma: Phasor3) -> complex:
    i_l_inc = incremental(w.i_now, w.i_prev)
    phi = (i_l_inc + sigma).as_array()
    return complex(fault_voltage_row(eta) @ phi)


def apparent_impedance(
    eta: str,
    w: MeasurementWindow,
    line: Line,
    sigma: Phasor3 | None,
    m: FaultSpec,
) -> complex:
    """Apparent impedance of the matched loop for fault realization ``m``.

    A bolted fault (m_f = 0) reads the line impedance fraction exactly and
    needs neither the window nor the remote current.
    """
    if m.m_f == 0.0:
        return m.m_t * line.z1
    if sigma is None:
        raise ValueError("sigma is required for m_f > 0")
    lq = loop_quantities(eta, w, line)
    if abs(lq.i_a) <= config.I_MIN:
        raise UnenergizedLoopError(
            f"loop {LOOP_FOR_FAULT[eta]} current |{lq.i_a:.3e}| below floor"
        )
    num = _resistance_numerator(eta, w, sigma)
    return m.m_t * line.z1 + m.m_f * m.r_f * num / lq.i_a


def incremental_apparent_impedance(
    eta: str,
    w: MeasurementWindow,
    line: Line,
    sigma: Phasor3 | None,
    m: FaultSpec,
) -> complex:
    """Apparent impedance with the incremental loop current as denominator.

    Degenerates to 0/0 on healthy windows, which is reported as an error.
    """
    if m.m_f == 0.0:
        return m.m_t * line.z1
    if sigma is None:
        raise ValueError("sigma is required for m_f > 0")
    lq = loop_quantities(eta, w, line)
    if abs(lq.i_a_inc) <= config.I_MIN:
        raise DegenerateDenominatorError(
            f"incremental loop current |{lq.i_a_inc:.3e}| below floor"
        )
    num = _resistance_numerator(eta, w, sigma)
    # the incremental fault-point loop voltage keeps a prefault term: the
    # healthy line had a nonzero voltage at the fault location, recovered
    # here from the prefault half of the window
    v_f_prev = (lq.v_a - lq.v_a_inc) - m.m_t * line.z1 * (lq.i_a - lq.i_a_inc)
    return m.m_t * line.z1 + (m.m_f * m.r_f * num - v_f_prev) / lq.i_a_inc


def fault_resistance_direction(
    eta: str,
    w: MeasurementWindow,
    line: Line,
    sigma_hat: Phasor3,
    r_f: float,
) -> complex:
    """Fixed direction of the fault-resistance segment at m_f = 1.

    With the remote current frozen at a nominal fault point, the apparent
    impedance becomes m_t * z1 + m_f * w; this returns w.
    """
    lq = loop_quantities(eta, w, line)
    if abs(lq.i_a) <= config.I_MIN:
        raise UnenergizedLoopError(
            f"loop {LOOP_FOR_FAULT[eta]} current |{lq.i_a:.3e}| below floor"
        )
    return r_f * _resistance_numerator(eta, w, sigma_hat) / lq.i_a
