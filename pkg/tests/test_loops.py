"""Fault-loop quantities and the apparent-impedance closure."""

import numpy as np
import pytest

from incrrelay import (
    FAULT_TYPES,
    FaultSpec,
    Line,
    MeasurementWindow,
    Phasor3,
    apparent_impedance,
    build_omega_map,
    incremental_apparent_impedance,
    loop_quantities,
    remote_current,
    simulate,
)
from incrrelay.loops import (
    DegenerateDenominatorError,
    LOOP_FOR_FAULT,
    UnenergizedLoopError,
    compensation_factor,
    fault_resistance_direction,
)
from incrrelay.phasors import ALPHA

# k = z0/z1 - 1 = 1 for this line
K1_LINE = Line("l", "a", "b", 1j, 2j)


def _window(v_now, i_now):
    z = Phasor3.zero()
    return MeasurementWindow(z, z, v_now, i_now)


def test_ag_loop_quantities_with_unit_k():
    w = _window(Phasor3(0.8 + 0j, ALPHA**2, ALPHA), Phasor3(1 + 0j, 0j, 0j))
    lq = loop_quantities("ag", w, K1_LINE)
    assert lq.k == 1.0
    assert abs(lq.v_a - 0.8) < 1e-15
    assert abs(lq.i_a - (1 + 1 / 3)) < 1e-15  # zero sequence of (1,0,0) is 1/3


def test_ab_loop_quantities():
    v = Phasor3(1 + 0j, ALPHA**2, ALPHA)
    i = Phasor3(2 + 0j, -1 + 0j, 0j)
    lq = loop_quantities("ab", _window(v, i), K1_LINE)
    assert abs(lq.v_a - (1 - ALPHA**2)) < 1e-15
    assert abs(lq.i_a - 3) < 1e-15  # no k compensation on phase loops


def test_compensation_factor(net):
    line = net.protected
    assert compensation_factor(line) == line.z0 / line.z1 - 1.0


def test_fault_loop_assignment():
    assert set(LOOP_FOR_FAULT) == set(FAULT_TYPES)
    assert LOOP_FOR_FAULT["ac"] == "ca"
    assert LOOP_FOR_FAULT["abc"] == "ab"


def test_bolted_fault_is_exact(net):
    f = FaultSpec("ag", 0.7, 0.0, net.r_fault_max)
    z = apparent_impedance("ag", None, net.protected, None, f)
    assert z == 0.7 * net.protected.z1


def test_close_in_bolted_fault_is_near_zero(net):
    f = FaultSpec("ab", 1e-6, 0.0, net.r_fault_max)
    z = apparent_impedance("ab", None, net.protected, None, f)
    assert abs(z) <= 1e-6 * abs(net.protected.z1) * (1 + 1e-12)


def test_sigma_required_for_resistive_fault(net, window_ag):
    f = FaultSpec("ag", 0.5, 0.5, net.r_fault_max)
    with pytest.raises(ValueError):
        apparent_impedance("ag", window_ag, net.protected, None, f)


@pytest.mark.parametrize("eta", FAULT_TYPES)
def test_closure_formula_equals_measured_ratio(net, eta):
    # oracle: v_A / i_A computed purely from simulator measurements
    f = FaultSpec(eta, 0.5, 1.0, net.r_fault_max)
    sim = simulate(net, f)
    sigma = remote_current(build_omega_map(net, f), sim.window)
    z = apparent_impedance(eta, sim.window, net.protected, sigma, f)
    lq = loop_quantities(eta, sim.window, net.protected)
    want = lq.v_a / lq.i_a
    assert abs(z - want) <= 1e-9 * abs(want)


@pytest.mark.parametrize("eta", FAULT_TYPES)
def test_incremental_closure(net, eta):
    f = FaultSpec(eta, 0.3, 0.8, net.r_fault_max)
    sim = simulate(net, f)
    sigma = remote_current(build_omega_map(net, f), sim.window)
    z = incremental_apparent_impedance(eta, sim.window, net.protected, sigma, f)
    lq = loop_quantities(eta, sim.window, net.protected)
    want = lq.v_a_inc / lq.i_a_inc
    assert abs(z - want) <= 1e-9 * abs(want)


def test_prefault_loop_balance(net, scenario_ag):
    # the cancellation the derivation rests on: i_L + i_R = 0 before the fault
    total = scenario_ag.window.i_prev + scenario_ag.remote_window.i_prev
    assert total.norm() <= 1e-10 * scenario_ag.window.i_prev.norm()


def test_healthy_window_is_degenerate(net, window_ag):
    healthy = MeasurementWindow(
        window_ag.v_prev, window_ag.i_prev, window_ag.v_prev, window_ag.i_prev
    )
    f = FaultSpec("ag", 0.5, 0.5, net.r_fault_max)
    sigma = Phasor3.zero()
    with pytest.raises(DegenerateDenominatorError):
        incremental_apparent_impedance("ag", healthy, net.protected, sigma, f)


def test_unenergized_loop_raises(net):
    z = Phasor3.zero()
    dead = MeasurementWindow(z, z, z, z)
    f = FaultSpec("ag", 0.5, 0.5, net.r_fault_max)
    with pytest.raises(UnenergizedLoopError):
        apparent_impedance("ag", dead, net.protected, Phasor3.zero(), f)


def test_phase_permutation_covariance(net):
    # relabeling a->b->c->a and using the permuted loop gives the same value
    def rot(p: Phasor3) -> Phasor3:
        return Phasor3(p.c, p.a, p.b)

    f_ag = FaultSpec("ag", 0.5, 1.0, net.r_fault_max)
    sim = simulate(net, f_ag)
    sigma = remote_current(build_omega_map(net, f_ag), sim.window)
    z_ag = apparent_impedance("ag", sim.window, net.protected, sigma, f_ag)

    w_rot = MeasurementWindow(
        rot(sim.window.v_prev),
        rot(sim.window.i_prev),
        rot(sim.window.v_now),
        rot(sim.window.i_now),
    )
    f_bg = FaultSpec("bg", 0.5, 1.0, net.r_fault_max)
    z_bg = apparent_impedance("bg", w_rot, net.protected, rot(sigma), f_bg)
    assert abs(z_ag - z_bg) <= 1e-12 * abs(z_ag)


def test_resistance_direction_consistency(net):
    # with sigma frozen, z_A(m) = m_t * z1 + m_f * w must hold exactly
    f = FaultSpec("ag", 0.5, 1.0, net.r_fault_max)
    sim = simulate(net, f)
    sigma = remote_current(build_omega_map(net, f), sim.window)
    w_dir = fault_resistance_direction(
        "ag", sim.window, net.protected, sigma, net.r_fault_max
    )
    z = apparent_impedance("ag", sim.window, net.protected, sigma, f)
    want = f.m_t * net.protected.z1 + f.m_f * w_dir
    assert abs(z - want) <= 1e-12 * abs(z)
