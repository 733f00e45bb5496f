"""Einstein-solid thermodynamics: closed forms vs direct sums and duals."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncplane import duals, thermo
from ncplane.params import NCParams
from ncplane.thermo import ThermoParams


P = NCParams(m=1.3, omega=0.9, theta=0.4)
TP = ThermoParams(nc=P, N=3)


def _tp(theta, m=1.0, omega=1.0, N=1, hbar=1.0, kB=1.0):
    return ThermoParams(nc=NCParams(m=m, omega=omega, theta=theta,
                                    hbar=hbar, kB=kB), N=N)


def test_level_scales_literals():
    # m = omega = hbar = 1, theta = 2: u = 1, so a = sqrt(2), b = 1
    a, b = thermo.level_scales(NCParams(m=1.0, omega=1.0, theta=2.0))
    assert a == pytest.approx(math.sqrt(2.0), rel=1e-15)
    assert b == pytest.approx(1.0, rel=1e-15)


def test_level_scale_identity():
    # a^2 - b^2 = (hbar omega)^2 regardless of theta
    for theta in (0.0, 0.7, 2.5, -1.2):
        p = NCParams(m=1.7, omega=0.6, theta=theta, hbar=0.9)
        a, b = thermo.level_scales(p)
        assert a * a - b * b == pytest.approx((p.hbar * p.omega) ** 2, rel=1e-14)


def test_partition_matches_direct_sum_on_grid():
    temps = np.logspace(math.log10(0.1), math.log10(5.0), 20)
    thetas = np.linspace(0.0, 2.0, 20)
    for theta in thetas:
        tp = _tp(float(theta))
        for T in temps:
            z = thermo.partition_single(float(T), tp)
            zd = thermo.partition_single_direct(float(T), tp)
            assert abs(z - zd) <= 1e-12 * zd


def test_partition_direct_sum_low_temperature_branch():
    # a beta ~ 40 exercises the scaled logarithm
    tp = _tp(0.5)
    T = 0.025
    z = thermo.partition_single(T, tp)
    zd = thermo.partition_single_direct(T, tp)
    assert abs(z - zd) <= 1e-12 * zd
    assert thermo.log_partition_single(T, tp) == pytest.approx(math.log(zd),
                                                               rel=1e-12)


def test_commutative_partition_geometric_form():
    # theta = 0 reduces to two modes: Z1 = x / (1 - x)^2 with x = e^{-beta hw}
    tp = _tp(0.0, m=2.0, omega=1.5, hbar=0.7)
    for T in (0.2, 0.9, 3.0):
        x = math.exp(-tp.nc.hbar * tp.nc.omega / (tp.nc.kB * T))
        assert thermo.partition_single(T, tp) == pytest.approx(
            x / (1.0 - x) ** 2, rel=1e-14)


def test_commutative_internal_energy_coth_form():
    tp = _tp(0.0, m=2.0, omega=1.5, hbar=0.7, N=4)
    for T in (0.3, 1.1):
        half = tp.nc.hbar * tp.nc.omega / (2.0 * tp.nc.kB * T)
        expected = tp.N * tp.nc.hbar * tp.nc.omega / math.tanh(half)
        assert thermo.internal_energy(T, tp) == pytest.approx(expected, rel=1e-13)


def test_partition_even_in_theta():
    for T in (0.2, 1.0, 3.0):
        for theta in (0.5, 1.7):
            zp = thermo.partition_single(T, _tp(theta))
            zm = thermo.partition_single(T, _tp(-theta))
            assert abs(zp - zm) <= 1e-12 * zp


def test_high_temperature_internal_energy():
    p, tp = P, TP
    for T in (50.0, 200.0):
        lead = 2.0 * tp.N * p.kB * T
        corr = (p.hbar ** 2 * p.omega ** 2 * tp.N
                * (2.0 + p.m ** 2 * p.omega ** 2 * p.theta ** 2)
                / (12.0 * p.kB * T))
        U = thermo.internal_energy(T, tp)
        assert abs(U - (lead + corr)) <= 1e-6 * U


def test_low_temperature_internal_energy():
    # U/N -> a = hbar omega sqrt(1 + (m omega theta)^2 / 4)
    p, tp = P, TP
    u = (p.m * p.omega * p.theta) ** 2 / 4.0
    a = p.hbar * p.omega * math.sqrt(1.0 + u)
    for T in (0.01, 0.005):
        assert thermo.internal_energy(T, tp) / tp.N == pytest.approx(a, rel=1e-10)


def test_entropy_matches_dual_derivative_of_free_energy():
    for T0 in (0.02, 0.11, 0.7, 4.6, 40.0):
        ds = -duals.derivative(lambda T: thermo.free_energy(T, TP), T0)
        s = thermo.entropy(T0, TP)
        assert s == pytest.approx(ds, rel=1e-9, abs=1e-12)


def test_heat_capacity_matches_dual_derivative_of_energy():
    for T0 in (0.11, 0.7, 4.6, 40.0, 500.0):
        dc = duals.derivative(lambda T: thermo.internal_energy(T, TP), T0)
        assert thermo.heat_capacity(T0, TP) == pytest.approx(dc, rel=1e-9)


def test_heat_capacity_equals_T_dS_dT():
    for T0 in (0.2, 0.9, 3.7, 25.0):
        ds = duals.derivative(lambda T: thermo.entropy(T, TP), T0)
        assert thermo.heat_capacity(T0, TP) == pytest.approx(T0 * ds, rel=1e-8)


def test_heat_capacity_nonnegative_and_equipartition():
    for T in np.logspace(-4, 4, 60):
        assert thermo.heat_capacity(float(T), TP) >= 0.0
    # 2 quadratic coordinate + 2 momentum modes per site
    assert thermo.heat_capacity(1e4, TP) == pytest.approx(
        2.0 * TP.N * P.kB, rel=1e-6)


def test_entropy_vanishes_at_zero_and_grows():
    assert 0.0 <= thermo.entropy(1e-3, TP) < 1e-12
    assert thermo.entropy(1e-4, TP) == 0.0
    Ts = np.logspace(-2, 2, 40)
    Ss = [thermo.entropy(float(T), TP) for T in Ts]
    assert all(b >= a for a, b in zip(Ss, Ss[1:]))


def test_entropy_increases_with_theta_at_low_temperature():
    h = 1e-5
    for T in (0.1, 0.2):
        for theta in (0.3, 1.0):
            sp = thermo.entropy(T, _tp(theta + h))
            sm = thermo.entropy(T, _tp(theta - h))
            assert (sp - sm) / (2.0 * h) > 0.0


def test_free_energy_sign_and_scaling_in_N():
    a1 = thermo.free_energy(0.8, _tp(0.3, N=1))
    a5 = thermo.free_energy(0.8, _tp(0.3, N=5))
    assert a5 == pytest.approx(5.0 * a1, rel=1e-14)


def test_boltzmann_weights_sum_to_one():
    tot = math.fsum(thermo.boltzmann_weight(n, j, 0.8, TP)
                    for n in range(80) for j in range(-n, n + 1, 2))
    assert tot == pytest.approx(1.0, abs=1e-12)


def test_boltzmann_weight_ratio_literal():
    # E(1,1) - E(0,0) = a - b, so the ratio is a pure exponential
    a, b = thermo.level_scales(P)
    T = 0.8
    beta = 1.0 / (P.kB * T)
    ratio = (thermo.boltzmann_weight(1, 1, T, TP)
             / thermo.boltzmann_weight(0, 0, T, TP))
    assert ratio == pytest.approx(math.exp(-beta * (a - b)), rel=1e-13)


def test_boltzmann_weight_ground_state_saturates():
    assert thermo.boltzmann_weight(0, 0, 1e-3, TP) == pytest.approx(1.0, abs=1e-15)


def test_thermo_point_fields_consistent():
    pt = thermo.thermo_point(0.9, TP)
    assert pt.T == 0.9 and pt.theta == P.theta
    assert pt.Z1 == pytest.approx(thermo.partition_single(0.9, TP), rel=1e-15)
    assert pt.S_per_NkB == pytest.approx(pt.S / (TP.N * P.kB), rel=1e-15)
    assert pt.U == pytest.approx(pt.A + pt.T * pt.S, rel=1e-12)


def test_thermo_point_rejects_inconsistent_rows():
    with pytest.raises(ValueError):
        thermo.ThermoPoint(T=1.0, theta=0.0, Z1=1.0, A=1.0, S=1.0,
                           U=5.0, Cv=1.0, S_per_NkB=1.0)
    with pytest.raises(ValueError):
        thermo.ThermoPoint(T=1.0, theta=0.0, Z1=1.0, A=1.0, S=1.0,
                           U=2.0, Cv=-1.0, S_per_NkB=1.0)


def test_entropy_sweep_rows_and_theta_cross():
    rows = thermo.entropy_sweep([0.5, 1.0], TP, thetas=[0.0, 0.5])
    assert [(r.T, r.theta) for r in rows] == [
        (0.5, 0.0), (1.0, 0.0), (0.5, 0.5), (1.0, 0.5)]
    plain = thermo.entropy_sweep([0.5, 1.0], TP)
    assert [r.theta for r in plain] == [P.theta, P.theta]


def test_parameter_validation():
    with pytest.raises(ValueError):
        ThermoParams(nc=P, N=0)
    with pytest.raises(ValueError):
        ThermoParams(nc=P, N=1.5)
    with pytest.raises(ValueError):
        ThermoParams(nc=P, N=True)
    with pytest.raises(ValueError):
        thermo.partition_single(0.0, TP)
    with pytest.raises(ValueError):
        thermo.internal_energy(-1.0, TP)
    with pytest.raises(ValueError):
        ThermoParams(nc=NCParams(m=1.0, omega=0.0, theta=0.1))


@settings(max_examples=60, deadline=None)
@given(T=st.floats(0.05, 50.0),
       theta=st.floats(0.0, 3.0),
       N=st.integers(1, 7))
def test_equation_of_state_rows_always_consistent(T, theta, N):
    # thermo_point enforces U = A + TS and Cv >= 0 on construction
    pt = thermo.thermo_point(T, _tp(theta, N=N))
    assert pt.Z1 > 0.0 and pt.S >= -1e-13
