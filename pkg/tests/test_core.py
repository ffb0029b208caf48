import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from photon_bec.core import (
    CONST,
    EV,
    CavityGeometry,
    MaterialParams,
    PhysConstants,
    PulseSpec,
    check_pairing,
    cutoff_frequency,
    density_from_intensity,
    derive_scales,
    dispersion,
    effective_mass,
    injection_peak_power,
    intensity_from_density,
    peak_power,
    thermal_density_limit,
    time_scales,
)
from photon_bec.errors import DomainError, ValidationError

MAT = MaterialParams()
GEOM = CavityGeometry()


def test_constants_consistent():
    assert abs(CONST.h / (2 * math.pi * CONST.hbar) - 1) < 1e-12
    with pytest.raises(ValidationError):
        PhysConstants(hbar=-1.0)


@pytest.mark.parametrize("kwargs", [dict(n0=1.0), dict(n2=-1e-20), dict(alpha=-1.0), dict(heat_capacity=0.0),
                                    dict(raman_gain=-1.0)])
def test_material_invariants(kwargs):
    with pytest.raises(ValidationError):
        MaterialParams(**kwargs)


def test_geometry_invariants():
    with pytest.raises(ValidationError):
        CavityGeometry(L=0.0)
    with pytest.raises(ValidationError):
        CavityGeometry(finesse=0.5)
    with pytest.raises(ValidationError):
        CavityGeometry(dimensionality="Bandgap3D")
    with pytest.raises(ValidationError):
        CavityGeometry(dimensionality="Bandgap3D", L_long=1e-7)
    with pytest.raises(ValidationError):
        check_pairing(MAT, CavityGeometry(cladding_index=1.5))


def test_pump_below_cutoff():
    with pytest.raises(DomainError, match="pump below cutoff"):
        check_pairing(MAT, GEOM, PulseSpec(lambda_p=1.6e-6))


def test_cutoff_frequency_examples():
    omega_0, lambda_0 = cutoff_frequency(MAT, GEOM)
    assert lambda_0 == pytest.approx(1.5e-6, rel=1e-3)
    assert omega_0 == pytest.approx(2 * math.pi * CONST.c / lambda_0, rel=1e-12)
    assert omega_0 == pytest.approx(1.256e15, rel=1e-3)
    omega_2L, _ = cutoff_frequency(MAT, CavityGeometry(L=2 * GEOM.L))
    assert omega_2L == pytest.approx(omega_0 / 2, rel=1e-12)


def test_effective_mass_examples():
    m = effective_mass(MAT, GEOM)
    # hbar*pi*n0/(L c) by hand
    assert m == pytest.approx(1.054571817e-34 * math.pi * 1.44 / (5.208e-7 * 299792458.0), rel=1e-9)
    assert m == pytest.approx(3.0e-36, rel=0.03)
    assert 0.5 < m * CONST.c**2 / EV < 2 * 1.7
    assert effective_mass(MAT, CavityGeometry(L=2 * GEOM.L)) == pytest.approx(m / 2, rel=1e-12)


def test_dispersion_examples():
    omega_0, _ = cutoff_frequency(MAT, GEOM)
    e0 = CONST.hbar * omega_0
    assert dispersion(0.0, MAT, GEOM, "Exact") == e0
    assert dispersion(0.0, MAT, GEOM, "Quadratic") == e0
    k = 0.1 * math.pi / GEOM.L
    ex, qu = dispersion(k, MAT, GEOM, "Exact"), dispersion(k, MAT, GEOM, "Quadratic")
    assert abs(ex - qu) / ex < 1e-4
    assert dispersion(math.pi / GEOM.L, MAT, GEOM, "Exact") == pytest.approx(math.sqrt(2) * e0, rel=1e-14)


@given(st.floats(1e-3, 0.999))
def test_dispersion_taylor_bound(x):
    k = x * math.pi / GEOM.L
    ex, qu = dispersion(k, MAT, GEOM, "Exact"), dispersion(k, MAT, GEOM, "Quadratic")
    assert qu >= ex
    assert abs(ex - qu) / ex < x**4


def test_time_scales_examples():
    tau_cav, tau_abs, delta_omega = time_scales(MAT, GEOM)
    assert tau_cav == pytest.approx(2.5e-9, rel=0.05)
    assert time_scales(MAT, CavityGeometry(finesse=1e3))[0] == pytest.approx(2.5e-12, rel=0.05)
    assert tau_abs == pytest.approx(1 / (5e-5 * 299792458.0), rel=1e-12)
    assert tau_abs == pytest.approx(6.67e-5, rel=1e-3)
    assert abs(delta_omega * tau_cav - 1) < 1e-12
    assert time_scales(MaterialParams(alpha=0.0), GEOM)[1] == math.inf


def test_intensity_examples():
    omega_0, _ = cutoff_frequency(MAT, GEOM)
    intensity = intensity_from_density(1e26, omega_0, MAT)
    assert intensity == pytest.approx(1e26 * CONST.hbar * omega_0 * CONST.c / 1.44, rel=1e-12)
    assert intensity == pytest.approx(2.8e15, rel=0.05)
    assert 2e16 / 10 < intensity < 2e16 * 10
    assert intensity_from_density(2e26, omega_0, MAT) == pytest.approx(2 * intensity, rel=1e-15)
    assert peak_power(intensity, GEOM) == pytest.approx(intensity * 1e-10)


def test_injection_power_is_intensity_times_area_over_finesse():
    omega = 1.9e15
    geom = CavityGeometry(finesse=1e3)
    tau_cav = time_scales(MAT, geom)[0]
    p = injection_peak_power(1e26, omega, geom, tau_cav)
    assert p == pytest.approx(intensity_from_density(1e26, omega, MAT) * geom.transverse_area / geom.finesse,
                              rel=1e-12)


@given(st.floats(20, 30), st.floats(1e14, 1e16))
def test_density_intensity_round_trip(log_rho, omega):
    rho = 10.0**log_rho
    back = density_from_intensity(intensity_from_density(rho, omega, MAT), omega, MAT)
    assert abs(back - rho) / rho < 1e-12


def test_thermal_density_limit_examples():
    omega_0, _ = cutoff_frequency(MAT, GEOM)
    rho_l = thermal_density_limit(MAT, 1.0, omega_0)
    assert rho_l == pytest.approx(1.5e25, rel=0.02)
    assert 2e25 / 2 < rho_l < 2e25 * 2
    assert thermal_density_limit(MAT, 2.0, omega_0) == pytest.approx(2 * rho_l, rel=1e-15)
    omega_1um = 2 * math.pi * CONST.c / 1.0e-6
    assert thermal_density_limit(MAT, 1.0, omega_1um) == pytest.approx(
        2e6 * 1.0 / (CONST.hbar * omega_1um), rel=1e-12)
    assert thermal_density_limit(MAT, 1.0, omega_1um) == pytest.approx(1.0e25, rel=0.02)


@pytest.mark.parametrize("s", [0.5, 2.0, 10.0])
def test_scale_covariance(s):
    base = derive_scales(MAT, GEOM, PulseSpec(lambda_p=0.5e-6))
    scaled = derive_scales(MAT, CavityGeometry(L=s * GEOM.L), PulseSpec(lambda_p=0.5e-6))
    assert scaled.m_eff == pytest.approx(base.m_eff / s, rel=1e-12)
    assert scaled.tau_cav == pytest.approx(base.tau_cav * s, rel=1e-12)
    assert all(v > 0 for v in scaled.as_dict().values())


def test_derived_scales_positive_and_ordered():
    d = derive_scales(MAT, GEOM, PulseSpec())
    assert d.omega_p > d.omega_0
    assert d.lambda_escape == pytest.approx(d.lambda_0 / 1.44)
    assert np.all(np.array(list(d.as_dict().values())) > 0)
