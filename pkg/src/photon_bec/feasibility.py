"""Kinetic estimates and the photon-density feasibility windows.

Thermalization needs the collision time to be shorter than the cavity
confinement time; the absorbed photon number per pulse must stay below the
thermal-load limit. Together these bound the photon density from both sides.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from photon_bec.core import (
    CONST,
    CavityGeometry,
    Dimensionality,
    MaterialParams,
    angular_frequency,
    cutoff_frequency,
    effective_mass,
    intensity_from_density,
    injection_peak_power,
    time_scales,
)
from photon_bec.errors import DomainError, ValidationError
from photon_bec.nonlinearity import cross_section, parasitic_rates

MODE_DENSITY_3D_NOTE = (
    "3D mode density uses the quadratic-band state count "
    "2*(4*pi/3)*k_p^3/(2*pi)^3 with k_p^2 = 2*m*(omega_p - omega_0)/hbar"
)


@dataclass(frozen=True)
class FeasibilityReport:
    dimensionality: str
    rho_min: float
    rho_max: float
    feasible: bool
    margin: float
    margin_threshold: float
    rho_ref: float
    tau_relax: float
    tau_cav: float
    F_degeneracy: float
    mode_density: float
    intensity_min: float
    injection_power_min: float
    notes: tuple = field(default_factory=tuple)

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d["notes"] = "; ".join(self.notes)
        return d


def mode_density_2d(geom: CavityGeometry, lambda_0: float, lambda_p: float) -> float:
    """Transverse modes per unit volume between the cutoff and the pump.

    Counts the disc ``|k_perp|^2 < (2 pi/lambda_p)^2 - (2 pi/lambda_0)^2``
    divided by ``(2 pi)^2 L``; no polarization factor.
    """
    if not lambda_p < lambda_0:
        raise DomainError("pump below cutoff: lambda_p must be < lambda_0")
    return math.pi / (geom.L * lambda_0**2) * ((lambda_0 / lambda_p) ** 2 - 1.0)


def mode_density_3d(m_eff: float, omega_0: float, omega_p: float, const=CONST) -> float:
    """Quadratic-band modes per unit volume below ``omega_p``, both polarizations."""
    if omega_p < omega_0:
        raise DomainError("pump below cutoff: omega_p must be >= omega_0")
    k_p = math.sqrt(2.0 * m_eff * (omega_p - omega_0) / const.hbar)
    return 2.0 * (4.0 * math.pi / 3.0) * k_p**3 / (2.0 * math.pi) ** 3


def bose_enhancement(rho: float, mode_density: float) -> float:
    """Mean occupation per mode, ``rho / mode_density``."""
    if not mode_density > 0:
        raise DomainError("mode_density must be > 0")
    return rho / mode_density


def relaxation_time(rho: float, F: float, mat: MaterialParams, sigma: float, const=CONST) -> float:
    """Mean time between collisions, with Bose stimulation ``(1 + F)``."""
    if not (rho > 0 and sigma > 0 and F >= 0):
        raise DomainError("relaxation_time needs rho > 0, sigma > 0, F >= 0")
    return mat.n0 / (rho * const.c * sigma * (1.0 + F))


def absorbed_fraction(rho: float, tau_cav: float, tau_abs: float):
    """Absorbed photon density over one confinement time.

    Returns ``(exact, linearized, relative_difference)``.
    """
    if not (tau_cav > 0 and tau_abs > 0):
        raise DomainError("tau_cav and tau_abs must be > 0")
    x = tau_cav / tau_abs
    exact = -rho * math.expm1(-x)
    linear = rho * x
    rel = 0.0 if exact == 0 else (linear - exact) / exact
    return exact, linear, rel


def _rho_max(rho_l: float, mat: MaterialParams, length: float, finesse: float) -> float:
    if mat.alpha == 0:
        return math.inf
    return rho_l / (mat.n0 * mat.alpha * length * finesse)


def _report(dim, rho_min, rho_max, mode_density, mat, geom, a, omega_p, margin_threshold, rho_ref,
            const=CONST):
    if not margin_threshold > 0:
        raise ValidationError("margin_threshold must be > 0")
    notes = []
    tau_cav, _, _ = time_scales(mat, geom, const)
    margin = rho_max / rho_min if rho_min > 0 else math.inf
    if not rho_max > 0:
        notes.append("degenerate window: rho_max <= 0")
        feasible = False
    else:
        feasible = margin >= margin_threshold
    if rho_ref is None:
        rho_ref = rho_min
    sigma = cross_section(a)
    if rho_ref > 0 and sigma > 0 and mode_density > 0:
        F = bose_enhancement(rho_ref, mode_density)
        tau_relax = relaxation_time(rho_ref, F, mat, sigma, const)
    else:
        F, tau_relax = 0.0, math.inf
    intensity = intensity_from_density(rho_min, omega_p, mat, const)
    power = injection_peak_power(rho_min, omega_p, geom, tau_cav, const)
    raman, brillouin = parasitic_rates(intensity_from_density(rho_ref, omega_p, mat, const), mat, const)
    for name, rate in (("Raman", raman), ("Brillouin", brillouin)):
        if rate * tau_relax > 1.0:
            notes.append(f"{name} rate {rate:.3g} Hz exceeds collision rate {1 / tau_relax:.3g} Hz")
    if dim == Dimensionality.BANDGAP_3D.value:
        notes.append(MODE_DENSITY_3D_NOTE)
    return FeasibilityReport(
        dimensionality=dim,
        rho_min=rho_min,
        rho_max=rho_max,
        feasible=feasible,
        margin=margin,
        margin_threshold=margin_threshold,
        rho_ref=rho_ref,
        tau_relax=tau_relax,
        tau_cav=tau_cav,
        F_degeneracy=F,
        mode_density=mode_density,
        intensity_min=intensity,
        injection_power_min=power,
        notes=tuple(notes),
    )


def density_window_2d(mat: MaterialParams, geom: CavityGeometry, lambda_0: float, lambda_p: float,
                      a: float, rho_l: float, margin_threshold: float = 10.0, rho_ref=None,
                      const=CONST) -> FeasibilityReport:
    """Density window of a planar microcavity.

    Lower bound: collision time equal to ``tau_cav`` with the stimulated
    rate ``rho^2/mode_density``. Upper bound: absorbed density
    ``rho * tau_cav / tau_abs`` equal to ``rho_l``.
    """
    if not lambda_p < lambda_0:
        raise DomainError("pump below cutoff: lambda_p must be < lambda_0")
    if not a > 0:
        raise DomainError("scattering length must be > 0 for a finite rho_min")
    ratio = lambda_0 / lambda_p
    rho_min = math.sqrt(ratio**2 - 1.0) / (2.0 * geom.L * lambda_0 * a * math.sqrt(geom.finesse))
    rho_max = _rho_max(rho_l, mat, geom.L, geom.finesse)
    modes = mode_density_2d(geom, lambda_0, lambda_p)
    return _report(Dimensionality.PLANAR_2D.value, rho_min, rho_max, modes, mat, geom, a,
                   angular_frequency(lambda_p, const), margin_threshold, rho_ref, const)


def density_window_3d(mat: MaterialParams, geom: CavityGeometry, lambda_0: float, lambda_p: float,
                      a: float, rho_l: float, margin_threshold: float = 10.0, rho_ref=None,
                      const=CONST) -> FeasibilityReport:
    """Density window of a photonic-bandgap cavity of longitudinal size ``L_long``."""
    if geom.dimensionality is not Dimensionality.BANDGAP_3D:
        raise ValidationError("density_window_3d needs a Bandgap3D geometry")
    if not lambda_p <= lambda_0:
        raise DomainError("pump below cutoff: lambda_p must be < lambda_0")
    if not a > 0:
        raise DomainError("scattering length must be > 0 for a finite rho_min")
    L_long = geom.L_long
    rho_min = (lambda_0 / lambda_p - 1.0) ** 0.75 / (lambda_0**1.5 * a * math.sqrt(geom.finesse * L_long))
    rho_max = _rho_max(rho_l, mat, L_long, geom.finesse)
    omega_0, _ = cutoff_frequency(mat, geom, const)
    omega_p = angular_frequency(lambda_p, const)
    modes = mode_density_3d(effective_mass(mat, geom, const), omega_0, omega_p, const)
    return _report(Dimensionality.BANDGAP_3D.value, rho_min, rho_max, modes, mat, geom, a,
                   omega_p, margin_threshold, rho_ref, const)


def density_window(mat, geom, lambda_0, lambda_p, a, rho_l, margin_threshold=10.0, rho_ref=None,
                   const=CONST) -> FeasibilityReport:
    if geom.dimensionality is Dimensionality.BANDGAP_3D:
        fn = density_window_3d
    else:
        fn = density_window_2d
    return fn(mat, geom, lambda_0, lambda_p, a, rho_l, margin_threshold, rho_ref, const)
