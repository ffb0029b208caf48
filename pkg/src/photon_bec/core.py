"""Cavity and material model.

All quantities are SI. Wavelengths ``lambda_0`` and ``lambda_p`` are vacuum
wavelengths, so ``omega = 2*pi*c/lambda``; wavelengths inside the medium are
always named explicitly (``lambda_escape``).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
import scipy.constants as const

from photon_bec.errors import DomainError, ValidationError


@dataclass(frozen=True)
class PhysConstants:
    c: float = const.c
    hbar: float = const.hbar
    h: float = const.h
    kB: float = const.k
    eps0: float = const.epsilon_0

    def __post_init__(self):
        for name in ("c", "hbar", "h", "kB", "eps0"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"constant {name} must be positive")
        if abs(self.h - 2 * math.pi * self.hbar) > 1e-12 * self.h:
            raise ValidationError("h and hbar are inconsistent")


CONST = PhysConstants()
EV = const.electron_volt


class Dimensionality(str, enum.Enum):
    PLANAR_2D = "Planar2D"
    BANDGAP_3D = "Bandgap3D"


class DispersionMode(str, enum.Enum):
    EXACT = "Exact"
    QUADRATIC = "Quadratic"


@dataclass(frozen=True)
class MaterialParams:
    """Linear and nonlinear optical properties of the cavity filling.

    ``heat_capacity`` is volumetric, J/(m^3 K). The default 2e6 corresponds
    to 2 J/(cm^3 K) for silica-like glass.
    """

    n0: float = 1.44
    n2: float = 3e-20
    alpha: float = 5e-5
    heat_capacity: float = 2e6
    raman_gain: float = 1e-13
    brillouin_gain: float = 6e-11

    def __post_init__(self):
        if not self.n0 > 1:
            raise ValidationError("material.n0 must be > 1")
        if not self.n2 >= 0:
            raise ValidationError("material.n2 must be >= 0")
        if not self.alpha >= 0:
            raise ValidationError("material.alpha must be >= 0")
        if not self.heat_capacity > 0:
            raise ValidationError("material.heat_capacity must be > 0")
        if not (self.raman_gain >= 0 and self.brillouin_gain >= 0):
            raise ValidationError("Raman and Brillouin gains must be >= 0")


@dataclass(frozen=True)
class CavityGeometry:
    """Planar microcavity or photonic-bandgap cavity.

    ``L`` fixes the cutoff mode; ``L_long`` is the longitudinal size of the
    bandgap material and sets the confinement time in 3D.
    """

    dimensionality: Dimensionality = Dimensionality.PLANAR_2D
    L: float = 5.208e-7
    finesse: float = 1e6
    transverse_area: float = 1e-10
    L_long: float | None = None
    cladding_index: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "dimensionality", Dimensionality(self.dimensionality))
        if not self.L > 0:
            raise ValidationError("geometry.L must be > 0")
        if not self.finesse >= 1:
            raise ValidationError("geometry.finesse must be >= 1")
        if not self.transverse_area > 0:
            raise ValidationError("geometry.transverse_area must be > 0")
        if not self.cladding_index >= 1.0:
            raise ValidationError("geometry.cladding_index must be >= 1")
        if self.dimensionality is Dimensionality.BANDGAP_3D:
            if self.L_long is None:
                raise ValidationError("geometry.L_long is required for Bandgap3D")
            if not self.L_long >= self.L:
                raise ValidationError("geometry.L_long must be >= geometry.L")

    @property
    def L_eff(self) -> float:
        """Length that sets the photon round trip: L in 2D, L_long in 3D."""
        if self.dimensionality is Dimensionality.BANDGAP_3D:
            return self.L_long
        return self.L


@dataclass(frozen=True)
class PulseSpec:
    lambda_p: float = 1.0e-6
    photon_density: float = 1e26
    duration: float = 2.5e-9

    def __post_init__(self):
        if not self.lambda_p > 0:
            raise ValidationError("pulse.lambda_p must be > 0")
        if not self.photon_density > 0:
            raise ValidationError("pulse.photon_density must be > 0")
        if not self.duration > 0:
            raise ValidationError("pulse.duration must be > 0")


@dataclass(frozen=True)
class DerivedScales:
    lambda_0: float
    omega_0: float
    omega_p: float
    m_eff: float
    m_eff_eV: float
    tau_cav: float
    tau_abs: float
    rho_l: float
    delta_omega: float
    lambda_escape: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def check_pairing(mat: MaterialParams, geom: CavityGeometry, pulse: PulseSpec | None = None):
    """Cross-type invariants that need more than one parameter set."""
    if not geom.cladding_index < mat.n0:
        raise ValidationError("geometry.cladding_index must be < material.n0")
    if pulse is not None:
        _, lambda_0 = cutoff_frequency(mat, geom)
        if not pulse.lambda_p < lambda_0:
            raise DomainError(
                f"pump below cutoff: lambda_p={pulse.lambda_p:.6g} m >= lambda_0={lambda_0:.6g} m"
            )


def cutoff_frequency(mat: MaterialParams, geom: CavityGeometry, const=CONST):
    """Return ``(omega_0, lambda_0)`` of the fundamental longitudinal mode."""
    omega_0 = const.c * math.pi / (mat.n0 * geom.L)
    lambda_0 = 2.0 * mat.n0 * geom.L
    return omega_0, lambda_0


def angular_frequency(wavelength: float, const=CONST) -> float:
    return 2.0 * math.pi * const.c / wavelength


def effective_mass(mat: MaterialParams, geom: CavityGeometry, const=CONST) -> float:
    """Curvature mass hbar*pi*n0/(L*c) of the cavity dispersion, in kg."""
    return const.hbar * math.pi * mat.n0 / (geom.L * const.c)


def mass_in_eV(m_eff: float, const=CONST) -> float:
    return m_eff * const.c**2 / EV


def dispersion(k_perp, mat: MaterialParams, geom: CavityGeometry, mode=DispersionMode.EXACT, const=CONST):
    """Photon energy (J) at transverse wavevector ``k_perp``.

    ``Exact`` is the square-root cavity branch, ``Quadratic`` its
    massive-particle expansion about the cutoff.
    """
    mode = DispersionMode(mode)
    if np.any(np.asarray(k_perp) < 0):
        raise DomainError("k_perp must be >= 0")
    omega_0, _ = cutoff_frequency(mat, geom, const)
    k0 = math.pi / geom.L
    if mode is DispersionMode.EXACT:
        return const.hbar * const.c / mat.n0 * (k0**2 + k_perp**2) ** 0.5
    m = effective_mass(mat, geom, const)
    return const.hbar * omega_0 + const.hbar**2 * k_perp**2 / (2.0 * m)


def time_scales(mat: MaterialParams, geom: CavityGeometry, const=CONST):
    """Return ``(tau_cav, tau_abs, delta_omega)``.

    ``tau_abs`` is ``inf`` for a lossless medium.
    """
    tau_cav = geom.L_eff * geom.finesse * mat.n0 / const.c
    tau_abs = math.inf if mat.alpha == 0 else 1.0 / (mat.alpha * const.c)
    return tau_cav, tau_abs, 1.0 / tau_cav


def intensity_from_density(rho, omega, mat: MaterialParams, const=CONST):
    """Intensity (W/m^2) carried by photon density ``rho`` at frequency ``omega``."""
    return rho * const.hbar * omega * const.c / mat.n0


def density_from_intensity(intensity, omega, mat: MaterialParams, const=CONST):
    return intensity * mat.n0 / (const.hbar * omega * const.c)


def peak_power(intensity, geom: CavityGeometry):
    return intensity * geom.transverse_area


def injection_peak_power(rho, omega, geom: CavityGeometry, duration, const=CONST):
    """Power needed to load density ``rho`` into the cavity volume within ``duration``.

    The volume is ``transverse_area * L_eff``. With ``duration = tau_cav``
    this equals the circulating ``intensity * area / finesse``.
    """
    energy = rho * const.hbar * omega * geom.transverse_area * geom.L_eff
    return energy / duration


def thermal_density_limit(mat: MaterialParams, delta_T: float, omega_0: float, const=CONST) -> float:
    """Largest absorbed photon density that heats the glass by ``delta_T``."""
    if not delta_T > 0:
        raise ValidationError("delta_T must be > 0")
    return mat.heat_capacity * delta_T / (const.hbar * omega_0)


def derive_scales(mat: MaterialParams, geom: CavityGeometry, pulse: PulseSpec, delta_T: float = 1.0,
                  const=CONST) -> DerivedScales:
    check_pairing(mat, geom, pulse)
    omega_0, lambda_0 = cutoff_frequency(mat, geom, const)
    m_eff = effective_mass(mat, geom, const)
    tau_cav, tau_abs, delta_omega = time_scales(mat, geom, const)
    return DerivedScales(
        lambda_0=lambda_0,
        omega_0=omega_0,
        omega_p=angular_frequency(pulse.lambda_p, const),
        m_eff=m_eff,
        m_eff_eV=mass_in_eV(m_eff, const),
        tau_cav=tau_cav,
        tau_abs=tau_abs,
        rho_l=thermal_density_limit(mat, delta_T, omega_0, const),
        delta_omega=delta_omega,
        lambda_escape=lambda_0 / mat.n0,
    )
