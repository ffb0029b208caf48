"""Kerr nonlinearity mapped onto a photon-photon contact interaction."""

from __future__ import annotations

import math
from dataclasses import dataclass

from photon_bec.core import CONST, MaterialParams
from photon_bec.errors import DomainError


@dataclass(frozen=True)
class InteractionParams:
    a: float
    sigma: float
    chi3: float
    V_eff: float


def scattering_length(mat: MaterialParams, lambda_0: float, const=CONST) -> float:
    """Photon-photon scattering length (m) induced by the Kerr index ``n2``.

    Matching the quartic field energy of the chi3 medium against a contact
    potential 4*pi*a*hbar^2/m gives
    ``a = hbar c^2 n2 n0^2 / (4 pi) * (2 pi / lambda_0)^3``.
    """
    if not lambda_0 > 0:
        raise DomainError("lambda_0 must be > 0")
    k0 = 2.0 * math.pi / lambda_0
    return const.hbar * const.c**2 * mat.n2 * mat.n0**2 / (4.0 * math.pi) * k0**3


def cross_section(a: float) -> float:
    """Energy-independent s-wave cross section 4*pi*a^2."""
    return 4.0 * math.pi * a * a


def chi3_from_n2(mat: MaterialParams, const=CONST) -> float:
    # 1 + chi1 = eps/eps0 = n0^2
    return const.eps0**2 * mat.n0**2 * const.c * mat.n2


def contact_strength(a: float, m_eff: float, const=CONST) -> float:
    """Contact-interaction strength 4*pi*a*hbar^2/m in J m^3."""
    return 4.0 * math.pi * a * const.hbar**2 / m_eff


def interaction_params(mat: MaterialParams, lambda_0: float, m_eff: float, const=CONST) -> InteractionParams:
    a = scattering_length(mat, lambda_0, const)
    return InteractionParams(
        a=a,
        sigma=cross_section(a),
        chi3=chi3_from_n2(mat, const),
        V_eff=contact_strength(a, m_eff, const),
    )


def parasitic_rates(intensity: float, mat: MaterialParams, const=CONST):
    """Estimated ``(raman_rate, brillouin_rate)`` in Hz at ``intensity`` (W/m^2).

    Each rate is gain * intensity * (c/n0): the gain per unit length times
    the group velocity in the medium.
    """
    if intensity < 0:
        raise DomainError("intensity must be >= 0")
    v = const.c / mat.n0
    return mat.raman_gain * intensity * v, mat.brillouin_gain * intensity * v
