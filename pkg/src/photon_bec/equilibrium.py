"""Thermalized photon gas from photon-number and energy conservation.

Given the photon density and the mean excess energy per photon above the
cutoff, find the effective temperature and gap parameter
``kappa = beta * (hbar*omega_0 - mu)`` of the Bose-Einstein state with the
same two conserved quantities.

2D (planar cavity, one longitudinal mode, exact square-root dispersion):

    rho     = 2/(lambda_B^2 L) * (g_1 + g_2/x)
    rho*eps = 2/(beta lambda_B^2 L) * (g_2 + 2 g_3/x),    x = beta*hbar*omega_0

3D (quadratic band, condensate allowed):

    rho     = rho_0 + 2 g_{3/2}(kappa) / lambda_B^3
    rho*eps = energy_factor * 2 g_{5/2}(kappa) k_B T / lambda_B^3

``energy_factor`` is 3/2 for the ideal quadratic band. In 2D the ``g_1``
divergence means kappa can be far below the smallest double; the solver
works with ``g_1`` itself as unknown and keeps ``log_kappa``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from photon_bec.bose import bose_g, kappa_from_g1, log_kappa_from_g1
from photon_bec.core import CONST, DispersionMode
from photon_bec.errors import DomainError, SolverError, ValidationError

ZETA_3_2 = bose_g(1.5, 0.0)
ZETA_5_2 = bose_g(2.5, 0.0)


@dataclass(frozen=True)
class BalanceInputs:
    rho: float
    omega_p: float
    omega_0: float
    m_eff: float
    L: float | None = None
    mean_excess_energy: float | None = None

    def __post_init__(self):
        if not self.rho > 0:
            raise ValidationError("rho must be > 0")
        if not self.omega_0 > 0 or not self.m_eff > 0:
            raise ValidationError("omega_0 and m_eff must be > 0")
        if self.omega_p < self.omega_0:
            raise DomainError("pump below cutoff: omega_p must be >= omega_0")
        if self.L is not None and not self.L > 0:
            raise ValidationError("L must be > 0")
        if self.mean_excess_energy is not None and self.mean_excess_energy < 0:
            raise ValidationError("mean_excess_energy must be >= 0")

    def excess_energy(self, const=CONST) -> float:
        """Mean energy per photon above hbar*omega_0 (J)."""
        if self.mean_excess_energy is not None:
            return self.mean_excess_energy
        return const.hbar * (self.omega_p - self.omega_0)


@dataclass(frozen=True)
class EquilibriumState:
    dimensionality: str
    T_eff: float
    beta: float
    kappa: float
    log_kappa: float
    mu: float
    rho0: float
    lambda_B: float
    condensed: bool
    mu_at_cutoff: bool
    residual_number: float
    residual_energy: float
    correction_ratio: float = 0.0

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def thermal_wavelength(T: float, m_eff: float, const=CONST) -> float:
    """de Broglie wavelength h / sqrt(2 pi m k_B T)."""
    if T < 0:
        raise DomainError("temperature must be >= 0")
    if T == 0:
        return math.inf
    return const.h / math.sqrt(2.0 * math.pi * m_eff * const.kB * T)


def critical_temperature_3d(rho: float, m_eff: float, const=CONST) -> float:
    """Temperature at which the thermal 3D density 2*zeta(3/2)/lambda_B^3 equals ``rho``."""
    if not rho > 0:
        raise DomainError("rho must be > 0")
    return const.h**2 / (2.0 * math.pi * m_eff * const.kB) * (rho / (2.0 * ZETA_3_2)) ** (2.0 / 3.0)


def g1_from_log_kappa(log_kappa: float) -> float:
    if log_kappa < -30.0:
        return -log_kappa + 0.5 * math.exp(log_kappa)
    return bose_g(1.0, math.exp(log_kappa))


def _log_bracket_root(fn, x0, max_iter):
    """Bracket a sign change of ``fn`` around ``x0`` by geometric expansion, then solve."""
    lo, hi = x0 - 0.5, x0 + 0.5
    flo, fhi = fn(lo), fn(hi)
    step = 1.0
    for _ in range(max_iter):
        if flo * fhi <= 0:
            break
        if abs(flo) < abs(fhi):
            lo -= step
            flo = fn(lo)
        else:
            hi += step
            fhi = fn(hi)
        step *= 1.6
    else:
        raise SolverError(f"could not bracket root near {x0:g}", {"f_lo": flo, "f_hi": fhi})
    try:
        return brentq(fn, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=max_iter)
    except (RuntimeError, ValueError) as exc:
        raise SolverError(f"root solve failed: {exc}") from exc


def _zero_temperature_state(dim, inp: BalanceInputs, const=CONST):
    return EquilibriumState(
        dimensionality=dim,
        T_eff=0.0,
        beta=math.inf,
        kappa=0.0,
        log_kappa=-math.inf,
        mu=const.hbar * inp.omega_0,
        rho0=inp.rho if dim == "3D" else 0.0,
        lambda_B=math.inf,
        condensed=dim == "3D",
        mu_at_cutoff=True,
        residual_number=0.0,
        residual_energy=0.0,
    )


def balance_2d(T: float, log_kappa: float, inp: BalanceInputs, dispersion=DispersionMode.EXACT,
               const=CONST):
    """Right-hand sides ``(rho, rho*eps)`` of the 2D balance equations."""
    if inp.L is None:
        raise ValidationError("2D balance needs the cavity length L")
    kT = const.kB * T
    lam = thermal_wavelength(T, inp.m_eff, const)
    pref = 2.0 / (lam**2 * inp.L)
    kappa = math.exp(log_kappa)
    g1 = g1_from_log_kappa(log_kappa)
    g2 = bose_g(2.0, kappa)
    g3 = bose_g(3.0, kappa)
    c = kT / (const.hbar * inp.omega_0) if DispersionMode(dispersion) is DispersionMode.EXACT else 0.0
    return pref * (g1 + g2 * c), pref * kT * (g2 + 2.0 * g3 * c)


def solve_equilibrium_2d(inp: BalanceInputs, dispersion=DispersionMode.EXACT, kappa_floor=1e-12,
                         max_iter=200, const=CONST) -> EquilibriumState:
    """Temperature and gap parameter of the thermalized 2D cavity gas.

    ``dispersion="Quadratic"`` drops the ``1/x`` terms that come from the
    square-root branch, giving the massive 2D gas used by the kinetic
    simulator. No true condensate exists in 2D, so ``rho0`` is always 0;
    ``mu_at_cutoff`` flags ``kappa < kappa_floor``.
    """
    if inp.L is None:
        raise ValidationError("2D equilibrium needs the cavity length L")
    dispersion = DispersionMode(dispersion)
    eps = inp.excess_energy(const)
    if eps == 0:
        return _zero_temperature_state("2D", inp, const)
    E0 = const.hbar * inp.omega_0
    rho = inp.rho

    def inner(T):
        kT = const.kB * T
        lam2 = thermal_wavelength(T, inp.m_eff, const) ** 2
        pref = 2.0 / (lam2 * inp.L)
        c = kT / E0 if dispersion is DispersionMode.EXACT else 0.0
        target = rho / pref

        def number(log_y):
            y = math.exp(log_y)
            return math.log((y + bose_g(2.0, kappa_from_g1(y)) * c) / target)

        # number(log_y) is increasing; y = target overshoots for any c >= 0
        hi = math.log(target) + 1e-12
        lo = hi - 1.0
        while number(lo) > 0:
            lo -= 2.0 * (hi - lo)
            if lo < -800:
                raise SolverError("density equation has no root", {"T": T})
        if number(hi) < 0:
            return target
        try:
            y = brentq(number, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=max_iter)
        except RuntimeError as exc:
            raise SolverError(f"density equation did not converge at T={T:.6g} K: {exc}", {"T": T}) from exc
        return math.exp(y)

    def energy_residual(log_T):
        T = math.exp(log_T)
        y = inner(T)
        kappa = kappa_from_g1(y)
        kT = const.kB * T
        c = kT / E0 if dispersion is DispersionMode.EXACT else 0.0
        pref = 2.0 / (thermal_wavelength(T, inp.m_eff, const) ** 2 * inp.L)
        u = pref * kT * (bose_g(2.0, kappa) + 2.0 * bose_g(3.0, kappa) * c)
        return math.log(u / (rho * eps))

    log_T = _log_bracket_root(energy_residual, math.log(eps / const.kB), max_iter)
    T = math.exp(log_T)
    y = inner(T)
    log_kappa = log_kappa_from_g1(y)
    kappa = math.exp(log_kappa)
    n_rhs, u_rhs = balance_2d(T, log_kappa, inp, dispersion, const)
    kT = const.kB * T
    c = kT / E0 if dispersion is DispersionMode.EXACT else 0.0
    g2 = bose_g(2.0, kappa)
    return EquilibriumState(
        dimensionality="2D",
        T_eff=T,
        beta=1.0 / kT,
        kappa=kappa,
        log_kappa=log_kappa,
        mu=E0 - kappa * kT,
        rho0=0.0,
        lambda_B=thermal_wavelength(T, inp.m_eff, const),
        condensed=False,
        mu_at_cutoff=kappa < kappa_floor,
        residual_number=(n_rhs - rho) / rho,
        residual_energy=(u_rhs - rho * eps) / (rho * eps),
        correction_ratio=g2 * c / (y + g2 * c),
    )


def balance_3d(T: float, kappa: float, rho0: float, inp: BalanceInputs, energy_factor=1.5, const=CONST):
    """Right-hand sides ``(rho, rho*eps)`` of the 3D balance equations."""
    lam3 = thermal_wavelength(T, inp.m_eff, const) ** 3
    return (rho0 + 2.0 * bose_g(1.5, kappa) / lam3,
            energy_factor * 2.0 * bose_g(2.5, kappa) * const.kB * T / lam3)


def solve_equilibrium_3d(inp: BalanceInputs, energy_factor=1.5, max_iter=200, const=CONST) -> EquilibriumState:
    """Temperature, gap and condensate density of the thermalized 3D band gas.

    The condensed branch (kappa = 0) is tried first: the energy equation
    then fixes T in closed form (T^(5/2) law) and the condensate takes the
    rest of the photons. If the thermal cloud alone would exceed ``rho``
    the gas is uncondensed and both equations are solved for (T, kappa).
    ``energy_factor=1.0`` reproduces the energy balance without the 3/2
    of the quadratic band.
    """
    if not energy_factor > 0:
        raise ValidationError("energy_factor must be > 0")
    eps = inp.excess_energy(const)
    if eps == 0:
        return _zero_temperature_state("3D", inp, const)
    rho = inp.rho
    m = inp.m_eff
    # 1/lambda_B^3 = (m k T / (2 pi hbar^2))^(3/2)
    q = (m * const.kB / (2.0 * math.pi * const.hbar**2)) ** 1.5
    T = (rho * eps / (energy_factor * 2.0 * ZETA_5_2 * const.kB * q)) ** 0.4
    n_thermal = 2.0 * ZETA_3_2 * q * T**1.5
    if n_thermal <= rho:
        rho0 = rho - n_thermal
        kappa = 0.0
    else:
        rho0 = 0.0

        def kappa_at(T):
            target = rho / (2.0 * q * T**1.5)
            if target >= ZETA_3_2:
                return 0.0

            def fn(log_k):
                return math.log(bose_g(1.5, math.exp(log_k)) / target)

            log_k = _log_bracket_root(fn, math.log(max(-math.log(target), 1e-3)), max_iter)
            return math.exp(log_k)

        def energy_residual(log_T):
            T = math.exp(log_T)
            kappa = kappa_at(T)
            u = energy_factor * 2.0 * bose_g(2.5, kappa) * const.kB * T * q * T**1.5
            return math.log(u / (rho * eps))

        T = math.exp(_log_bracket_root(energy_residual, math.log(T), max_iter))
        kappa = kappa_at(T)
    n_rhs, u_rhs = balance_3d(T, kappa, rho0, inp, energy_factor, const)
    kT = const.kB * T
    return EquilibriumState(
        dimensionality="3D",
        T_eff=T,
        beta=1.0 / kT,
        kappa=kappa,
        log_kappa=math.log(kappa) if kappa > 0 else -math.inf,
        mu=const.hbar * inp.omega_0 - kappa * kT,
        rho0=rho0,
        lambda_B=thermal_wavelength(T, m, const),
        condensed=rho0 > 0,
        mu_at_cutoff=kappa == 0.0,
        residual_number=(n_rhs - rho) / rho,
        residual_energy=(u_rhs - rho * eps) / (rho * eps),
    )
