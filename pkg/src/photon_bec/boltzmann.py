"""Isotropic Uehling-Uhlenbeck kinetics on a uniform energy grid.

Energies are measured from the band bottom hbar*omega_0 and bins sit at
``eps_i = (i + 1/2) * d_eps``. A collision (i, j) -> (k, l) conserves energy
iff ``i + j = k + l``, so the discrete operator conserves photon number and
energy exactly and its fixed points are discrete Bose-Einstein states.

Collision integral for contact interactions:

    df_i/dt = K / w_i  sum_{j, k+l=i+j} W_ijkl [f_k f_l (1+f_i)(1+f_j) - f_i f_j (1+f_k)(1+f_l)]

with ``w_i = sqrt(i + 1/2)`` and ``W = w_min(i,j,k,l)`` in 3D, and
``w = W = 1`` in 2D. The quartic terms of the bracket cancel identically;
the remaining double sum over (k, l) at fixed ``s = k + l`` and fixed
threshold ``t = min(i, j)`` is evaluated with prefix sums, so one
evaluation costs O(N^2).

The rate constant K is calibrated so that the mean classical collision
rate of the initial state equals ``rho * (c/n0) * sigma``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numba
import numpy as np
from scipy.special import xlogy

from photon_bec.core import CONST
from photon_bec.equilibrium import BalanceInputs, solve_equilibrium_2d, solve_equilibrium_3d
from photon_bec.errors import ConservationError, FitError, ValidationError

F_FLOOR = 1e-30
STABILITY = 2.0


@dataclass(frozen=True)
class SpectralGrid:
    """Occupation numbers on a uniform energy grid.

    ``dos`` holds the density of states per unit volume and energy
    (1/(J m^3)), polarization factor 2 included.
    """

    dimensionality: str
    d_eps: float
    f: np.ndarray
    dos: np.ndarray
    m_eff: float
    omega_0: float
    L: float | None = None

    def __post_init__(self):
        if self.dimensionality not in ("D2", "D3"):
            raise ValidationError("dimensionality must be D2 or D3")
        if not self.d_eps > 0:
            raise ValidationError("d_eps must be > 0")
        if self.f.shape != self.dos.shape or self.f.ndim != 1:
            raise ValidationError("f and dos must be 1D arrays of equal length")
        if self.f.size < 16:
            raise ValidationError("need at least 16 bins")
        if np.any(self.f < 0) or not np.all(np.isfinite(self.f)):
            raise ValidationError("occupations must be finite and >= 0")

    @property
    def n_bins(self) -> int:
        return self.f.size

    @property
    def eps(self) -> np.ndarray:
        return (np.arange(self.n_bins) + 0.5) * self.d_eps

    def with_f(self, f) -> "SpectralGrid":
        return replace(self, f=np.asarray(f, dtype=float))


def bin_sqrt_weights(n_bins):
    """Bin average of sqrt(eps / d_eps) over ``[i, i+1] * d_eps``."""
    edges = np.arange(n_bins + 1) ** 1.5
    return (2.0 / 3.0) * np.diff(edges)


def density_of_states(dimensionality, eps, m_eff, L=None, const=CONST):
    if dimensionality == "D3":
        d_eps = eps[1] - eps[0]
        pref = 2.0 / (4.0 * math.pi**2) * (2.0 * m_eff / const.hbar**2) ** 1.5
        return pref * np.sqrt(d_eps) * bin_sqrt_weights(eps.size)
    if L is None:
        raise ValidationError("2D density of states needs the cavity length L")
    return np.full_like(eps, 2.0 * m_eff / (2.0 * math.pi * const.hbar**2 * L))


def make_grid(dimensionality, n_bins, eps_max, m_eff, omega_0, L=None, f=None, const=CONST) -> SpectralGrid:
    d_eps = eps_max / n_bins
    eps = (np.arange(n_bins) + 0.5) * d_eps
    dos = density_of_states(dimensionality, eps, m_eff, L, const)
    if f is None:
        f = np.zeros(n_bins)
    return SpectralGrid(dimensionality, d_eps, np.asarray(f, dtype=float), dos, m_eff, omega_0, L)


def number_density(grid: SpectralGrid) -> float:
    return float(np.sum(grid.dos * grid.f) * grid.d_eps)


def energy_density(grid: SpectralGrid) -> float:
    return float(np.sum(grid.dos * grid.f * grid.eps) * grid.d_eps)


def entropy_density(grid: SpectralGrid) -> float:
    """Entropy per unit volume in units of k_B."""
    f = grid.f
    s = xlogy(1.0 + f, 1.0 + f) - xlogy(f, f)
    return float(np.sum(grid.dos * s) * grid.d_eps)


def _normalize(grid, shape, rho):
    w = np.sum(grid.dos * shape) * grid.d_eps
    if not w > 0:
        raise ValidationError("initial shape has no weight on the grid")
    return grid.with_f(shape * (rho / w))


def gaussian_state(grid: SpectralGrid, eps_p, width, rho) -> SpectralGrid:
    """Gaussian bump in energy centred at ``eps_p`` holding density ``rho``."""
    if not width > 0:
        raise ValidationError("width must be > 0")
    return _normalize(grid, np.exp(-0.5 * ((grid.eps - eps_p) / width) ** 2), rho)


def uniform_state(grid: SpectralGrid, eps_lo, eps_hi, rho) -> SpectralGrid:
    e = grid.eps
    return _normalize(grid, ((e >= eps_lo) & (e <= eps_hi)).astype(float), rho)


def monochromatic_state(grid: SpectralGrid, eps_p, rho) -> SpectralGrid:
    shape = np.zeros(grid.n_bins)
    shape[min(int(eps_p / grid.d_eps), grid.n_bins - 1)] = 1.0
    return _normalize(grid, shape, rho)


def bose_einstein(eps, beta, kappa):
    return 1.0 / np.expm1(beta * eps + kappa)


class CollisionKernel:
    """Precomputed index structure of the discrete collision integral for N bins."""

    def __init__(self, n_bins: int, dimensionality: str):
        n = n_bins
        self.n = n
        self.dimensionality = dimensionality
        if dimensionality == "D3":
            self.w = bin_sqrt_weights(n)
        else:
            self.w = np.ones(n)
        s = np.arange(2 * n - 1)[:, None]
        m = np.arange(n)[None, :]
        partner = s - m
        self.valid = (partner >= m) & (partner < n)
        self.partner = np.where(self.valid, partner, 0)
        self.mult = np.where(self.valid, np.where(partner > m, 2.0, 1.0), 0.0)
        i = np.arange(n)[:, None]
        j = np.arange(n)[None, :]
        self.pair_sum = i + j
        self.pair_min = np.minimum(i, j)
        # classical pair count sum_{k+l=s} W(t,k,l), state independent
        self.q0 = self._threshold_sums(self.mult)
        self.flat_index = self.pair_sum * n + self.pair_min
        self.q0_pairs = self.q0.ravel()[self.flat_index]

    def _threshold_sums(self, weights):
        """``out[..., s, t] = sum_m w_min(t, m) * weights[..., s, m]`` over the valid pairs."""
        rw = self.w * weights
        below = np.cumsum(rw, axis=-1)
        below -= rw
        above = np.cumsum(weights[..., ::-1], axis=-1)[..., ::-1]
        below += self.w * above
        return below

    def _pq(self, f):
        fm = f[None, :]
        fp = f[self.partner]
        P = self._threshold_sums(self.mult * fm * fp).ravel()
        Q1 = self._threshold_sums(self.mult * (fm + fp)).ravel()
        idx = self.flat_index
        return P[idx], self.q0_pairs + Q1[idx]

    def rates(self, f, with_diagonal=False):
        """Collision term per bin in units of the rate constant K.

        With ``with_diagonal`` also return ``-dC_i/df_i`` at fixed pair
        sums, a proxy for the stiffest local relaxation rate.
        """
        P, Q = self._pq(f)
        fi = f[:, None]
        fj = f[None, :]
        C = ((1.0 + fi + fj) * P - fi * fj * Q).sum(axis=1) / self.w
        if with_diagonal:
            return C, (fj * Q - P).sum(axis=1) / self.w
        return C

    def fast_rates(self, f):
        """Same as ``rates(f, with_diagonal=True)`` via the compiled loop."""
        diag = np.empty_like(f)
        C = _rates_loop(f, self.w, diag)
        return C, diag

    def magnitude(self, f):
        """Size of the gain term alone, the scale against which C is judged."""
        P, _ = self._pq(f)
        return ((1.0 + f[:, None] + f[None, :]) * P).sum(axis=1) / self.w

    def classical_out_rates(self, f):
        """Loss rate per particle, without Bose factors, in units of K."""
        return (f[None, :] * self.q0_pairs).sum(axis=1) / self.w


@numba.njit(cache=True)
def _rates_loop(f, w, diag):
    """Loop form of ``CollisionKernel.rates``; fills ``diag`` and returns C."""
    n = f.size
    n_s = 2 * n - 1
    P = np.zeros((n_s, n))
    Q = np.zeros((n_s, n))
    for s in range(n_s):
        m_lo = max(0, s - n + 1)
        m_hi = s // 2
        tot_p = 0.0
        tot_q = 0.0
        for m in range(m_lo, m_hi + 1):
            mult = 2.0 if s - m > m else 1.0
            tot_p += mult * f[m] * f[s - m]
            tot_q += mult * (1.0 + f[m] + f[s - m])
        below_p = 0.0
        below_q = 0.0
        cum_p = 0.0
        cum_q = 0.0
        t_hi = min(m_hi, n - 1)
        for t in range(m_lo, t_hi + 1):
            P[s, t] = below_p + w[t] * (tot_p - cum_p)
            Q[s, t] = below_q + w[t] * (tot_q - cum_q)
            mult = 2.0 if s - t > t else 1.0
            wp = mult * f[t] * f[s - t]
            wq = mult * (1.0 + f[t] + f[s - t])
            below_p += w[t] * wp
            below_q += w[t] * wq
            cum_p += wp
            cum_q += wq
    C = np.zeros(n)
    for i in range(n):
        acc = 0.0
        acc_d = 0.0
        for j in range(n):
            s = i + j
            t = min(i, j)
            p = P[s, t]
            q = Q[s, t]
            acc += (1.0 + f[i] + f[j]) * p - f[i] * f[j] * q
            acc_d += f[j] * q - p
        C[i] = acc / w[i]
        diag[i] = acc_d / w[i]
    return C


_KERNELS: dict = {}


def kernel_for(grid: SpectralGrid) -> CollisionKernel:
    key = (grid.n_bins, grid.dimensionality)
    if key not in _KERNELS:
        _KERNELS[key] = CollisionKernel(*key)
    return _KERNELS[key]


def collision_operator(grid: SpectralGrid, rate_constant: float = 1.0) -> np.ndarray:
    """df/dt per bin (1/s) for rate constant ``rate_constant``."""
    return rate_constant * kernel_for(grid).rates(grid.f)


def mean_classical_rate(grid: SpectralGrid, rate_constant: float = 1.0) -> float:
    """Number-weighted mean collision rate with the Bose factors switched off."""
    k = kernel_for(grid)
    weight = grid.dos * grid.f
    return rate_constant * float(np.sum(weight * k.classical_out_rates(grid.f)) / np.sum(weight))


def calibrate_rate_constant(grid: SpectralGrid, n0: float, sigma: float, const=CONST) -> float:
    """K such that the mean classical rate equals ``rho * (c/n0) * sigma``."""
    rho = number_density(grid)
    return rho * const.c / n0 * sigma / mean_classical_rate(grid, 1.0)


@dataclass
class SimConfig:
    t_end: float
    rate_constant: float
    dt_init: float | None = None
    max_rel_change: float = 1e-2
    record_every: int = 50
    conservation_tol: float = 1e-6
    max_steps: int = 200_000
    stall_tol: float = 1e-5
    fit_tol: float = 1e-3

    def __post_init__(self):
        for name in ("t_end", "rate_constant", "max_rel_change", "record_every", "conservation_tol",
                     "max_steps"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"sim.{name} must be > 0")
        if self.dt_init is not None and not self.dt_init > 0:
            raise ValidationError("sim.dt_init must be > 0")


@dataclass
class StepStats:
    steps: int = 0
    rejected: int = 0
    clamp_events: int = 0


def _rk4(kernel, f, dt, K, k1):
    k2 = kernel.fast_rates(f + 0.5 * dt * K * k1)[0]
    k3 = kernel.fast_rates(f + 0.5 * dt * K * k2)[0]
    k4 = kernel.fast_rates(f + dt * K * k3)[0]
    return f + dt * K * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0


def step(grid: SpectralGrid, cfg: SimConfig, dt: float, stats: StepStats | None = None):
    """Advance one accepted RK4 step.

    Returns ``(new_grid, dt_taken, dt_next)``. Steps whose largest relative
    change ``|df| / (f + F_FLOOR)`` exceeds ``cfg.max_rel_change`` are
    retried with a smaller ``dt``.
    """
    kernel = kernel_for(grid)
    f = grid.f
    K = cfg.rate_constant
    k1, diag = kernel.fast_rates(f)
    stiff = K * float(np.max(diag))
    if stiff > 0:
        # RK4 is stable on the negative real axis up to |lambda dt| ~ 2.78
        dt = min(dt, STABILITY / stiff)
    for _ in range(200):
        f_new = _rk4(kernel, f, dt, K, k1)
        rel = float(np.max(np.abs(f_new - f) / (f + F_FLOOR)))
        if np.isfinite(rel) and rel <= cfg.max_rel_change:
            break
        if stats is not None:
            stats.rejected += 1
        shrink = 0.9 * cfg.max_rel_change / rel if np.isfinite(rel) and rel > 0 else 0.1
        dt *= min(0.5, max(shrink, 1e-3))
    else:
        raise ConservationError("step size underflow", {"dt": dt})
    negative = f_new < 0
    if negative.any():
        if stats is not None:
            stats.clamp_events += int(negative.sum())
        f_new = np.where(negative, 0.0, f_new)
    if stats is not None:
        stats.steps += 1
    grow = 0.9 * cfg.max_rel_change / rel if rel > 0 else 2.0
    return grid.with_f(f_new), dt, dt * min(2.0, max(grow, 1.0))


def bose_fit(grid: SpectralGrid, const=CONST):
    """Least-squares fit of ``ln(1 + 1/f_i) = beta*eps_i + kappa``.

    Returns ``(T, kappa, residual)`` where ``residual`` is the RMS misfit
    divided by the RMS of the left-hand side.
    """
    f = grid.f
    mask = f > F_FLOOR
    if mask.sum() < 2:
        raise FitError("fewer than two bins above the occupation floor")
    x = grid.eps[mask] / grid.d_eps
    y = np.log1p(1.0 / f[mask])
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, kappa), *_ = np.linalg.lstsq(A, y, rcond=None)
    r = y - A @ np.array([slope, kappa])
    beta = slope / grid.d_eps
    residual = float(np.sqrt(np.mean(r**2)) / np.sqrt(np.mean(y**2)))
    T = 1.0 / (const.kB * beta) if beta > 0 else math.inf
    return T, float(kappa), residual


def predicted_state(grid: SpectralGrid, energy_factor=1.5, const=CONST):
    """Equilibrium-module state with the grid's number and energy densities."""
    rho = number_density(grid)
    u = energy_density(grid)
    inp = BalanceInputs(rho=rho, omega_p=grid.omega_0, omega_0=grid.omega_0, m_eff=grid.m_eff, L=grid.L,
                        mean_excess_energy=u / rho)
    if grid.dimensionality == "D3":
        return solve_equilibrium_3d(inp, energy_factor=energy_factor, const=const)
    return solve_equilibrium_2d(inp, dispersion="Quadratic", const=const)


def predicted_occupation(grid: SpectralGrid, state) -> np.ndarray:
    """Bose-Einstein occupation of ``state`` on the grid; any condensate goes to bin 0."""
    if state.T_eff == 0:
        f = np.zeros(grid.n_bins)
    else:
        f = bose_einstein(grid.eps, state.beta, state.kappa)
    if state.rho0 > 0:
        f = f.copy()
        f[0] += state.rho0 / (grid.dos[0] * grid.d_eps)
    return f


def l1_distance(grid: SpectralGrid, f_ref) -> float:
    """Number-weighted relative L1 distance between ``grid.f`` and ``f_ref``."""
    w = grid.dos * grid.d_eps
    return float(np.sum(w * np.abs(grid.f - f_ref)) / np.sum(w * f_ref))


@dataclass
class Trajectory:
    t: list = field(default_factory=list)
    rho: list = field(default_factory=list)
    u: list = field(default_factory=list)
    S: list = field(default_factory=list)
    T_fit: list = field(default_factory=list)
    kappa_fit: list = field(default_factory=list)
    L1_to_BE: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    final: SpectralGrid | None = None
    target: object = None
    f_target: np.ndarray | None = None
    stats: StepStats = field(default_factory=StepStats)

    COLUMNS = ("t", "rho", "u", "S", "T_fit", "kappa_fit", "L1_to_BE")

    def rows(self):
        return list(zip(*(getattr(self, c) for c in self.COLUMNS)))

    def time_to(self, l1_threshold):
        for t, d in zip(self.t, self.L1_to_BE):
            if d < l1_threshold:
                return t
        return math.inf


def _drift(value, ref):
    return abs(value - ref) / abs(ref)


def evolve(grid: SpectralGrid, cfg: SimConfig, keep_snapshots=False, energy_factor=1.5,
           const=CONST) -> Trajectory:
    """Integrate the kinetic equation from ``grid`` until ``cfg.t_end`` or equilibrium stall.

    The run stops early once the Bose fit residual is below ``cfg.fit_tol``
    and the L1 distance to the predicted state changes by less than
    ``cfg.stall_tol`` between two records.
    """
    traj = Trajectory()
    rho0 = number_density(grid)
    u0 = energy_density(grid)
    target = predicted_state(grid, energy_factor, const)
    f_target = predicted_occupation(grid, target)
    traj.target, traj.f_target = target, f_target
    stats = traj.stats

    def record(g, t):
        traj.t.append(t)
        traj.rho.append(number_density(g))
        traj.u.append(energy_density(g))
        traj.S.append(entropy_density(g))
        try:
            T, kap, _ = bose_fit(g, const)
        except FitError:
            T, kap = math.nan, math.nan
        traj.T_fit.append(T)
        traj.kappa_fit.append(kap)
        traj.L1_to_BE.append(l1_distance(g, f_target))
        if keep_snapshots:
            traj.snapshots.append((t, g.f.copy()))

    t = 0.0
    dt = cfg.dt_init if cfg.dt_init is not None else 1e-3 / cfg.rate_constant
    record(grid, t)
    while t < cfg.t_end and stats.steps < cfg.max_steps:
        dt = min(dt, cfg.t_end - t)
        grid, taken, dt = step(grid, cfg, dt, stats)
        t += taken
        rho, u = number_density(grid), energy_density(grid)
        if _drift(rho, rho0) > cfg.conservation_tol or _drift(u, u0) > cfg.conservation_tol:
            raise ConservationError(
                f"conservation drift beyond {cfg.conservation_tol:g} at t={t:.6g}",
                {"t": t, "rho_drift": _drift(rho, rho0), "u_drift": _drift(u, u0), "steps": stats.steps},
            )
        if stats.steps % cfg.record_every == 0:
            record(grid, t)
            if len(traj.t) >= 2 and abs(traj.L1_to_BE[-1] - traj.L1_to_BE[-2]) < cfg.stall_tol:
                _, _, res = bose_fit(grid, const)
                if res < cfg.fit_tol:
                    break
    if traj.t[-1] != t:
        record(grid, t)
    traj.final = grid
    return traj
