"""Reports composed from a RunConfig; the CLI only formats these."""

from __future__ import annotations

import numpy as np

from photon_bec import boltzmann as bz
from photon_bec.config import RunConfig
from photon_bec.core import CONST, Dimensionality, derive_scales, intensity_from_density
from photon_bec.equilibrium import (
    BalanceInputs,
    critical_temperature_3d,
    solve_equilibrium_2d,
    solve_equilibrium_3d,
)
from photon_bec.errors import ValidationError
from photon_bec.feasibility import (
    bose_enhancement,
    density_window,
    mode_density_2d,
    mode_density_3d,
    relaxation_time,
)
from photon_bec.nonlinearity import interaction_params, parasitic_rates

MU_AT_CUTOFF_NOTE = "mu -> hbar*omega_0 (kappa < 1e-3)"


def _is_3d(cfg: RunConfig) -> bool:
    return cfg.geometry.dimensionality is Dimensionality.BANDGAP_3D


def derive_report(cfg: RunConfig) -> dict:
    d = derive_scales(cfg.material, cfg.geometry, cfg.pulse, cfg.solver.delta_T)
    inter = interaction_params(cfg.material, d.lambda_0, d.m_eff)
    intensity = intensity_from_density(cfg.pulse.photon_density, d.omega_p, cfg.material)
    raman, brillouin = parasitic_rates(intensity, cfg.material)
    out = {"dimensionality": cfg.geometry.dimensionality.value}
    out.update(d.as_dict())
    out.update(inter.__dict__)
    out.update(intensity=intensity, raman_rate=raman, brillouin_rate=brillouin)
    return out


def feasibility_report(cfg: RunConfig):
    d = derive_scales(cfg.material, cfg.geometry, cfg.pulse, cfg.solver.delta_T)
    a = interaction_params(cfg.material, d.lambda_0, d.m_eff).a
    return density_window(cfg.material, cfg.geometry, d.lambda_0, cfg.pulse.lambda_p, a, d.rho_l,
                          cfg.margin_threshold, cfg.solver.rho_ref)


def balance_inputs(cfg: RunConfig, rho=None) -> BalanceInputs:
    d = derive_scales(cfg.material, cfg.geometry, cfg.pulse, cfg.solver.delta_T)
    return BalanceInputs(
        rho=cfg.pulse.photon_density if rho is None else rho,
        omega_p=d.omega_p,
        omega_0=d.omega_0,
        m_eff=d.m_eff,
        L=cfg.geometry.L,
    )


def equilibrium_state(cfg: RunConfig, dispersion="Exact"):
    inp = balance_inputs(cfg)
    if _is_3d(cfg):
        return solve_equilibrium_3d(inp, energy_factor=cfg.solver.energy_factor, max_iter=cfg.solver.max_iter)
    return solve_equilibrium_2d(inp, dispersion=dispersion, kappa_floor=cfg.solver.kappa_floor,
                                max_iter=cfg.solver.max_iter)


def equilibrium_report(cfg: RunConfig) -> dict:
    state = equilibrium_state(cfg)
    out = state.as_dict()
    rho = cfg.pulse.photon_density
    out["rho"] = rho
    out["condensate_fraction"] = state.rho0 / rho
    if _is_3d(cfg):
        out["T_c"] = critical_temperature_3d(rho, balance_inputs(cfg).m_eff)
    out["note"] = MU_AT_CUTOFF_NOTE if state.kappa < 1e-3 else ""
    return out


def relaxation_estimate(cfg: RunConfig, rho: float):
    """``(tau_relax, F)`` at density ``rho`` for the configured cavity."""
    d = derive_scales(cfg.material, cfg.geometry, cfg.pulse, cfg.solver.delta_T)
    sigma = interaction_params(cfg.material, d.lambda_0, d.m_eff).sigma
    if _is_3d(cfg):
        modes = mode_density_3d(d.m_eff, d.omega_0, d.omega_p)
    else:
        modes = mode_density_2d(cfg.geometry, d.lambda_0, cfg.pulse.lambda_p)
    F = bose_enhancement(rho, modes)
    return relaxation_time(rho, F, cfg.material, sigma), F


def simulation_setup(cfg: RunConfig, seed=None):
    """Initial grid, kinetic settings and setup metadata for the ``sim`` section.

    The grid spans ``eps_max_factor`` times the predicted equilibrium
    ``k_B T``; the pump line sits at ``hbar*(omega_p - omega_0)``. With
    ``sim.noise > 0`` the initial occupation is multiplied by
    ``1 + noise * N(0, 1)`` (clipped at zero) using ``seed``.
    """
    sim = cfg.sim
    if sim is None:
        raise ValidationError("config has no sim.* keys; simulate needs a sim section")
    d = derive_scales(cfg.material, cfg.geometry, cfg.pulse, cfg.solver.delta_T)
    rho = cfg.pulse.photon_density
    dim = "D3" if _is_3d(cfg) else "D2"
    state = equilibrium_state(cfg, dispersion="Quadratic")
    kT = CONST.kB * state.T_eff
    eps_p = CONST.hbar * (d.omega_p - d.omega_0)
    grid = bz.make_grid(dim, sim.n_bins, sim.eps_max_factor * kT, d.m_eff, d.omega_0,
                        L=None if dim == "D3" else cfg.geometry.L)
    if eps_p < 2.0 * grid.d_eps:
        raise ValidationError(
            f"pump line at {eps_p:.3g} J is below two bins ({2 * grid.d_eps:.3g} J); "
            "the start state is unresolved, lower sim.eps_max_factor or raise sim.n_bins"
        )
    if sim.initial == "gaussian":
        grid = bz.gaussian_state(grid, eps_p, sim.width_factor * eps_p, rho)
    elif sim.initial == "uniform":
        half = sim.width_factor * eps_p
        grid = bz.uniform_state(grid, max(eps_p - half, 0.0), eps_p + half, rho)
    else:
        grid = bz.monochromatic_state(grid, eps_p, rho)
    if sim.noise > 0:
        rng = np.random.default_rng(seed)
        f = grid.f * np.clip(1.0 + sim.noise * rng.standard_normal(grid.n_bins), 0.0, None)
        grid = grid.with_f(f)
    sigma = interaction_params(cfg.material, d.lambda_0, d.m_eff).sigma
    tau_relax, F = relaxation_estimate(cfg, rho)
    K = sim.rate_constant if sim.rate_constant is not None else bz.calibrate_rate_constant(
        grid, cfg.material.n0, sigma)
    t_end = sim.t_end if sim.t_end is not None else sim.t_end_factor * tau_relax
    kin = bz.SimConfig(
        t_end=t_end,
        rate_constant=K,
        dt_init=sim.dt_init,
        max_rel_change=sim.max_rel_change,
        record_every=sim.record_every,
        conservation_tol=sim.conservation_tol,
    )
    meta = {"tau_relax": tau_relax, "F_degeneracy": F, "eps_p": eps_p, "d_eps": grid.d_eps}
    return grid, kin, meta


def simulate(cfg: RunConfig, seed=None, keep_snapshots=False):
    """Run the kinetic simulation; returns ``(trajectory, summary)``."""
    grid, kin, meta = simulation_setup(cfg, seed)
    traj = bz.evolve(grid, kin, keep_snapshots=keep_snapshots, energy_factor=cfg.solver.energy_factor)
    T_fit, kappa_fit, fit_res = bz.bose_fit(traj.final)
    rho0, u0 = traj.rho[0], traj.u[0]
    t_eq = traj.time_to(0.05)
    summary = {
        "dimensionality": cfg.geometry.dimensionality.value,
        "n_bins": grid.n_bins,
        "steps": traj.stats.steps,
        "rejected_steps": traj.stats.rejected,
        "clamp_events": traj.stats.clamp_events,
        "rate_constant": kin.rate_constant,
        "t_final": traj.t[-1],
        "tau_relax": meta["tau_relax"],
        "F_degeneracy": meta["F_degeneracy"],
        "t_equilibrium": t_eq,
        "t_equilibrium_over_tau_relax": t_eq / meta["tau_relax"],
        "rho_drift": max(abs(r / rho0 - 1.0) for r in traj.rho),
        "u_drift": max(abs(u / u0 - 1.0) for u in traj.u),
        "min_entropy_increment": float(np.min(np.diff(traj.S))) if len(traj.S) > 1 else 0.0,
        "L1_final": traj.L1_to_BE[-1],
        "T_fit": T_fit,
        "kappa_fit": kappa_fit,
        "fit_residual": fit_res,
        "T_target": traj.target.T_eff,
        "kappa_target": traj.target.kappa,
    }
    return traj, summary


def spectrum_rows(traj) -> list:
    """``(t, eps, f, f_target)`` rows for the final state and any snapshots."""
    grid = traj.final
    snaps = traj.snapshots or [(traj.t[-1], grid.f)]
    rows = []
    for t, f in snaps:
        for e, fi, ft in zip(grid.eps, f, traj.f_target):
            rows.append((t, float(e), float(fi), float(ft)))
    return rows


def sweep_values(start: float, stop: float, steps: int, log: bool) -> list:
    if steps < 2:
        raise ValidationError("sweep needs steps >= 2")
    if log:
        if not (start > 0 and stop > 0):
            raise ValidationError("log sweep needs positive endpoints")
        return [float(v) for v in np.geomspace(start, stop, steps)]
    return [float(v) for v in np.linspace(start, stop, steps)]


def sweep_point(cfg: RunConfig, key: str, value: float) -> dict:
    """All scalar report fields for one sweep point; errors become an ``error`` entry."""
    from photon_bec.config import with_value
    from photon_bec.errors import ConservationError, SolverError

    row = {"param": key, "value": value, "error": ""}
    try:
        point = with_value(cfg, key, value)
        for name, report in (("derive", derive_report(point)),
                             ("feasibility", feasibility_report(point).as_dict()),
                             ("equilibrium", equilibrium_report(point))):
            for k, v in report.items():
                row[f"{name}.{k}"] = v
    except (ValidationError, SolverError, ConservationError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row

