import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from photon_bec import boltzmann as bz
from photon_bec.core import CONST
from photon_bec.errors import ConservationError, FitError, ValidationError

M_EFF = 3.0556e-36
OMEGA_0 = 1.2558e15
L = 5.208e-7
KT = CONST.kB * 3000.0


def grid(dim="D3", n=32, eps_max=12 * KT, f=None):
    return bz.make_grid(dim, n, eps_max, M_EFF, OMEGA_0, L=L if dim == "D2" else None, f=f)


def brute_force_rates(f, dim):
    """Direct O(N^4) sum over ordered (j, k, l) with k + l = i + j and the full bracket."""
    n = f.size
    w = bz.bin_sqrt_weights(n) if dim == "D3" else np.ones(n)
    C = np.zeros(n)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                ll = i + j - k
                if not 0 <= ll < n:
                    continue
                W = w[min(i, j, k, ll)]
                gain = f[k] * f[ll] * (1 + f[i]) * (1 + f[j])
                loss = f[i] * f[j] * (1 + f[k]) * (1 + f[ll])
                C[i] += W * (gain - loss)
        C[i] /= w[i]
    return C


def test_grid_invariants():
    with pytest.raises(ValidationError):
        grid(n=8)
    with pytest.raises(ValidationError):
        grid(f=-np.ones(32))
    g = grid()
    assert g.d_eps > 0 and g.n_bins == 32
    assert np.allclose(g.eps, (np.arange(32) + 0.5) * g.d_eps)


def test_3d_dos_matches_continuum_integral():
    # bin-averaged sqrt(eps) weights integrate the continuum DOS exactly per bin
    g = grid(n=64)
    pref = 2 / (4 * math.pi**2) * (2 * M_EFF / CONST.hbar**2) ** 1.5
    edges = np.arange(65) * g.d_eps
    exact = pref * (2 / 3) * np.diff(edges**1.5)
    assert np.allclose(g.dos * g.d_eps, exact, rtol=1e-12)


def test_2d_dos_constant():
    g = grid("D2")
    assert np.allclose(g.dos, 2 * M_EFF / (2 * math.pi * CONST.hbar**2 * L), rtol=1e-14)


@pytest.mark.parametrize("dim", ["D2", "D3"])
def test_initial_states_hold_density(dim):
    g = grid(dim)
    eps_p = 3 * KT
    for state in (bz.gaussian_state(g, eps_p, 0.3 * KT, 1e18), bz.uniform_state(g, KT, 5 * KT, 1e18),
                  bz.monochromatic_state(g, eps_p, 1e18)):
        assert bz.number_density(state) == pytest.approx(1e18, rel=1e-12)
        assert math.isfinite(bz.energy_density(state)) and bz.entropy_density(state) > 0


@pytest.mark.parametrize("dim", ["D2", "D3"])
def test_operator_matches_brute_force(dim):
    rng = np.random.default_rng(7)
    f = rng.uniform(0, 2, 16)
    g = grid(dim, 16, f=f)
    ref = brute_force_rates(f, dim)
    k = bz.kernel_for(g)
    assert np.allclose(k.rates(f), ref, rtol=1e-10, atol=1e-12 * np.abs(ref).max())
    assert np.allclose(k.fast_rates(f)[0], ref, rtol=1e-10, atol=1e-12 * np.abs(ref).max())


def test_vacuum():
    assert np.all(bz.collision_operator(grid()) == 0.0)


@given(st.floats(0.2, 5.0), st.floats(0.0, 3.0), st.sampled_from(["D2", "D3"]))
def test_be_fixed_point(T_scale, kappa, dim):
    g = grid(dim, 48)
    f = bz.bose_einstein(g.eps, 1 / (T_scale * KT), kappa)
    k = bz.kernel_for(g)
    C = k.fast_rates(f)[0]
    assert np.max(np.abs(C) / k.magnitude(f)) < 1e-10


@given(arrays(np.float64, 32, elements=st.floats(1e-6, 5.0)), st.sampled_from(["D2", "D3"]))
def test_conservation_and_h_theorem(f, dim):
    g = grid(dim, f=f)
    C = bz.collision_operator(g)
    flux = g.dos * C * g.d_eps
    # judge against the gain term: C itself can vanish up to rounding
    scale = np.sum(g.dos * bz.kernel_for(g).magnitude(f) * g.d_eps)
    assert abs(np.sum(flux)) <= 1e-12 * scale
    assert abs(np.sum(flux * g.eps)) <= 1e-12 * scale * g.eps[-1]
    # dS/dt = sum_i g_i C_i ln((1 + f_i) / f_i) >= 0
    log_ratio = np.log1p(1 / f)
    assert np.sum(flux * log_ratio) >= -1e-12 * scale * log_ratio.max()


def test_step_preserves_be_state():
    g = grid(n=48)
    g = g.with_f(bz.bose_einstein(g.eps, 1 / KT, 0.7))
    cfg = bz.SimConfig(t_end=1.0, rate_constant=1e-9)
    g2, dt, _ = bz.step(g, cfg, 1e6)
    assert dt > 0
    assert np.max(np.abs(g2.f - g.f) / g.f) < 1e-10


def test_bose_fit_exact_and_noisy():
    g = grid(n=64)
    T, kappa = 3000.0, 0.8
    be = g.with_f(bz.bose_einstein(g.eps, 1 / (CONST.kB * T), kappa))
    Tf, kf, res = bz.bose_fit(be)
    assert Tf == pytest.approx(T, rel=1e-6) and kf == pytest.approx(kappa, rel=1e-6)
    assert res < 1e-10
    rng = np.random.default_rng(12345)
    noisy = be.with_f(be.f * (1 + 0.01 * rng.standard_normal(64)))
    assert bz.bose_fit(noisy)[0] == pytest.approx(T, rel=0.03)
    spike = bz.monochromatic_state(g, 3 * KT, 1e18)
    spike = spike.with_f(spike.f + 1e-20)
    assert bz.bose_fit(spike)[2] > 0.1
    with pytest.raises(FitError):
        bz.bose_fit(g)


def test_predicted_occupation_holds_density():
    g = bz.gaussian_state(grid(n=64), 2 * KT, 0.2 * KT, 2e18)
    state = bz.predicted_state(g)
    f = bz.predicted_occupation(g, state)
    assert bz.number_density(g.with_f(f)) == pytest.approx(2e18, rel=2e-3)


def test_conservation_abort():
    g = bz.gaussian_state(grid(n=32), 2 * KT, 0.3 * KT, 2e18)
    K = bz.calibrate_rate_constant(g, 1.44, 1.5e-34)
    with pytest.raises(ConservationError):
        bz.evolve(g, bz.SimConfig(t_end=1e9, rate_constant=K, conservation_tol=1e-30))


def test_calibration_matches_classical_rate():
    g = bz.gaussian_state(grid(n=32), 2 * KT, 0.3 * KT, 2e18)
    K = bz.calibrate_rate_constant(g, 1.44, 1.5e-34)
    assert bz.mean_classical_rate(g, K) == pytest.approx(2e18 * CONST.c / 1.44 * 1.5e-34, rel=1e-12)


def test_linear_response_rate(sim3d_config):
    from photon_bec import scenario

    g0, kin, meta = scenario.simulation_setup(sim3d_config)
    state = bz.predicted_state(g0)
    be = g0.with_f(bz.bose_einstein(g0.eps, state.beta, state.kappa))
    ia = int(meta["eps_p"] / g0.d_eps)
    ib = ia + 1
    d = 1e-6 * be.f[ia]
    df = np.zeros(be.n_bins)
    df[ia], df[ib] = d, -d * be.dos[ia] / be.dos[ib]
    C = bz.collision_operator(be.with_f(be.f + df), kin.rate_constant)
    rate_tau = -C[ia] / d * meta["tau_relax"]
    assert 1 / 3 < rate_tau < 3


@pytest.mark.slow
class TestReferenceRuns:
    def test_3d_conservation_and_entropy(self, run_3d):
        traj, summary = run_3d
        assert summary["steps"] > 1e4
        assert summary["rho_drift"] < 1e-6 and summary["u_drift"] < 1e-6
        assert np.all(np.diff(traj.S) >= 0)

    def test_3d_relaxes_to_predicted_state(self, run_3d):
        traj, summary = run_3d
        assert summary["L1_final"] < 1e-2
        assert 0.1 < summary["t_equilibrium_over_tau_relax"] < 10
        assert summary["T_fit"] == pytest.approx(summary["T_target"], rel=0.02)
        assert summary["kappa_fit"] == pytest.approx(summary["kappa_target"], rel=0.02)

    def test_2d_reference(self, run_2d):
        traj, summary = run_2d
        assert summary["rho_drift"] < 1e-6 and summary["u_drift"] < 1e-6
        assert np.all(np.diff(traj.S) >= 0)
        assert summary["L1_final"] < 1e-2
        assert summary["T_fit"] == pytest.approx(summary["T_target"], rel=0.02)
        assert summary["kappa_fit"] == pytest.approx(summary["kappa_target"], rel=0.02)

    def test_grid_refinement(self, run_3d, run_3d_fine):
        coarse = run_3d[0].final
        fine_T, fine_k, _ = bz.bose_fit(run_3d_fine[0].final)
        T, k, _ = bz.bose_fit(coarse)
        f_c = bz.bose_einstein(coarse.eps, 1 / (CONST.kB * T), k)
        f_f = bz.bose_einstein(coarse.eps, 1 / (CONST.kB * fine_T), fine_k)
        assert bz.l1_distance(coarse.with_f(f_c), f_f) < 1e-3

    def test_step_size_refinement(self, fixed_time_pair):
        a, b = fixed_time_pair
        assert a.t[-1] == pytest.approx(b.t[-1], rel=1e-12)
        assert bz.l1_distance(b.final, a.final.f) < 1e-4
