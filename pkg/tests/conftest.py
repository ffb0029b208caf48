import dataclasses
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from photon_bec import boltzmann as bz
from photon_bec import scenario
from photon_bec.config import load_config

settings.register_profile(
    "fixed",
    max_examples=100,
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("fixed")

CONFIG_DIR = Path(__file__).resolve().parents[1] / "src" / "photon_bec" / "configs"

_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def config_dir():
    return CONFIG_DIR


@pytest.fixture(scope="session")
def sim3d_config():
    return load_config(CONFIG_DIR / "simulate_3d.cfg")


@pytest.fixture(scope="session")
def sim2d_config():
    return load_config(CONFIG_DIR / "simulate_2d.cfg")


@pytest.fixture(scope="session")
def run_3d(sim3d_config):
    """Reference 3D kinetic run, shared by the simulator and acceptance tests."""
    traj, summary = scenario.simulate(sim3d_config)
    return traj, summary


@pytest.fixture(scope="session")
def run_2d(sim2d_config):
    return scenario.simulate(sim2d_config)


@pytest.fixture(scope="session")
def run_3d_fine(sim3d_config):
    """Same scenario on twice as many bins."""
    cfg = dataclasses.replace(sim3d_config, sim=dataclasses.replace(sim3d_config.sim, n_bins=256))
    return scenario.simulate(cfg)


@pytest.fixture(scope="session")
def fixed_time_pair(sim3d_config):
    """Two runs to t = 20 tau_relax, the second with half the step-size limit."""
    grid, kin, meta = scenario.simulation_setup(sim3d_config)
    out = []
    for mrc in (kin.max_rel_change, 0.5 * kin.max_rel_change):
        k = dataclasses.replace(kin, t_end=20 * meta["tau_relax"], max_rel_change=mrc, stall_tol=0.0,
                                record_every=1000)
        out.append(bz.evolve(grid, k))
    return out
