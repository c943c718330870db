import numpy as np
import pytest

import zenoauger as za


@pytest.fixture(scope="session")
def li_baseline():
    """Field-free lithium decay over 100 fs (shared by several tests)."""
    cfg = za.preset_config("li", overrides=["drive.mode=off"])
    return za.execute(cfg)


@pytest.fixture(scope="session")
def li_point_a():
    """Driven lithium at 5.1 TW/cm^2, t_m = 0.32 fs."""
    return za.execute(za.preset_config("li"))


def small_system(tau1_fs=8.0, tau2_fs=20.0, n_points=63, window_ev=3.0):
    """A compact two-continuum system for solver-level tests."""
    levels = za.LevelScheme(
        E1=za.ev_to_au(35.0), E2=za.ev_to_au(45.0), eps_c=0.0,
        tau1=za.fs_to_au(tau1_fs), tau2=za.fs_to_au(tau2_fs))
    grid_s = za.build_grid("S", levels.epsA1, za.ev_to_au(window_ev),
                           n_points, 1, levels.tau1)
    grid_p = za.build_grid("P", levels.epsA2, za.ev_to_au(window_ev),
                           n_points, 1, levels.tau2)
    return levels, grid_s, grid_p, za.assemble(levels, grid_s, grid_p)


def random_state(ham, seed=0):
    rng = np.random.default_rng(seed)
    data = rng.normal(size=ham.dimension) + 1j * rng.normal(size=ham.dimension)
    data /= np.linalg.norm(data)
    return data
