import time

import pytest

from qlimit import SimulationConfig, Trajectory, evolve

FIG2_KWARGS = dict(
    q=10,
    kappa=0.2,
    mu=1.0,
    beta=0.1,
    omega=0.0002,
    t_end=28800.0,
    dt=1.0,
    snapshots=(0.0, 1800.0, 3600.0, 7200.0, 14400.0, 28800.0),
)


@pytest.fixture(scope="session")
def fig2_config() -> SimulationConfig:
    return SimulationConfig(**FIG2_KWARGS)


@pytest.fixture(scope="session")
def fig2_reference(fig2_config) -> tuple[Trajectory, float]:
    """Converged run of the standard market day (magnus2 at dt/8) and its wall time."""
    t0 = time.perf_counter()
    traj = evolve(SimulationConfig(**{**FIG2_KWARGS, "method": "reference"}))
    return traj, time.perf_counter() - t0
