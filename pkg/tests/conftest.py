import numpy as np
import pytest

from skinperm.em import ComplexPermittivity, FrequencyGrid, WaveguideSpec
from skinperm.forward import SweepBox, TableHeader, TrainingTable
from skinperm.inverse import train_bank
from skinperm.measurement import MeasurementTrace
from skinperm.stats import PermittivityTrace


def plane_wave_gamma(eps: np.ndarray, freq: float) -> np.ndarray:
    """
    Cheap stand-in for the forward model: normal-incidence reflection off a half-space with a
    mild frequency-dependent phase. Smooth and one-to-one over the sweep box.
    """
    n = np.sqrt(np.asarray(eps, dtype=complex))
    gamma = (1.0 - n) / (1.0 + n)
    return gamma * np.exp(-1j * 0.05 * (freq - 140e9) / 80e9)


def synthetic_table(n_samples: int = 200, grid: FrequencyGrid = None, seed: int = 11) -> TrainingTable:
    grid = grid or FrequencyGrid(start=140e9, stop=220e9, n_points=3)
    box = SweepBox()
    re, im = box.sample(n_samples, seed)
    eps = re - 1j * im
    gamma = np.vstack([plane_wave_gamma(eps, f) for f in grid.frequencies()])
    header = TableHeader(grid=grid, sweep_box=box, n_samples=n_samples, seed=seed)
    return TrainingTable(header=header, eps=eps, gamma=gamma)


def flat_trace(freq: np.ndarray, eps: complex, source: str = "flat") -> PermittivityTrace:
    n = freq.size
    return PermittivityTrace(
        freq=np.asarray(freq, dtype=float),
        eps_real=np.full(n, eps.real),
        eps_imag=np.full(n, -eps.imag),
        extrapolated=np.zeros(n, dtype=bool),
        source=source,
    )


def synthetic_measurement(freq: np.ndarray, eps: complex, source: str = "synthetic.s1p") -> MeasurementTrace:
    gamma = np.array([plane_wave_gamma(np.array([eps]), f)[0] for f in freq])
    return MeasurementTrace(np.asarray(freq, dtype=float), gamma, source=source)


@pytest.fixture
def wr5() -> WaveguideSpec:
    return WaveguideSpec()


@pytest.fixture
def skin() -> ComplexPermittivity:
    return ComplexPermittivity(eps_real=4.7, eps_imag=2.4)


@pytest.fixture(scope="session")
def table() -> TrainingTable:
    return synthetic_table()


@pytest.fixture(scope="session")
def bank(table):
    return train_bank(table, spread=1.0)
