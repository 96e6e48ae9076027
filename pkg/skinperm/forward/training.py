# training.py

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Literal, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from skinperm._version import __version__
from skinperm.artifacts import PathLike, atomic_write_json, atomic_write_text, csv_text, sidecar_path
from skinperm.em.materials import (
    ComplexPermittivity,
    FrequencyGrid,
    check_backing_depth,
    check_sheet_thickness,
)
from skinperm.errors import ForwardSolverError, InvalidArgumentError, TableFormatError
from skinperm.forward.solver import ForwardConfig, reflection_coefficient

logger = logging.getLogger(__name__)

TABLE_COLUMNS = ("freq_hz", "eps_real", "eps_imag", "gamma_real", "gamma_imag")
TABLE_FORMAT = "skinperm-training-table"
TABLE_FORMAT_VERSION = 1

Sampling = Literal["random", "lattice"]


class SweepBox(BaseModel):
    """
    Rectangle of (eps_real, eps_imag) values swept when generating training data.
    """

    model_config = ConfigDict(frozen=True)

    eps_real: Tuple[float, float] = (3.0, 6.0)
    eps_imag: Tuple[float, float] = (1.0, 4.0)

    @model_validator(mode="after")
    def _check_bounds(self) -> "SweepBox":
        (r0, r1), (i0, i1) = self.eps_real, self.eps_imag
        if not (0 < r0 < r1 and 0 <= i0 < i1) or not np.all(np.isfinite([r0, r1, i0, i1])):
            raise ValueError(f"sweep box bounds must be ordered and physical: {self.eps_real}, {self.eps_imag}")
        return self

    def widened(self, fraction: float) -> Tuple[Tuple[float, float], Tuple[float, float]]:
        """
        Bounds grown on each side by `fraction` of the axis range (may leave the physical domain).
        """
        (r0, r1), (i0, i1) = self.eps_real, self.eps_imag
        dr, di = fraction * (r1 - r0), fraction * (i1 - i0)
        return (r0 - dr, r1 + dr), (i0 - di, i1 + di)

    def contains(self, eps_real: float, eps_imag: float, fraction: float = 0.0) -> bool:
        (r0, r1), (i0, i1) = self.widened(fraction)
        return r0 <= eps_real <= r1 and i0 <= eps_imag <= i1

    def sample(self, n_samples: int, seed: int, sampling: Sampling = "random") -> Tuple[np.ndarray, np.ndarray]:
        """
        Draw `n_samples` points in the box.

        `random` draws uniformly with numpy's default generator seeded by `seed`; `lattice`
        places them on a sqrt(n) x sqrt(n) grid including the box edges (real part varies
        slowest) and ignores the seed.
        """
        if sampling == "random":
            rng = np.random.default_rng(seed)
            return rng.uniform(*self.eps_real, size=n_samples), rng.uniform(*self.eps_imag, size=n_samples)
        if sampling == "lattice":
            side = int(round(np.sqrt(n_samples)))
            if side * side != n_samples:
                raise InvalidArgumentError(f"lattice sampling needs a square sample count, got {n_samples}")
            re, im = np.meshgrid(np.linspace(*self.eps_real, side), np.linspace(*self.eps_imag, side), indexing="ij")
            return re.ravel(), im.ravel()
        raise InvalidArgumentError(f"unknown sampling {sampling!r}")


@dataclass(frozen=True)
class ReflectionSample:
    freq: float
    eps: ComplexPermittivity
    gamma: complex


class TableHeader(BaseModel):
    """
    Provenance of a training table, stored in the `.meta.json` sidecar.
    """

    model_config = ConfigDict(frozen=True)

    format: Literal["skinperm-training-table"] = TABLE_FORMAT
    format_version: int = TABLE_FORMAT_VERSION
    grid: FrequencyGrid
    sweep_box: SweepBox = Field(default_factory=SweepBox)
    n_samples: int = Field(ge=4)
    seed: int
    sampling: Sampling = "random"
    forward: ForwardConfig = Field(default_factory=ForwardConfig)
    tool_version: str = __version__


@dataclass(frozen=True)
class TrainingTable:
    """
    Gamma for every (frequency, sample) pair.

    eps holds the complex permittivities eps_real - j*eps_imag in generation order, gamma has
    shape (n_frequencies, n_samples).
    """

    header: TableHeader
    eps: np.ndarray
    gamma: np.ndarray

    @property
    def grid(self) -> FrequencyGrid:
        return self.header.grid

    @property
    def frequencies(self) -> np.ndarray:
        return self.grid.frequencies()

    @property
    def n_samples(self) -> int:
        return int(self.eps.size)

    def samples(self, index: int) -> List[ReflectionSample]:
        freq = float(self.frequencies[index])
        return [
            ReflectionSample(freq, ComplexPermittivity.from_complex(e), complex(g))
            for e, g in zip(self.eps, self.gamma[index])
        ]


def _solve_frequency(freq: float, eps: np.ndarray, cfg: ForwardConfig) -> np.ndarray:
    out = np.empty(eps.size, dtype=complex)
    for i, e in enumerate(eps):
        permittivity = ComplexPermittivity.from_complex(e)
        try:
            out[i] = reflection_coefficient(freq, permittivity, cfg)
        except Exception as exc:
            raise ForwardSolverError(complex(e), freq, exc) from exc
    logger.info("solved %d samples at %.6g Hz", eps.size, freq)
    return out


def generate_training_table(
    sweep_box: SweepBox,
    n_samples: int,
    grid: FrequencyGrid,
    seed: int,
    cfg: Optional[ForwardConfig] = None,
    *,
    sampling: Sampling = "random",
    n_jobs: int = 1,
) -> TrainingTable:
    """
    Sweep the skin permittivity over `sweep_box` and solve the forward model on `grid`.

    :param sweep_box: permittivity rectangle
    :param n_samples: number of permittivity samples, at least 4
    :param grid: frequency grid; must keep the waveguide single-moded
    :param seed: generator seed for random sampling
    :param cfg: forward configuration
    :param sampling: `random` or `lattice`
    :param n_jobs: joblib workers, one task per frequency; results do not depend on it
    :raises ForwardSolverError: wraps any failure with the offending (eps, f)
    """
    if n_samples < 4:
        raise InvalidArgumentError(f"n_samples must be >= 4, got {n_samples}")
    cfg = cfg or ForwardConfig()
    cfg.waveguide.check_band(grid.start, grid.stop)
    check_sheet_thickness(cfg.stack, grid.stop)
    least_lossy = ComplexPermittivity(eps_real=sweep_box.eps_real[0], eps_imag=sweep_box.eps_imag[0])
    check_backing_depth(cfg.stack.replace_skin(least_lossy), grid.start)

    re, im = sweep_box.sample(n_samples, seed, sampling)
    eps = re - 1j * im
    header = TableHeader(
        grid=grid, sweep_box=sweep_box, n_samples=n_samples, seed=seed, sampling=sampling, forward=cfg
    )
    freqs = grid.frequencies()
    logger.info("generating %d x %d training table (%s sampling)", freqs.size, n_samples, sampling)
    rows = Parallel(n_jobs=n_jobs)(delayed(_solve_frequency)(float(f), eps, cfg) for f in freqs)
    return TrainingTable(header=header, eps=eps, gamma=np.vstack(rows))


def save_table(table: TrainingTable, path: PathLike) -> Path:
    """
    Write the table as CSV and its header as a `.meta.json` sidecar, both atomically.
    """
    rows = (
        (float(f), float(e.real), float(-e.imag), float(g.real), float(g.imag))
        for f, gammas in zip(table.frequencies, table.gamma)
        for e, g in zip(table.eps, gammas)
    )
    target = atomic_write_text(path, csv_text(TABLE_COLUMNS, rows))
    atomic_write_json(sidecar_path(path), table.header.model_dump(mode="json"))
    return target


def load_table(path: PathLike) -> TrainingTable:
    """
    Read a table written by `save_table`.

    :raises TableFormatError: missing sidecar, bad header or inconsistent rows
    """
    meta = sidecar_path(path)
    try:
        header = TableHeader.model_validate_json(Path(meta).read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise TableFormatError(f"missing metadata sidecar {meta}") from e
    except ValidationError as e:
        raise TableFormatError(f"bad metadata sidecar {meta}: {e}") from e

    with open(path, encoding="utf-8") as f:
        first = f.readline().strip()
        if tuple(first.split(",")) != TABLE_COLUMNS:
            raise TableFormatError(f"{path}: expected header {','.join(TABLE_COLUMNS)}, got {first!r}")
        try:
            data = np.loadtxt(f, delimiter=",", ndmin=2)
        except ValueError as e:
            raise TableFormatError(f"{path}: {e}") from e

    n_freq, n = header.grid.n_points, header.n_samples
    if data.shape != (n_freq * n, len(TABLE_COLUMNS)):
        raise TableFormatError(f"{path}: expected {n_freq * n} rows of {len(TABLE_COLUMNS)} values, got {data.shape}")
    data = data.reshape(n_freq, n, len(TABLE_COLUMNS))
    if not np.array_equal(data[:, 0, 0], header.grid.frequencies()):
        raise TableFormatError(f"{path}: frequencies do not match grid {header.grid}")
    if not (np.all(data[:, :, 0] == data[:, :1, 0]) and np.all(data[:, :, 1:3] == data[:1, :, 1:3])):
        raise TableFormatError(f"{path}: samples differ between frequencies")
    (r0, r1), (i0, i1) = header.sweep_box.eps_real, header.sweep_box.eps_imag
    outside = np.flatnonzero(
        (data[0, :, 1] < r0) | (data[0, :, 1] > r1) | (data[0, :, 2] < i0) | (data[0, :, 2] > i1)
    )
    if outside.size:
        row = int(outside[0])
        raise TableFormatError(
            f"{path}: sample {row} (eps {data[0, row, 1]!r}, {data[0, row, 2]!r}) lies outside the sweep box "
            f"{header.sweep_box.eps_real} x {header.sweep_box.eps_imag}"
        )
    eps = data[0, :, 1] - 1j * data[0, :, 2]
    gamma = data[:, :, 3] + 1j * data[:, :, 4]
    return TrainingTable(header=header, eps=eps, gamma=gamma)
