# dataset.py

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterator, List, Tuple, Union

import numpy as np
from joblib import Parallel, delayed

from skinperm.artifacts import PathLike
from skinperm.em.materials import FrequencyGrid
from skinperm.errors import CoverageError, DatasetError
from skinperm.measurement.touchstone import MeasurementTrace, read_touchstone

logger = logging.getLogger(__name__)

PASSTHROUGH_TOL = 1e6  # Hz
TRACE_SUFFIX = ".s1p"


@dataclass
class DatasetIndex:
    """
    volunteer id -> location id -> repeats, every level in lexicographic order.
    """

    volunteers: Dict[str, Dict[str, List[MeasurementTrace]]] = field(default_factory=dict)

    def __len__(self) -> int:
        return sum(len(repeats) for locations in self.volunteers.values() for repeats in locations.values())

    def traces(self) -> Iterator[Tuple[str, str, MeasurementTrace]]:
        for volunteer, locations in self.volunteers.items():
            for location, repeats in locations.items():
                for trace in repeats:
                    yield volunteer, location, trace


@dataclass(frozen=True)
class DatasetFailure:
    path: str
    reason: str


def _read(path: Path) -> Union[MeasurementTrace, DatasetFailure]:
    try:
        return read_touchstone(path)
    except Exception as e:
        return DatasetFailure(str(path), f"{e.__class__.__name__}: {e}")


def _subdirs(path: Path) -> List[Path]:
    return sorted((p for p in path.iterdir() if p.is_dir()), key=lambda p: p.name)


def load_dataset(root: PathLike, n_jobs: int = 1) -> Tuple[DatasetIndex, List[DatasetFailure]]:
    """
    Index `<root>/<volunteer>/<location>/<repeat>.s1p`.

    Files that fail to parse are reported, not raised; files with other suffixes are ignored.

    :param root: dataset directory
    :param n_jobs: joblib workers for parsing
    :return: (index, failures), both in lexicographic path order
    :raises DatasetError: root is missing or unreadable
    """
    root = Path(root)
    if not root.is_dir():
        raise DatasetError(f"dataset root {root} is not a directory")

    entries: List[Tuple[str, str, Path]] = []
    try:
        for volunteer in _subdirs(root):
            for location in _subdirs(volunteer):
                for path in sorted(location.iterdir(), key=lambda p: p.name):
                    if path.is_file() and path.suffix.lower() == TRACE_SUFFIX:
                        entries.append((volunteer.name, location.name, path))
    except OSError as e:
        raise DatasetError(f"cannot read dataset root {root}: {e}") from e

    results = Parallel(n_jobs=n_jobs)(delayed(_read)(path) for _, _, path in entries)

    index = DatasetIndex()
    failures: List[DatasetFailure] = []
    for (volunteer, location, _), result in zip(entries, results):
        if isinstance(result, DatasetFailure):
            logger.warning("skipping %s: %s", result.path, result.reason)
            failures.append(result)
            continue
        index.volunteers.setdefault(volunteer, {}).setdefault(location, []).append(result)
    logger.info("indexed %d traces from %d volunteers (%d failures)", len(index), len(index.volunteers), len(failures))
    return index, failures


def align_trace(trace: MeasurementTrace, grid: Union[FrequencyGrid, np.ndarray], tol: float = PASSTHROUGH_TOL) -> MeasurementTrace:
    """
    Resample a trace onto `grid`.

    Grid frequencies within `tol` of a measured frequency take that sample unchanged, the rest
    are linearly interpolated in real and imaginary part.

    :raises CoverageError: the grid reaches beyond the trace
    """
    target = grid.frequencies() if isinstance(grid, FrequencyGrid) else np.asarray(grid, dtype=float)
    f0, f1 = trace.span
    if target[0] < f0 - tol or target[-1] > f1 + tol:
        raise CoverageError((f0, f1), (float(target[0]), float(target[-1])))

    gamma = np.interp(target, trace.freq, trace.gamma.real) + 1j * np.interp(target, trace.freq, trace.gamma.imag)
    nearest = np.clip(np.searchsorted(trace.freq, target), 1, max(len(trace) - 1, 1))
    candidates = np.stack([trace.freq[nearest - 1], trace.freq[np.minimum(nearest, len(trace) - 1)]])
    pick = np.argmin(np.abs(candidates - target), axis=0)
    index = np.where(pick == 0, nearest - 1, np.minimum(nearest, len(trace) - 1))
    exact = np.abs(trace.freq[index] - target) <= tol
    gamma = np.where(exact, trace.gamma[index], gamma)
    return MeasurementTrace(target.copy(), gamma, source=trace.source, format=trace.format, z0=trace.z0)
