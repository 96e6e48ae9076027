"""
Inversion of measured traces and the cohort statistics built on top of it.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from skinperm.errors import GridMismatchError, InvalidArgumentError
from skinperm.handlers import ResultHandler
from skinperm.inverse.bank import BankInverseSolver, ModelBank
from skinperm.measurement.touchstone import MeasurementTrace

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PermittivityTrace:
    freq: np.ndarray
    eps_real: np.ndarray
    eps_imag: np.ndarray
    extrapolated: np.ndarray
    source: str = "<memory>"

    def __post_init__(self):
        n = np.shape(self.freq)
        if not (np.shape(self.eps_real) == np.shape(self.eps_imag) == np.shape(self.extrapolated) == n):
            raise InvalidArgumentError(f"{self.source}: freq, eps and flag arrays must have equal length")
        if not np.all(np.diff(self.freq) > 0):
            raise InvalidArgumentError(f"{self.source}: frequencies must be strictly ascending")

    @property
    def eps(self) -> np.ndarray:
        return self.eps_real - 1j * self.eps_imag

    @property
    def n_flagged(self) -> int:
        return int(np.count_nonzero(self.extrapolated))


@dataclass(frozen=True)
class RepeatabilityReport:
    """
    Per-frequency max |x_k - mean|/|mean| of eps' and eps'', plus relative sample std.
    """

    freq: np.ndarray
    rel_dev_real: np.ndarray
    rel_dev_imag: np.ndarray
    rel_std_real: np.ndarray
    rel_std_imag: np.ndarray
    max_rel_dev_real: float
    max_rel_dev_imag: float
    n_repeats: int


@dataclass(frozen=True)
class VariationReport:
    freq: np.ndarray
    width_real: np.ndarray
    width_imag: np.ndarray
    max_width_real: float
    max_width_imag: float
    n_traces: int


@dataclass(frozen=True)
class CohortEnvelope:
    freq: np.ndarray
    real_min: np.ndarray
    real_max: np.ndarray
    imag_min: np.ndarray
    imag_max: np.ndarray


def invert_trace(
    bank: ModelBank,
    trace: MeasurementTrace,
    handlers: Optional[List[ResultHandler]] = None,
    n_jobs: int = 1,
) -> PermittivityTrace:
    """
    Run every point of an aligned trace through the bank.

    :param n_jobs: joblib workers over frequency points; results do not depend on it
    :raises GridMismatchError: trace frequencies differ from the bank's
    """
    if not np.array_equal(trace.freq, bank.frequencies):
        raise GridMismatchError(
            f"{trace.source}: trace has {len(trace)} points on "
            f"{trace.span[0]:.6g}-{trace.span[1]:.6g} Hz, bank expects {bank.frequencies.size} points; align it first"
        )
    solver = BankInverseSolver(bank, handlers)
    estimates = solver.predict_sweep(trace.freq.tolist(), trace.gamma.tolist(), n_jobs=n_jobs)
    return PermittivityTrace(
        freq=trace.freq.copy(),
        eps_real=np.array([e.eps_real for e in estimates]),
        eps_imag=np.array([e.eps_imag for e in estimates]),
        extrapolated=np.array([e.extrapolated for e in estimates], dtype=bool),
        source=trace.source,
    )


def _shared_grid(traces: Sequence[PermittivityTrace], minimum: int) -> np.ndarray:
    if len(traces) < minimum:
        raise InvalidArgumentError(f"need at least {minimum} traces, got {len(traces)}")
    freq = traces[0].freq
    for t in traces[1:]:
        if not np.array_equal(t.freq, freq):
            raise GridMismatchError(f"{t.source} is not on the grid of {traces[0].source}")
    return freq


def volunteer_mean(traces: Sequence[PermittivityTrace], source: str = "<mean>") -> PermittivityTrace:
    """
    Arithmetic mean of eps' and eps'' per frequency; a flag on any input flags the mean.
    """
    freq = _shared_grid(traces, 1)
    return PermittivityTrace(
        freq=freq.copy(),
        eps_real=np.mean([t.eps_real for t in traces], axis=0),
        eps_imag=np.mean([t.eps_imag for t in traces], axis=0),
        extrapolated=np.any([t.extrapolated for t in traces], axis=0),
        source=source,
    )


def location_weighted_mean(locations: Dict[str, Sequence[PermittivityTrace]], source: str = "<mean>") -> PermittivityTrace:
    """
    Mean over locations of the per-location repeat means, so every finger location counts once.
    """
    per_location = [volunteer_mean(repeats, source=f"{source}/{loc}") for loc, repeats in locations.items()]
    return volunteer_mean(per_location, source=source)


def repeatability(traces: Sequence[PermittivityTrace]) -> RepeatabilityReport:
    freq = _shared_grid(traces, 2)
    re = np.array([t.eps_real for t in traces])
    im = np.array([t.eps_imag for t in traces])
    mean_re, mean_im = re.mean(axis=0), im.mean(axis=0)
    dev_re = np.max(np.abs(re - mean_re), axis=0) / np.abs(mean_re)
    dev_im = np.max(np.abs(im - mean_im), axis=0) / np.abs(mean_im)
    return RepeatabilityReport(
        freq=freq.copy(),
        rel_dev_real=dev_re,
        rel_dev_imag=dev_im,
        rel_std_real=re.std(axis=0, ddof=1) / np.abs(mean_re),
        rel_std_imag=im.std(axis=0, ddof=1) / np.abs(mean_im),
        max_rel_dev_real=float(dev_re.max()),
        max_rel_dev_imag=float(dev_im.max()),
        n_repeats=len(traces),
    )


def variation_report(traces: Sequence[PermittivityTrace]) -> VariationReport:
    """
    Envelope width max - min of eps' and eps'' per frequency over one volunteer's traces.
    """
    freq = _shared_grid(traces, 1)
    re = np.array([t.eps_real for t in traces])
    im = np.array([t.eps_imag for t in traces])
    width_re = re.max(axis=0) - re.min(axis=0)
    width_im = im.max(axis=0) - im.min(axis=0)
    return VariationReport(
        freq=freq.copy(),
        width_real=width_re,
        width_imag=width_im,
        max_width_real=float(width_re.max()),
        max_width_imag=float(width_im.max()),
        n_traces=len(traces),
    )


def cohort_envelope(means: Sequence[PermittivityTrace]) -> CohortEnvelope:
    """
    Per-frequency minimum and maximum of the per-volunteer means.
    """
    freq = _shared_grid(means, 1)
    re = np.array([t.eps_real for t in means])
    im = np.array([t.eps_imag for t in means])
    return CohortEnvelope(
        freq=freq.copy(),
        real_min=re.min(axis=0),
        real_max=re.max(axis=0),
        imag_min=im.min(axis=0),
        imag_max=im.max(axis=0),
    )
