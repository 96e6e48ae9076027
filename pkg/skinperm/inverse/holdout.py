# holdout.py

import logging
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
from joblib import Parallel, delayed

from skinperm.errors import InvalidArgumentError
from skinperm.forward.training import TrainingTable
from skinperm.inverse.rbn import fit_rbn, predict_many

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ErrorReport:
    """
    Hold-out result at one frequency; per_sample[i] = |eps_i - eps_hat_i| / |eps_i|.
    """

    freq: float
    per_sample: np.ndarray
    mean: float
    max: float
    n_train: int
    n_test: int
    seed: int


@dataclass(frozen=True)
class HoldoutSummary:
    mean: float  # over all frequencies and test samples
    max_per_frequency: np.ndarray
    worst: float
    worst_freq: float


def split_indices(n_samples: int, train_fraction: float, seed: int):
    """
    Seeded shuffle; the first round(train_fraction*n) indices train, the rest test.
    """
    if not 0 < train_fraction < 1:
        raise InvalidArgumentError(f"train_fraction must lie in (0, 1), got {train_fraction!r}")
    n_train = int(round(train_fraction * n_samples))
    if n_train < 1 or n_train >= n_samples:
        raise InvalidArgumentError(f"split of {n_samples} samples at {train_fraction} leaves an empty side")
    order = np.random.default_rng(seed).permutation(n_samples)
    return order[:n_train], order[n_train:]


def _evaluate_frequency(freq, gamma, eps, train, test, spread, seed) -> ErrorReport:
    model = fit_rbn(gamma[train], eps[train], spread, freq=freq)
    estimate, _ = predict_many(model, gamma[test])
    err = np.abs(eps[test] - estimate) / np.abs(eps[test])
    return ErrorReport(
        freq=freq,
        per_sample=err,
        mean=float(err.mean()),
        max=float(err.max()),
        n_train=int(train.size),
        n_test=int(test.size),
        seed=seed,
    )


def evaluate_holdout(
    table: TrainingTable,
    train_fraction: float = 0.9,
    seed: int = 0,
    spread: float = 1.0,
    n_jobs: int = 1,
) -> List[ErrorReport]:
    """
    Train on a seeded split of the samples and measure the relative error on the rest.

    The same split is used at every frequency.

    :param table: training table with at least 10 samples
    :return: one ErrorReport per frequency, ascending
    """
    if table.n_samples < 10:
        raise InvalidArgumentError(f"hold-out needs at least 10 samples, table has {table.n_samples}")
    train, test = split_indices(table.n_samples, train_fraction, seed)
    reports = Parallel(n_jobs=n_jobs)(
        delayed(_evaluate_frequency)(float(f), table.gamma[i], table.eps, train, test, spread, seed)
        for i, f in enumerate(table.frequencies)
    )
    return list(reports)


def summarize_holdout(reports: Sequence[ErrorReport]) -> HoldoutSummary:
    if not reports:
        raise InvalidArgumentError("no hold-out reports to summarize")
    all_errors = np.concatenate([r.per_sample for r in reports])
    max_per_frequency = np.array([r.max for r in reports])
    worst = int(np.argmax(max_per_frequency))
    return HoldoutSummary(
        mean=float(all_errors.mean()),
        max_per_frequency=max_per_frequency,
        worst=float(max_per_frequency[worst]),
        worst_freq=reports[worst].freq,
    )
