# bank.py

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from skinperm.artifacts import PathLike, atomic_write_json, sha256_bytes
from skinperm.base import BaseInverseSolver
from skinperm.em.materials import LayerStack, WaveguideSpec
from skinperm.errors import (
    BankFormatError,
    BankOrderError,
    BankVersionError,
    GridMismatchError,
    InvalidArgumentError,
)
from skinperm.forward.training import SweepBox, TrainingTable
from skinperm.handlers import ResultHandler
from skinperm.inverse.rbn import KERNEL_NAME, KERNEL_SCALE, PermittivityEstimate, RbnModel, fit_rbn, predict

logger = logging.getLogger(__name__)

BANK_FORMAT_VERSION = 1


@dataclass(frozen=True)
class ModelBank:
    """
    One RbnModel per frequency, strictly ascending, all sharing spread and kernel.
    """

    models: Tuple[RbnModel, ...]
    provenance: str
    waveguide: WaveguideSpec = field(default_factory=WaveguideSpec)
    stack: Optional[LayerStack] = None
    sweep_box: Optional[SweepBox] = None

    def __post_init__(self):
        if not self.models:
            raise InvalidArgumentError("a model bank needs at least one model")
        freqs = self.frequencies
        if not np.all(np.diff(freqs) > 0):
            raise BankOrderError(f"bank frequencies are not strictly increasing: {freqs.tolist()}")
        spreads = {m.spread for m in self.models}
        scales = {m.kernel_scale for m in self.models}
        if len(spreads) != 1 or len(scales) != 1:
            raise InvalidArgumentError("all bank models must share spread and kernel scale")

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([m.freq for m in self.models])

    @property
    def spread(self) -> float:
        return self.models[0].spread

    def model_at(self, freq: float) -> RbnModel:
        """
        The model trained at exactly `freq`.

        :raises GridMismatchError: no model at that frequency
        """
        freqs = self.frequencies
        i = int(np.searchsorted(freqs, freq))
        if i >= freqs.size or freqs[i] != freq:
            raise GridMismatchError(f"no model trained at {freq!r} Hz")
        return self.models[i]


def table_provenance(table: TrainingTable) -> str:
    return sha256_bytes(table.header.model_dump_json().encode("utf-8"))


def train_bank(table: TrainingTable, spread: float = 1.0, n_jobs: int = 1) -> ModelBank:
    """
    Train one network per table frequency.

    :param table: forward-model training table
    :param spread: kernel spread shared by every model
    :param n_jobs: joblib workers; each frequency is an independent solve
    """
    freqs = table.frequencies
    models = Parallel(n_jobs=n_jobs)(
        delayed(fit_rbn)(table.gamma[i], table.eps, spread, freq=float(f)) for i, f in enumerate(freqs)
    )
    logger.info("trained %d models of %d centres (spread %g)", len(models), table.n_samples, spread)
    return ModelBank(
        models=tuple(models),
        provenance=table_provenance(table),
        waveguide=table.header.forward.waveguide,
        stack=table.header.forward.stack,
        sweep_box=table.header.sweep_box,
    )


class _ModelRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    freq_hz: float
    centers: List[Tuple[float, float]]
    weights: List[Tuple[float, float]]
    bias: Tuple[float, float]

    @model_validator(mode="after")
    def _check_lengths(self) -> "_ModelRecord":
        if not self.centers or len(self.centers) != len(self.weights):
            raise ValueError(f"model at {self.freq_hz} Hz has {len(self.centers)} centres and {len(self.weights)} weights")
        return self


class _BankFile(BaseModel):
    format_version: int
    spread: float
    kernel: str
    kernel_scale: float = KERNEL_SCALE
    waveguide: WaveguideSpec
    stack: Optional[LayerStack] = None
    sweep_box: Optional[SweepBox] = None
    provenance: str
    frequencies: List[float]
    models: List[_ModelRecord]


def _to_file(bank: ModelBank) -> Dict[str, Any]:
    payload = _BankFile(
        format_version=BANK_FORMAT_VERSION,
        spread=bank.spread,
        kernel=KERNEL_NAME,
        kernel_scale=bank.models[0].kernel_scale,
        waveguide=bank.waveguide,
        stack=bank.stack,
        sweep_box=bank.sweep_box,
        provenance=bank.provenance,
        frequencies=bank.frequencies.tolist(),
        models=[
            _ModelRecord(
                freq_hz=m.freq,
                centers=[tuple(c) for c in m.centers.tolist()],
                weights=[tuple(w) for w in m.weights.tolist()],
                bias=tuple(m.bias.tolist()),
            )
            for m in bank.models
        ],
    )
    return payload.model_dump(mode="json")


def save_bank(bank: ModelBank, path: PathLike) -> Path:
    """
    Write the bank as JSON. Floats use Python's shortest round-trip repr, so loading gives back
    bitwise-identical arrays.
    """
    return atomic_write_json(path, _to_file(bank))


def load_bank(path: PathLike) -> ModelBank:
    """
    :raises BankVersionError: unsupported format_version
    :raises BankOrderError: frequencies not strictly increasing
    :raises BankFormatError: anything else that does not decode
    """
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as e:
        raise BankFormatError(f"cannot read model bank {path}: {e}") from e
    if not isinstance(raw, dict):
        raise BankFormatError(f"{path}: model bank must be a JSON object")
    if raw.get("format_version") != BANK_FORMAT_VERSION:
        raise BankVersionError(
            f"{path}: format_version {raw.get('format_version')!r} is not supported (expected {BANK_FORMAT_VERSION})"
        )
    try:
        data = _BankFile.model_validate(raw)
    except ValidationError as e:
        raise BankFormatError(f"{path}: {e}") from e
    if data.kernel != KERNEL_NAME:
        raise BankFormatError(f"{path}: unknown kernel {data.kernel!r}")

    freqs = [m.freq_hz for m in data.models]
    if freqs != data.frequencies:
        raise BankFormatError(f"{path}: frequency list does not match the models")
    if not all(f0 < f1 for f0, f1 in zip(freqs, freqs[1:])):
        raise BankOrderError(f"{path}: model frequencies are not strictly increasing")

    models = tuple(
        RbnModel(
            freq=m.freq_hz,
            spread=data.spread,
            centers=np.array(m.centers, dtype=float),
            weights=np.array(m.weights, dtype=float),
            bias=np.array(m.bias, dtype=float),
            kernel_scale=data.kernel_scale,
        )
        for m in data.models
    )
    return ModelBank(
        models=models,
        provenance=data.provenance,
        waveguide=data.waveguide,
        stack=data.stack,
        sweep_box=data.sweep_box,
    )


class BankInverseSolver(BaseInverseSolver):
    """
    Inverse solver backed by a ModelBank; every estimate is dispatched to the handlers as
    {"freq", "gamma", "eps", "extrapolated"}.
    """

    def __init__(self, bank: ModelBank, handlers: Optional[List[ResultHandler]] = None):
        super().__init__(handlers)
        self.bank = bank

    def predict(self, freq: float, gamma: complex) -> PermittivityEstimate:
        gamma = self.preprocess(gamma)
        estimate = predict(self.bank.model_at(freq), gamma, self.bank.sweep_box)
        self._dispatch({
            "freq": freq,
            "gamma": gamma,
            "eps": estimate.value,
            "extrapolated": estimate.extrapolated,
        })
        return estimate

    def predict_sweep(
        self, freqs: Sequence[float], gammas: Sequence[complex], n_jobs: int = 1
    ) -> List[PermittivityEstimate]:
        """
        Estimate a whole sweep, one joblib task per frequency point.

        Handlers see the estimates in sweep order whatever `n_jobs` is.
        """
        gammas = [self.preprocess(complex(g)) for g in gammas]
        estimates = Parallel(n_jobs=n_jobs)(
            delayed(predict)(self.bank.model_at(float(f)), g, self.bank.sweep_box) for f, g in zip(freqs, gammas)
        )
        for f, g, estimate in zip(freqs, gammas, estimates):
            self._dispatch({
                "freq": float(f),
                "gamma": g,
                "eps": estimate.value,
                "extrapolated": estimate.extrapolated,
            })
        return estimates
