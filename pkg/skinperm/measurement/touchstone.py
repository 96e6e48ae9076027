"""
One-port Touchstone v1 (.s1p) reading and writing.
"""

import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from skinperm.artifacts import PathLike, atomic_write_text, csv_text, fmt
from skinperm.errors import InvalidArgumentError, TouchstoneParseError

logger = logging.getLogger(__name__)

MAX_ABS_GAMMA = 1.05
FREQ_UNITS = {"HZ": 1.0, "KHZ": 1e3, "MHZ": 1e6, "GHZ": 1e9}
FORMATS = ("RI", "MA", "DB")
TRACE_COLUMNS = ("freq_hz", "gamma_real", "gamma_imag")


@dataclass(frozen=True)
class MeasurementTrace:
    """
    Reflection coefficient versus frequency, strictly ascending in frequency.
    """

    freq: np.ndarray
    gamma: np.ndarray
    source: str = "<memory>"
    format: str = "RI"
    z0: float = 50.0

    def __post_init__(self):
        freq = np.asarray(self.freq, dtype=float)
        gamma = np.asarray(self.gamma, dtype=complex)
        object.__setattr__(self, "freq", freq)
        object.__setattr__(self, "gamma", gamma)
        if freq.ndim != 1 or freq.shape != gamma.shape or freq.size == 0:
            raise InvalidArgumentError(f"{self.source}: need matching non-empty 1-D freq/gamma arrays")
        if not np.all(np.diff(freq) > 0):
            raise InvalidArgumentError(f"{self.source}: frequencies must be strictly ascending")
        if np.any(np.abs(gamma) > MAX_ABS_GAMMA):
            raise InvalidArgumentError(f"{self.source}: |gamma| exceeds {MAX_ABS_GAMMA}")

    def __len__(self) -> int:
        return int(self.freq.size)

    @property
    def span(self) -> Tuple[float, float]:
        return float(self.freq[0]), float(self.freq[-1])

    def with_gamma(self, gamma: np.ndarray) -> "MeasurementTrace":
        return replace(self, gamma=gamma)


@dataclass
class _Options:
    unit: float = 1e9
    fmt: str = "MA"
    z0: float = 50.0


def _parse_options(body: str, line_number: int, source: str) -> _Options:
    options = _Options()
    tokens = body.upper().split()
    i = 0
    while i < len(tokens):
        token = tokens[i]
        if token in FREQ_UNITS:
            options.unit = FREQ_UNITS[token]
        elif token in FORMATS:
            options.fmt = token
        elif token == "S":
            pass
        elif token in ("Y", "Z", "H", "G"):
            raise TouchstoneParseError(f"only S parameters are supported, got {token}", line_number, source)
        elif token == "R":
            if i + 1 >= len(tokens):
                raise TouchstoneParseError("reference impedance missing after R", line_number, source)
            try:
                options.z0 = float(tokens[i + 1])
            except ValueError:
                raise TouchstoneParseError(f"bad reference impedance {tokens[i + 1]!r}", line_number, source)
            i += 1
        else:
            raise TouchstoneParseError(f"unknown option {token!r}", line_number, source)
        i += 1
    return options


def _to_gamma(v1: float, v2: float, fmt_name: str) -> complex:
    if fmt_name == "RI":
        return complex(v1, v2)
    magnitude = v1 if fmt_name == "MA" else 10.0 ** (v1 / 20.0)
    angle = math.radians(v2)
    return complex(magnitude * math.cos(angle), magnitude * math.sin(angle))


def parse_touchstone(text: str, source: str = "<string>") -> MeasurementTrace:
    """
    Parse a one-port Touchstone v1 document.

    :param text: file contents
    :param source: name used in error messages and kept on the trace
    :raises TouchstoneParseError: with the offending line number
    """
    options: Optional[_Options] = None
    freqs: List[float] = []
    gammas: List[complex] = []

    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("!", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            raise TouchstoneParseError("Touchstone v2 keywords are not supported", line_number, source)
        if line.startswith("#"):
            if options is not None:
                raise TouchstoneParseError("duplicate option line", line_number, source)
            if freqs:
                raise TouchstoneParseError("option line after data", line_number, source)
            options = _parse_options(line[1:], line_number, source)
            continue
        if options is None:
            raise TouchstoneParseError("data before option line", line_number, source)

        fields = line.split()
        if len(fields) != 3:
            raise TouchstoneParseError(
                f"one-port rows need 3 values (f v1 v2), got {len(fields)}", line_number, source
            )
        try:
            f, v1, v2 = (float(x) for x in fields)
        except ValueError:
            raise TouchstoneParseError(f"non-numeric value in {line!r}", line_number, source)

        freq = f * options.unit
        if freqs and not freq > freqs[-1]:
            raise TouchstoneParseError(f"frequency {freq:.9g} Hz is not ascending", line_number, source)
        gamma = _to_gamma(v1, v2, options.fmt)
        if abs(gamma) > MAX_ABS_GAMMA:
            raise TouchstoneParseError(f"|gamma| = {abs(gamma):.4g} exceeds {MAX_ABS_GAMMA}", line_number, source)
        freqs.append(freq)
        gammas.append(gamma)

    if options is None:
        raise TouchstoneParseError("missing option line", None, source)
    if not freqs:
        raise TouchstoneParseError("no data rows", None, source)
    return MeasurementTrace(np.array(freqs), np.array(gammas), source=source, format=options.fmt, z0=options.z0)


def serialize_touchstone(trace: MeasurementTrace) -> str:
    """
    Canonical form: Hz, real/imaginary, 17 significant digits.
    """
    lines = [f"! {Path(trace.source).name}", f"# Hz S RI R {fmt(trace.z0)}"]
    lines += [f"{fmt(f)} {fmt(g.real)} {fmt(g.imag)}" for f, g in zip(trace.freq, trace.gamma)]
    return "\n".join(lines) + "\n"


def read_touchstone(path: PathLike) -> MeasurementTrace:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise TouchstoneParseError(f"not a text file: {e}", None, str(path)) from e
    return parse_touchstone(text, source=str(path))


def write_touchstone(trace: MeasurementTrace, path: PathLike) -> Path:
    return atomic_write_text(path, serialize_touchstone(trace))


def write_trace_csv(trace: MeasurementTrace, path: PathLike) -> Path:
    rows = ((float(f), float(g.real), float(g.imag)) for f, g in zip(trace.freq, trace.gamma))
    return atomic_write_text(path, csv_text(TRACE_COLUMNS, rows))
