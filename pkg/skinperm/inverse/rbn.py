"""
Exact-interpolation radial basis network mapping (Re Gamma, Im Gamma) to (eps', eps'').

Every training sample becomes a Gaussian centre with phi(spread) = 1/2. Weights and a bias per
output column come from one rank-revealing least-squares solve.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
from pydantic import ValidationError
from scipy.spatial.distance import cdist, pdist

from skinperm.em.materials import ComplexPermittivity
from skinperm.errors import ConditioningError, DuplicateCenterError, InvalidArgumentError

logger = logging.getLogger(__name__)

KERNEL_SCALE = 0.8325546111576977  # sqrt(ln 2)
KERNEL_NAME = "gauss-half-at-spread"
RCOND = None  # scipy default: machine precision relative to the largest singular value
DUPLICATE_TOL = 1e-14
FAR_FROM_CENTERS = 3.0  # in units of spread
BOX_MARGIN = 0.1

PermittivityLike = Union[ComplexPermittivity, complex]


@dataclass(frozen=True)
class RbnModel:
    """
    Trained network for one frequency.

    centers: (N, 2) reflection coefficients (real, imag); weights: (N, 2) for (eps', eps'');
    bias: (2,).
    """

    freq: float
    spread: float
    centers: np.ndarray
    weights: np.ndarray
    bias: np.ndarray
    kernel_scale: float = KERNEL_SCALE

    def __post_init__(self):
        if self.centers.ndim != 2 or self.centers.shape[0] == 0 or self.centers.shape[1] != 2:
            raise InvalidArgumentError(f"centers must be a non-empty (N, 2) array, got {self.centers.shape}")
        if self.weights.shape != self.centers.shape:
            raise InvalidArgumentError(f"weights shape {self.weights.shape} != centers shape {self.centers.shape}")
        if self.bias.shape != (2,):
            raise InvalidArgumentError(f"bias must have two entries, got {self.bias.shape}")
        if not self.spread > 0:
            raise InvalidArgumentError(f"spread must be positive, got {self.spread!r}")

    @property
    def n_centers(self) -> int:
        return int(self.centers.shape[0])


@dataclass(frozen=True)
class PermittivityEstimate:
    """
    Network output. Not clamped, so it may leave the physical domain when extrapolated.
    """

    eps_real: float
    eps_imag: float
    extrapolated: bool = False

    @property
    def value(self) -> complex:
        return complex(self.eps_real, -self.eps_imag)

    @property
    def permittivity(self) -> ComplexPermittivity:
        try:
            return ComplexPermittivity(eps_real=self.eps_real, eps_imag=self.eps_imag)
        except ValidationError as e:
            raise InvalidArgumentError(f"estimate {self.value} is not a physical permittivity") from e


def kernel(r: np.ndarray, spread: float, kernel_scale: float = KERNEL_SCALE) -> np.ndarray:
    return np.exp(-((kernel_scale * r / spread) ** 2))


def _as_points(gamma) -> np.ndarray:
    g = np.asarray(gamma, dtype=complex).ravel()
    return np.column_stack([g.real, g.imag])


def _duplicates(points: np.ndarray) -> Sequence[Tuple[int, int]]:
    n = points.shape[0]
    if n < 2:
        return []
    close = np.flatnonzero(pdist(points) < DUPLICATE_TOL)
    if close.size == 0:
        return []
    i, j = np.triu_indices(n, k=1)
    return list(zip(i[close].tolist(), j[close].tolist()))


def fit_rbn(
    gamma: np.ndarray,
    eps: np.ndarray,
    spread: float = 1.0,
    *,
    freq: float = 0.0,
    ridge: Optional[float] = None,
) -> RbnModel:
    """
    Train on arrays: complex `gamma` (N,) and complex `eps` (N,) written eps' - j*eps''.

    Singular values of [G | 1] below RCOND times the largest are cut, so a numerically rank
    deficient kernel matrix still yields the minimum-norm least-squares weights.

    :param ridge: optional Tikhonov weight stacked under the system; None or 0 disables it
    :raises DuplicateCenterError: two reflection coefficients closer than 1e-14
    :raises ConditioningError: the solve produced non-finite weights
    """
    if not spread > 0:
        raise InvalidArgumentError(f"spread must be positive, got {spread!r}")
    centers = _as_points(gamma)
    eps = np.atleast_1d(np.asarray(eps, dtype=complex))
    n = centers.shape[0]
    if n == 0 or eps.shape != (n,):
        raise InvalidArgumentError(f"need matching non-empty gamma/eps arrays, got {n} and {eps.shape}")
    if not np.all(np.isfinite(centers)) or not np.all(np.isfinite(eps)):
        raise InvalidArgumentError("training data contains non-finite values")

    pairs = _duplicates(centers)
    if pairs:
        raise DuplicateCenterError(pairs)

    g = kernel(cdist(centers, centers), spread)
    a = np.hstack([g, np.ones((n, 1))])
    targets = np.column_stack([eps.real, -eps.imag])
    lam = 0.0 if ridge is None else float(ridge)
    if lam < 0 or not math.isfinite(lam):
        raise InvalidArgumentError(f"ridge must be a finite non-negative number, got {ridge!r}")
    if lam > 0:
        a = np.vstack([a, math.sqrt(lam) * np.eye(n + 1)])
        targets = np.vstack([targets, np.zeros((n + 1, 2))])

    try:
        solution, _, rank, _ = scipy.linalg.lstsq(a, targets, cond=RCOND)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise ConditioningError(f"RBN solve at f={freq:.6g} Hz failed: {e}") from e
    if not np.all(np.isfinite(solution)):
        raise ConditioningError(f"RBN solve at f={freq:.6g} Hz produced non-finite weights")
    if rank < min(a.shape):
        logger.debug("RBN system at %.6g Hz has effective rank %d of %d", freq, rank, min(a.shape))
    return RbnModel(
        freq=float(freq),
        spread=float(spread),
        centers=centers,
        weights=np.ascontiguousarray(solution[:n]),
        bias=np.ascontiguousarray(solution[n]),
    )


def train_rbn(
    samples: Iterable[Tuple[complex, PermittivityLike]],
    spread: float = 1.0,
    *,
    freq: float = 0.0,
    ridge: Optional[float] = None,
) -> RbnModel:
    """
    Train on (gamma, eps) pairs; every pair becomes a centre.
    """
    samples = list(samples)
    gamma = np.array([complex(s[0]) for s in samples], dtype=complex)
    eps = np.array(
        [s[1].value if isinstance(s[1], ComplexPermittivity) else complex(s[1]) for s in samples],
        dtype=complex,
    )
    return fit_rbn(gamma, eps, spread, freq=freq, ridge=ridge)


def _extrapolated(min_dist: np.ndarray, out: np.ndarray, model: RbnModel, sweep_box) -> np.ndarray:
    flags = min_dist > FAR_FROM_CENTERS * model.spread
    if sweep_box is not None:
        (r0, r1), (i0, i1) = sweep_box.widened(BOX_MARGIN)
        outside = (out[:, 0] < r0) | (out[:, 0] > r1) | (out[:, 1] < i0) | (out[:, 1] > i1)
        flags = flags | outside
    return flags


def predict_many(model: RbnModel, gamma, sweep_box=None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vectorised prediction.

    :param gamma: complex reflection coefficients, any shape
    :param sweep_box: training box; outputs beyond it by more than 10% of an axis are flagged
    :return: (eps, flags), complex eps' - j*eps'' and boolean extrapolation flags, both shaped like gamma
    """
    shape = np.shape(gamma)
    points = _as_points(gamma)
    dist = cdist(points, model.centers)
    out = kernel(dist, model.spread, model.kernel_scale) @ model.weights + model.bias
    flags = _extrapolated(dist.min(axis=1), out, model, sweep_box)
    eps = (out[:, 0] - 1j * out[:, 1]).reshape(shape)
    return eps, flags.reshape(shape)


def predict(model: RbnModel, gamma: complex, sweep_box=None) -> PermittivityEstimate:
    """
    Estimate the permittivity behind one reflection coefficient.

    The output is never clamped. `extrapolated` is set when gamma lies farther than
    3*spread from every centre, or when the output leaves `sweep_box` by more than 10%.
    """
    eps, flags = predict_many(model, complex(gamma), sweep_box)
    value = complex(eps)
    return PermittivityEstimate(eps_real=value.real, eps_imag=-value.imag, extrapolated=bool(flags))
