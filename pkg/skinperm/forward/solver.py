# solver.py

import logging
from typing import Callable, List, Optional, Sequence, Union

import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel, ConfigDict, Field

from skinperm.base import BaseForwardSolver
from skinperm.em.materials import (
    ComplexPermittivity,
    FrequencyGrid,
    LayerStack,
    WaveguideSpec,
    default_stack,
)
from skinperm.forward.aperture import aperture_admittance, reflection_from_admittance
from skinperm.handlers import ResultHandler

logger = logging.getLogger(__name__)

SkinModel = Callable[[float], ComplexPermittivity]


class QuadratureConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    krho_max_factor: float = Field(default=40.0, ge=10, allow_inf_nan=False)
    rel_tol: float = Field(default=1e-7, gt=0, lt=1e-2)
    max_depth: int = Field(default=30, ge=1, le=60)


class ForwardConfig(BaseModel):
    """
    Everything the forward model needs besides frequency and skin permittivity.
    """

    model_config = ConfigDict(frozen=True)

    stack: LayerStack = Field(default_factory=default_stack)
    waveguide: WaveguideSpec = Field(default_factory=WaveguideSpec)
    quadrature: QuadratureConfig = Field(default_factory=QuadratureConfig)


def stack_reflection(freq: float, stack: LayerStack, cfg: Optional[ForwardConfig] = None) -> complex:
    """
    Gamma for a fully specified stack, using the waveguide and quadrature settings of `cfg`.
    """
    cfg = cfg or ForwardConfig()
    q = cfg.quadrature
    y = aperture_admittance(
        freq,
        stack,
        cfg.waveguide,
        krho_max_factor=q.krho_max_factor,
        rel_tol=q.rel_tol,
        max_depth=q.max_depth,
    )
    return reflection_from_admittance(y)


def reflection_coefficient(
    freq: float, eps_skin: ComplexPermittivity, cfg: Optional[ForwardConfig] = None
) -> complex:
    """
    Dominant-mode reflection coefficient at the open end with `eps_skin` as the skin material.

    :param freq: frequency in Hz
    :param eps_skin: replaces the skin permittivity of cfg.stack
    :param cfg: stack, waveguide and quadrature settings; defaults to the sheet-on-skin stack
    :return: complex Gamma, |Gamma| <= 1 for passive stacks
    """
    cfg = cfg or ForwardConfig()
    return stack_reflection(freq, cfg.stack.replace_skin(eps_skin), cfg)


def _as_frequencies(grid: Union[FrequencyGrid, Sequence[float], np.ndarray]) -> np.ndarray:
    if isinstance(grid, FrequencyGrid):
        return grid.frequencies()
    return np.asarray(grid, dtype=float)


def reflection_sweep(
    grid: Union[FrequencyGrid, Sequence[float], np.ndarray],
    skin_model: Union[SkinModel, ComplexPermittivity],
    cfg: Optional[ForwardConfig] = None,
    n_jobs: int = 1,
) -> np.ndarray:
    """
    Gamma(f) for a frequency-dependent skin model, e.g. `skin_model_default`.

    :param grid: frequencies in Hz
    :param skin_model: callable freq -> ComplexPermittivity, or one constant permittivity
    :param cfg: forward configuration
    :param n_jobs: joblib worker count
    :return: complex array aligned with the grid
    """
    cfg = cfg or ForwardConfig()
    freqs = _as_frequencies(grid)
    if isinstance(skin_model, ComplexPermittivity):
        constant = skin_model
        skin_model = lambda _f: constant  # noqa: E731
    eps = [skin_model(float(f)) for f in freqs]
    gammas = Parallel(n_jobs=n_jobs)(
        delayed(reflection_coefficient)(float(f), e, cfg) for f, e in zip(freqs, eps)
    )
    return np.asarray(gammas, dtype=complex)


class ApertureForwardSolver(BaseForwardSolver):
    """
    Forward solver Gamma = F(eps) for the flanged waveguide pressed on a sheet-covered skin.
    """

    def __init__(self, config: Optional[ForwardConfig] = None, handlers: Optional[List[ResultHandler]] = None):
        """
        :param config: forward configuration, defaults to ForwardConfig()
        :param handlers: receive {"freq", "eps", "gamma"} for every evaluation
        """
        super().__init__(handlers)
        self.config = config or ForwardConfig()

    def reflection_coefficient(self, freq: float, eps_skin: ComplexPermittivity) -> complex:
        stack = self.preprocess(self.config.stack.replace_skin(eps_skin))
        gamma = stack_reflection(freq, stack, self.config)
        self._dispatch({"freq": freq, "eps": eps_skin.value, "gamma": gamma})
        return gamma

    def sweep(self, grid: Union[FrequencyGrid, Sequence[float]], skin_model: SkinModel) -> np.ndarray:
        freqs = _as_frequencies(grid)
        return np.array([self.reflection_coefficient(float(f), skin_model(float(f))) for f in freqs])
