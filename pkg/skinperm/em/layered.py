"""
Transverse equivalent network of planar layered media.

Every function is vectorised over `k_rho`: scalars give complex scalars, arrays give
complex arrays of the same shape.
"""

import math
from enum import Enum
from typing import Union

import numpy as np

from skinperm.em.constants import C0, EPS0, MU0
from skinperm.em.materials import ComplexPermittivity, HalfSpace, LayerStack
from skinperm.errors import InvalidArgumentError, SingularPointError

ArrayLike = Union[float, np.ndarray]

# stack_input_admittance of a flush short circuit
INFINITE_ADMITTANCE = complex(math.inf, 0.0)


class Polarization(str, Enum):
    TE = "TE"
    TM = "TM"


def is_infinite_admittance(y) -> bool:
    return bool(np.all(np.isinf(np.asarray(y).real)))


def _wavenumber(freq: float) -> float:
    return 2.0 * math.pi * freq / C0


def _kz(k_rho: np.ndarray, k0: float, eps: complex) -> np.ndarray:
    kz = np.sqrt(eps * k0 * k0 - k_rho * k_rho + 0j)
    # decaying branch for e^{+jwt}: Im(kz) <= 0
    return np.where(kz.imag > 0, -kz, kz)


def _admittance(k_rho: np.ndarray, freq: float, eps: complex, pol: Polarization):
    omega = 2.0 * math.pi * freq
    kz = _kz(k_rho, _wavenumber(freq), eps)
    if pol is Polarization.TE:
        return kz / (omega * MU0), kz
    if np.any(kz == 0):
        at = np.asarray(k_rho)[np.asarray(kz == 0)].ravel()[0]
        raise SingularPointError(float(at), freq)
    return omega * EPS0 * eps / kz, kz


def _check(k_rho, freq) -> np.ndarray:
    if not freq > 0:
        raise InvalidArgumentError(f"frequency must be positive, got {freq!r}")
    k = np.asarray(k_rho, dtype=float)
    if np.any(k < 0) or not np.all(np.isfinite(k)):
        raise InvalidArgumentError("k_rho must be finite and non-negative")
    return k


def _unwrap(value: np.ndarray, like):
    return complex(value) if np.ndim(like) == 0 else value


def transverse_wavenumber(k_rho: ArrayLike, freq: float, eps: ComplexPermittivity):
    """
    kz = sqrt(eps*k0^2 - k_rho^2) on the branch Im(kz) <= 0.

    :param k_rho: transverse wavenumber(s) in rad/m
    :param freq: frequency in Hz
    :param eps: medium permittivity
    """
    k = _check(k_rho, freq)
    return _unwrap(_kz(k, _wavenumber(freq), eps.value), k_rho)


def characteristic_admittance(
    k_rho: ArrayLike, freq: float, eps: ComplexPermittivity, pol: Polarization
):
    """
    Modal admittance of a homogeneous medium: kz/(w*mu0) for TE, w*eps0*eps/kz for TM.
    """
    k = _check(k_rho, freq)
    y, _ = _admittance(k, freq, eps.value, Polarization(pol))
    return _unwrap(y, k_rho)


def stack_admittance_array(k_rho: np.ndarray, freq: float, stack: LayerStack, pol: Polarization):
    """
    Unchecked array form of stack_input_admittance used inside the quadrature loops.
    """
    pol = Polarization(pol)
    if stack.is_short_circuit:
        return np.full(np.shape(k_rho), INFINITE_ADMITTANCE)

    layers = list(stack.layers)
    if isinstance(stack.termination, HalfSpace):
        y, _ = _admittance(k_rho, freq, stack.termination.permittivity.value, pol)
    else:
        inner = layers.pop()
        yc, kz = _admittance(k_rho, freq, inner.permittivity.value, pol)
        q = np.exp(-2j * kz * inner.thickness)
        # -j*Yc*cot(kz*d) in exponential form, |q| <= 1
        y = yc * (1.0 + q) / (1.0 - q)

    for layer in reversed(layers):
        yc, kz = _admittance(k_rho, freq, layer.permittivity.value, pol)
        q = np.exp(-2j * kz * layer.thickness)
        # Yc*(Y + j*Yc*tan)/(Yc + j*Y*tan) rewritten with q = exp(-2j*kz*d)
        y = yc * ((yc + y) - q * (yc - y)) / ((yc + y) + q * (yc - y))
    return y


def stack_input_admittance(k_rho: ArrayLike, freq: float, stack: LayerStack, pol: Polarization):
    """
    Admittance looking from the aperture plane into the stack, per polarization.

    Returns INFINITE_ADMITTANCE for a stack with no layers and a PEC termination.
    """
    k = _check(k_rho, freq)
    return _unwrap(stack_admittance_array(k, freq, stack, pol), k_rho)
