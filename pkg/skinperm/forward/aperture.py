"""
Aperture admittance of a flanged rectangular waveguide radiating TE10 into a planar stack.

The spectral integral over (k_rho, phi) is split in two parts:

* the quasi-static kernel of the aperture-adjacent material, integrated exactly in the
  spatial domain over the autocorrelation of the aperture field (`_static_moments`);
* the remainder, stack admittance minus that kernel, integrated spectrally up to
  krho_max_factor*k0. The remainder decays fast enough for the truncation to be converged.
"""

import logging
import math
from functools import lru_cache
from typing import List, Sequence, Tuple

import numpy as np

from skinperm.em.constants import C0, EPS0, MU0
from skinperm.em.layered import Polarization, stack_admittance_array
from skinperm.em.materials import ComplexPermittivity, HalfSpace, LayerStack, WaveguideSpec
from skinperm.errors import InvalidArgumentError
from skinperm.forward.quadrature import composite_gauss, gauss_legendre, integrate_adaptive

logger = logging.getLogger(__name__)

# radial panel edges in units of k0
RADIAL_BREAKS = (0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0,
                 48.0, 64.0, 96.0, 128.0, 192.0, 256.0)

STATIC_ORDER = 48
_LOW_LOSS = 0.1  # eps_imag/eps_real below which a branch point gets its own breakpoint


def _spectrum(kx, ky, a: float, b: float) -> np.ndarray:
    u = np.abs(np.asarray(kx, dtype=float)) * a
    x_part = math.pi * a * np.sinc((math.pi - u) / (2.0 * math.pi)) / (math.pi + u)
    y_part = b * np.sinc(np.asarray(ky, dtype=float) * b / (2.0 * math.pi))
    return x_part * y_part


def aperture_spectrum(kx, ky, waveguide: WaveguideSpec):
    """
    Fourier transform of the TE10 aperture field cos(pi*x/a) over the a x b aperture.

    Written with numpy's normalised sinc, so the removable singularities at kx*a = +-pi and
    ky = 0 need no special casing.

    :param kx: spectral variable along the broad wall, rad/m
    :param ky: spectral variable along the narrow wall, rad/m
    :param waveguide: aperture dimensions
    :return: F(kx, ky) in m^2, float or array following numpy broadcasting
    """
    value = _spectrum(kx, ky, waveguide.a, waveguide.b)
    return float(value) if np.ndim(value) == 0 else value


def _wavenumber(freq: float) -> float:
    return 2.0 * math.pi * freq / C0


def mode_normalization(freq: float, waveguide: WaveguideSpec) -> float:
    """
    Y10 * a*b/2: TE10 modal admittance times the power norm of cos(pi*x/a).
    """
    k0 = _wavenumber(freq)
    beta10 = math.sqrt(k0 * k0 - (math.pi / waveguide.a) ** 2)
    return beta10 / (2.0 * math.pi * freq * MU0) * waveguide.a * waveguide.b / 2.0


@lru_cache(maxsize=64)
def _static_moments(a: float, b: float, order: int = STATIC_ORDER) -> Tuple[float, float]:
    """
    I1 = int int Cx*Cy/R and I2 = int int Cx''*Cy/R over [0, a] x [0, b].

    Cx, Cy are the autocorrelations of cos(pi*x/a) and of the unit pulse of width b. The
    integrals are taken in polar coordinates around the origin, which cancels 1/R; the
    quadrant is split along its diagonal so the radial limit is smooth on each piece.
    """
    x, w = gauss_legendre(order)
    theta_d = math.atan2(b, a)
    i1 = i2 = 0.0
    for lo, hi, limit in ((0.0, theta_d, lambda th: a / np.cos(th)),
                          (theta_d, 0.5 * math.pi, lambda th: b / np.sin(th))):
        theta = lo + 0.5 * (hi - lo) * (x + 1.0)
        w_theta = 0.5 * (hi - lo) * w
        r_max = limit(theta)[:, None]
        r = 0.5 * r_max * (x[None, :] + 1.0)
        w_r = 0.5 * r_max * w[None, :]
        big_x = r * np.cos(theta)[:, None]
        big_y = r * np.sin(theta)[:, None]
        arg = math.pi * big_x / a
        cx = 0.5 * ((a - big_x) * np.cos(arg) + (a / math.pi) * np.sin(arg))
        cx2 = (math.pi / (2.0 * a)) * np.sin(arg) - (math.pi ** 2 / (2.0 * a * a)) * (a - big_x) * np.cos(arg)
        cy = b - big_y
        weights = w_theta[:, None] * w_r
        i1 += float(np.sum(weights * cx * cy))
        i2 += float(np.sum(weights * cx2 * cy))
    return i1, i2


def _static_admittance(freq: float, eps1: complex, waveguide: WaveguideSpec, order: int) -> complex:
    omega = 2.0 * math.pi * freq
    k1sq = eps1 * _wavenumber(freq) ** 2
    i1, i2 = _static_moments(waveguide.a, waveguide.b, order)
    return 2j / (math.pi * omega * MU0) * (k1sq * i1 + i2)


def _phi_panels(k_max: float, a: float, b: float) -> int:
    # at most half an oscillation of F per panel
    return 2 + int(math.ceil(k_max * max(a, b) / math.pi))


def _moment_integrand(k_rho: np.ndarray, a: float, b: float):
    def integrand(phi: np.ndarray) -> np.ndarray:
        c = np.cos(phi)[..., None]
        s = np.sin(phi)[..., None]
        f = _spectrum(k_rho * c, k_rho * s, a, b)
        f2 = f * f
        return np.stack([f2 * c * c, f2 * s * s], axis=-1)

    return integrand


@lru_cache(maxsize=1 << 16)
def _angular_moments(nodes: Tuple[float, ...], a: float, b: float, rel_tol: float, max_depth: int) -> np.ndarray:
    """
    A_TE(k) = int_0^{pi/2} F^2 cos^2(phi) dphi and A_TM(k) with sin^2, for every k in `nodes`.

    Depends on the waveguide only, so one cache serves every stack and frequency that reuse
    the same radial panels. Returns a read-only (len(nodes), 2) array.
    """
    k = np.asarray(nodes)
    result = integrate_adaptive(
        _moment_integrand(k, a, b),
        (0.0, 0.5 * math.pi),
        rel_tol=rel_tol,
        max_depth=max_depth,
        initial_panels=_phi_panels(float(k.max()), a, b),
    )
    moments = np.asarray(result.value, dtype=float)
    moments.setflags(write=False)
    return moments


def _materials(stack: LayerStack) -> List[ComplexPermittivity]:
    out = [layer.permittivity for layer in stack.layers]
    if isinstance(stack.termination, HalfSpace):
        out.append(stack.termination.permittivity)
    return out


def radial_breakpoints(stack: LayerStack, krho_max_factor: float) -> Tuple[List[float], List[float]]:
    """
    Radial panel edges and branch-point singularities, both in units of k0.

    Lossless materials put an inverse square-root singularity at k_rho = sqrt(eps)*k0; low-loss
    ones get a plain breakpoint at the nearby peak.
    """
    breaks = [x for x in RADIAL_BREAKS if x < krho_max_factor] + [float(krho_max_factor)]
    singular = []
    for eps in _materials(stack):
        branch = np.sqrt(eps.value).real
        if branch >= krho_max_factor:
            continue
        if eps.eps_imag == 0.0:
            singular.append(float(branch))
        elif eps.eps_imag < _LOW_LOSS * eps.eps_real:
            breaks.append(float(branch))
    return sorted(set(breaks)), sorted(set(singular))


def _remainder_integrand(freq: float, stack: LayerStack, moments):
    """
    k_rho * [(Y_TE - Y_TE_static) A_TE + (Y_TM - Y_TM_static) A_TM], with the k_rho factor
    folded into the static kernels so the integrand stays finite at k_rho -> 0.
    """
    omega = 2.0 * math.pi * freq
    eps1 = stack.aperture_permittivity.value
    k1sq = eps1 * _wavenumber(freq) ** 2

    def integrand(k_rho: np.ndarray) -> np.ndarray:
        am = moments(k_rho)
        y_te = stack_admittance_array(k_rho, freq, stack, Polarization.TE)
        y_tm = stack_admittance_array(k_rho, freq, stack, Polarization.TM)
        d_te = k_rho * y_te - 1j * (k1sq - k_rho * k_rho) / (omega * MU0)
        d_tm = k_rho * y_tm - 1j * omega * EPS0 * eps1
        return d_te * am[..., 0] + d_tm * am[..., 1]

    return integrand


def _check_inputs(freq: float, waveguide: WaveguideSpec) -> None:
    if not freq > 0:
        raise InvalidArgumentError(f"frequency must be positive, got {freq!r}")
    waveguide.check_frequency(freq)


def aperture_admittance(
    freq: float,
    stack: LayerStack,
    waveguide: WaveguideSpec,
    *,
    krho_max_factor: float = 40.0,
    rel_tol: float = 1e-7,
    max_depth: int = 30,
) -> complex:
    """
    Normalised aperture admittance y = Y_ap/(Y10*a*b/2).

    :param freq: frequency in Hz; TE10 must propagate
    :param stack: load seen from the aperture plane
    :param waveguide: aperture dimensions
    :param krho_max_factor: spectral truncation in units of k0
    :param rel_tol: relative tolerance of the adaptive quadrature
    :param max_depth: bisection cap of the adaptive quadrature
    :return: complex y; INFINITE_ADMITTANCE semantics (complex(inf, 0)) for a flush short circuit
    :raises ConvergenceError: quadrature did not reach rel_tol
    """
    _check_inputs(freq, waveguide)
    if stack.is_short_circuit:
        return complex(math.inf, 0.0)

    k0 = _wavenumber(freq)
    a, b = waveguide.a, waveguide.b
    static = _static_admittance(freq, stack.aperture_permittivity.value, waveguide, STATIC_ORDER)
    inner_tol = max(0.1 * rel_tol, 1e-13)

    def moments(k_rho: np.ndarray) -> np.ndarray:
        return np.stack([
            _angular_moments(tuple(row.tolist()), a, b, inner_tol, max_depth) for row in k_rho
        ])

    breaks, singular = radial_breakpoints(stack, krho_max_factor)
    result = integrate_adaptive(
        _remainder_integrand(freq, stack, moments),
        [k0 * x for x in breaks],
        rel_tol=rel_tol,
        abs_tol=rel_tol * abs(static),
        max_depth=max_depth,
        singular_points=[k0 * x for x in singular],
    )
    remainder = complex(result.value) / math.pi ** 2
    logger.debug(
        "f=%.6g Hz: static %s, spectral remainder %s (error %.2e, %d panels, depth %d)",
        freq, static, remainder, float(result.error) / math.pi ** 2, result.n_panels, result.depth,
    )
    return (static + remainder) / mode_normalization(freq, waveguide)


def _dense_moments(k_rho: np.ndarray, a: float, b: float, density: int, order: int) -> np.ndarray:
    n_phi = density * _phi_panels(float(k_rho.max()), a, b)
    phi, w_phi = composite_gauss(np.linspace(0.0, 0.5 * math.pi, n_phi + 1), order)
    phi = phi.ravel()
    w_phi = w_phi.ravel()
    c = np.cos(phi)[None, :]
    s = np.sin(phi)[None, :]
    k = k_rho[:, None]
    f2 = _spectrum(k * c, k * s, a, b) ** 2
    return np.stack([(f2 * c * c) @ w_phi, (f2 * s * s) @ w_phi], axis=-1)


def aperture_admittance_dense(
    freq: float,
    stack: LayerStack,
    waveguide: WaveguideSpec,
    *,
    krho_max_factor: float = 40.0,
    density: int = 4,
    order: int = 16,
) -> complex:
    """
    Reference value of `aperture_admittance` from a fixed tensor-product Gauss rule.

    No adaptivity: radial panels of width k0/(2*density), angular panels `density` times
    finer than the oscillation of the aperture spectrum, `order` nodes per panel. Slow; meant
    for cross-checking the adaptive solver.
    """
    _check_inputs(freq, waveguide)
    if density < 1:
        raise InvalidArgumentError(f"density must be >= 1, got {density}")
    if stack.is_short_circuit:
        return complex(math.inf, 0.0)

    k0 = _wavenumber(freq)
    a, b = waveguide.a, waveguide.b
    static = _static_admittance(freq, stack.aperture_permittivity.value, waveguide, 2 * STATIC_ORDER)

    breaks, singular = radial_breakpoints(stack, krho_max_factor)
    n_radial = int(math.ceil(2 * density * krho_max_factor))
    edges = np.union1d(np.linspace(0.0, krho_max_factor, n_radial + 1), breaks)
    nodes, weights = composite_gauss(k0 * edges, order, [k0 * x for x in singular])

    integrand = _remainder_integrand(
        freq, stack, lambda k: np.stack([_dense_moments(row, a, b, density, order) for row in k])
    )
    remainder = complex(np.sum(integrand(nodes) * weights)) / math.pi ** 2
    return (static + remainder) / mode_normalization(freq, waveguide)


def reflection_from_admittance(y: complex) -> complex:
    """
    Gamma = (1 - y)/(1 + y); an infinite admittance gives -1 exactly.
    """
    if math.isinf(y.real):
        return complex(-1.0, 0.0)
    return (1.0 - y) / (1.0 + y)
