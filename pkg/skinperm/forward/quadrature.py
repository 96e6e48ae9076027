"""
Vectorised quadrature rules.

`integrate_adaptive` is a globally adaptive Gauss-Kronrod (G7-K15) integrator: all active
panels of one refinement level are evaluated in a single call of the integrand, which makes
it cheap to drive with numpy. The fixed composite Gauss-Legendre rules back the dense
reference solver.

Integrands receive an array of abscissae of shape (P, n) and must return an array of shape
(P, n, *value_shape); real or complex values are both accepted.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, List, Sequence, Tuple

import numpy as np

from skinperm.errors import ConvergenceError, InvalidArgumentError

logger = logging.getLogger(__name__)

Integrand = Callable[[np.ndarray], np.ndarray]

# QUADPACK qk15 abscissae and weights on [-1, 1], positive half
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])


def _kronrod_rule() -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    nodes = np.concatenate([-_XGK[:7], [0.0], _XGK[6::-1]])
    kronrod = np.concatenate([_WGK[:7], [_WGK[7]], _WGK[6::-1]])
    gauss = np.zeros(15)
    gauss[[1, 3, 5]] = _WG[:3]
    gauss[7] = _WG[3]
    gauss[[13, 11, 9]] = _WG[:3]
    return nodes, kronrod, gauss


KRONROD_NODES, KRONROD_WEIGHTS, GAUSS_WEIGHTS = _kronrod_rule()

# segment maps from t in [0, 1] to x in [x0, x1]
_LINEAR = 0
_SQRT_LEFT = 1  # x = x0 + w t^2, removes 1/sqrt(x - x0)
_SQRT_RIGHT = 2  # x = x1 - w (1 - t)^2, removes 1/sqrt(x1 - x)


@dataclass(frozen=True)
class QuadratureResult:
    value: np.ndarray
    error: np.ndarray
    n_panels: int
    depth: int


@dataclass(frozen=True)
class _Segments:
    x0: np.ndarray
    x1: np.ndarray
    kind: np.ndarray

    @property
    def width(self) -> np.ndarray:
        return self.x1 - self.x0


def _build_segments(breakpoints: Iterable[float], singular_points: Iterable[float]) -> _Segments:
    edges = np.unique(np.asarray(list(breakpoints), dtype=float))
    if edges.size < 2 or not np.all(np.isfinite(edges)):
        raise InvalidArgumentError("need at least two distinct finite breakpoints")
    lo, hi = edges[0], edges[-1]
    singular = {float(s) for s in singular_points if lo <= s <= hi}
    edges = np.unique(np.concatenate([edges, sorted(singular)]))

    x0: List[float] = []
    x1: List[float] = []
    kind: List[int] = []
    for a, b in zip(edges[:-1], edges[1:]):
        left, right = a in singular, b in singular
        if left and right:
            m = 0.5 * (a + b)
            x0 += [a, m]
            x1 += [m, b]
            kind += [_SQRT_LEFT, _SQRT_RIGHT]
        else:
            x0.append(a)
            x1.append(b)
            kind.append(_SQRT_LEFT if left else _SQRT_RIGHT if right else _LINEAR)
    return _Segments(np.array(x0), np.array(x1), np.array(kind))


def _map(t: np.ndarray, seg: int, segments: _Segments) -> Tuple[np.ndarray, np.ndarray]:
    """
    Abscissae and Jacobian for parameter values `t` of shape (P, n) on segments `seg` (P,).
    """
    x0 = segments.x0[seg][:, None]
    x1 = segments.x1[seg][:, None]
    kind = segments.kind[seg][:, None]
    w = x1 - x0
    x = np.where(kind == _SQRT_LEFT, x0 + w * t * t,
                 np.where(kind == _SQRT_RIGHT, x1 - w * (1.0 - t) ** 2, x0 + w * t))
    jac = np.where(kind == _SQRT_LEFT, 2.0 * w * t,
                   np.where(kind == _SQRT_RIGHT, 2.0 * w * (1.0 - t), w))
    return x, jac


def _weighted_sum(f: np.ndarray, weights: np.ndarray) -> np.ndarray:
    shape = (1, -1) + (1,) * (f.ndim - 2)
    return np.sum(f * weights.reshape(shape), axis=1)


def integrate_adaptive(
    func: Integrand,
    breakpoints: Sequence[float],
    *,
    rel_tol: float,
    abs_tol: float = 0.0,
    max_depth: int = 30,
    singular_points: Sequence[float] = (),
    initial_panels: int = 1,
) -> QuadratureResult:
    """
    Integrate `func` over [min(breakpoints), max(breakpoints)].

    Every interval between consecutive breakpoints is split into `initial_panels` panels.
    Intervals that end on one of `singular_points` are integrated after a quadratic change of
    variable, which absorbs an inverse square-root endpoint singularity.

    A level is finished when the summed error bound of every value component is below
    max(abs_tol, rel_tol*|estimate|). Otherwise panels whose error exceeds their width share
    of that tolerance are bisected and the rest are frozen.

    :param func: vectorised integrand, see the module docstring
    :param breakpoints: interval edges; the integrand is never evaluated on them
    :param rel_tol: relative tolerance per value component
    :param abs_tol: absolute tolerance floor per value component
    :param max_depth: maximum number of bisection levels
    :param singular_points: breakpoints carrying an inverse square-root singularity
    :param initial_panels: panels per interval before refinement
    :raises ConvergenceError: tolerance not met after max_depth levels
    """
    if not rel_tol > 0 and not abs_tol > 0:
        raise InvalidArgumentError("either rel_tol or abs_tol must be positive")
    if max_depth < 0 or initial_panels < 1:
        raise InvalidArgumentError("max_depth must be >= 0 and initial_panels >= 1")

    segments = _build_segments(breakpoints, singular_points)
    total_width = float(np.sum(segments.width))
    edges = np.linspace(0.0, 1.0, initial_panels + 1)
    n_seg = segments.x0.size
    seg = np.repeat(np.arange(n_seg), initial_panels)
    t0 = np.tile(edges[:-1], n_seg)
    t1 = np.tile(edges[1:], n_seg)

    accepted = None
    accepted_err = None
    n_panels = 0
    for depth in range(max_depth + 1):
        half = 0.5 * (t1 - t0)
        center = 0.5 * (t1 + t0)
        t = center[:, None] + half[:, None] * KRONROD_NODES[None, :]
        x, jac = _map(t, seg, segments)
        f = np.asarray(func(x))
        f = f * jac.reshape(jac.shape + (1,) * (f.ndim - 2))
        scale = half.reshape((-1,) + (1,) * (f.ndim - 2))
        kronrod = scale * _weighted_sum(f, KRONROD_WEIGHTS)
        gauss = scale * _weighted_sum(f, GAUSS_WEIGHTS)
        err = np.abs(kronrod - gauss)
        n_panels += t0.size

        if accepted is None:
            accepted = np.zeros(kronrod.shape[1:], dtype=kronrod.dtype)
            accepted_err = np.zeros(err.shape[1:])
        estimate = accepted + kronrod.sum(axis=0)
        total_err = accepted_err + err.sum(axis=0)
        target = np.maximum(abs_tol, rel_tol * np.abs(estimate))
        if np.all(total_err <= target):
            logger.debug("quadrature converged: %d panels, depth %d", n_panels, depth)
            return QuadratureResult(estimate, total_err, n_panels, depth)
        if depth == max_depth:
            raise ConvergenceError(estimate, float(np.max(total_err)), max_depth)

        share = (t1 - t0) * segments.width[seg] / total_width
        share = share.reshape((-1,) + (1,) * (err.ndim - 1))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(err > 0, err / (target * share), 0.0)
        ratio = ratio.reshape(ratio.shape[0], -1).max(axis=1)
        refine = ratio > 1.0
        if not np.any(refine):
            refine[np.argmax(ratio)] = True

        keep = ~refine
        accepted = accepted + kronrod[keep].sum(axis=0)
        accepted_err = accepted_err + err[keep].sum(axis=0)

        mid = 0.5 * (t0[refine] + t1[refine])
        t0 = np.stack([t0[refine], mid], axis=1).ravel()
        t1 = np.stack([mid, t1[refine]], axis=1).ravel()
        seg = np.repeat(seg[refine], 2)
    raise AssertionError("unreachable")


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Gauss-Legendre nodes and weights on [-1, 1] (read-only arrays).
    """
    if order < 1:
        raise InvalidArgumentError(f"order must be >= 1, got {order}")
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def composite_gauss(
    edges: Sequence[float], order: int, singular_points: Sequence[float] = ()
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Nodes and weights of a composite Gauss-Legendre rule with one panel per edge interval.

    Panels ending on a singular point use the same square-root substitution as
    `integrate_adaptive`. Returns arrays of shape (P, order).
    """
    segments = _build_segments(edges, singular_points)
    x, w = gauss_legendre(order)
    t = 0.5 * (x + 1.0)
    seg = np.arange(segments.x0.size)
    nodes, jac = _map(np.broadcast_to(t, (seg.size, order)), seg, segments)
    return nodes, 0.5 * w[None, :] * jac
