import math

import numpy as np
import pytest

from skinperm.errors import ConvergenceError, InvalidArgumentError
from skinperm.forward.quadrature import (
    GAUSS_WEIGHTS,
    KRONROD_NODES,
    KRONROD_WEIGHTS,
    composite_gauss,
    gauss_legendre,
    integrate_adaptive,
)


def test_kronrod_rule_is_consistent():
    assert KRONROD_NODES.shape == (15,)
    assert np.all(np.diff(KRONROD_NODES) > 0)
    assert KRONROD_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-14)
    assert GAUSS_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-14)
    # gauss nodes are the odd kronrod nodes
    assert np.count_nonzero(GAUSS_WEIGHTS) == 7


def test_polynomial_is_exact_on_one_panel():
    result = integrate_adaptive(lambda x: x ** 10, [0.0, 2.0], rel_tol=1e-12)
    assert result.value == pytest.approx(2.0 ** 11 / 11, rel=1e-14)
    assert result.depth == 0
    assert result.n_panels == 1


def test_sine_over_half_period():
    result = integrate_adaptive(np.sin, [0.0, math.pi], rel_tol=1e-12)
    assert result.value == pytest.approx(2.0, rel=1e-12)
    assert result.error <= 1e-12 * 2.0


def test_complex_integrand():
    result = integrate_adaptive(lambda x: np.exp(1j * x), [0.0, math.pi], rel_tol=1e-12)
    assert complex(result.value) == pytest.approx(2j, abs=1e-12)


def test_trailing_value_dimensions():
    result = integrate_adaptive(
        lambda x: np.stack([x, x * x], axis=-1), [0.0, 0.5, 1.0], rel_tol=1e-12
    )
    assert result.value.shape == (2,)
    np.testing.assert_allclose(result.value, [0.5, 1.0 / 3.0], rtol=1e-13)


def test_kink_converges_by_refinement():
    result = integrate_adaptive(lambda x: np.abs(x - 0.3), [0.0, 1.0], rel_tol=1e-10, max_depth=50)
    assert result.value == pytest.approx(0.29, rel=1e-9)
    assert result.depth > 0


@pytest.mark.parametrize(
    "func, singular",
    [
        (lambda x: 1.0 / np.sqrt(x), [0.0]),
        (lambda x: 1.0 / np.sqrt(1.0 - x), [1.0]),
    ],
)
def test_inverse_sqrt_endpoint(func, singular):
    result = integrate_adaptive(func, [0.0, 1.0], rel_tol=1e-12, singular_points=singular)
    assert result.value == pytest.approx(2.0, rel=1e-12)


def test_interior_singular_point_splits_both_sides():
    result = integrate_adaptive(
        lambda x: 1.0 / np.sqrt(np.abs(x - 0.5)), [0.0, 1.0], rel_tol=1e-11, singular_points=[0.5]
    )
    assert result.value == pytest.approx(2.0 * math.sqrt(2.0), rel=1e-10)


def test_initial_panels_do_not_change_the_answer():
    one = integrate_adaptive(np.cos, [0.0, 3.0], rel_tol=1e-12)
    many = integrate_adaptive(np.cos, [0.0, 3.0], rel_tol=1e-12, initial_panels=7)
    assert one.value == pytest.approx(math.sin(3.0), abs=1e-13)
    assert many.value == pytest.approx(math.sin(3.0), abs=1e-13)


def test_convergence_error_carries_estimate():
    with pytest.raises(ConvergenceError) as info:
        integrate_adaptive(lambda x: np.sin(50.0 * x), [0.0, 10.0], rel_tol=1e-12, max_depth=0)
    assert info.value.max_depth == 0
    assert info.value.error_bound > 0


@pytest.mark.parametrize(
    "kwargs",
    [
        {"breakpoints": [1.0], "rel_tol": 1e-6},
        {"breakpoints": [0.0, math.inf], "rel_tol": 1e-6},
        {"breakpoints": [0.0, 1.0], "rel_tol": 0.0},
        {"breakpoints": [0.0, 1.0], "rel_tol": 1e-6, "max_depth": -1},
        {"breakpoints": [0.0, 1.0], "rel_tol": 1e-6, "initial_panels": 0},
    ],
)
def test_invalid_arguments(kwargs):
    kwargs = dict(kwargs)
    breakpoints = kwargs.pop("breakpoints")
    with pytest.raises(InvalidArgumentError):
        integrate_adaptive(np.cos, breakpoints, **kwargs)


def test_gauss_legendre_is_cached_and_read_only():
    x, w = gauss_legendre(12)
    assert gauss_legendre(12)[0] is x
    assert not x.flags.writeable
    assert not w.flags.writeable
    assert w.sum() == pytest.approx(2.0)
    with pytest.raises(InvalidArgumentError):
        gauss_legendre(0)


def test_composite_gauss_integrates_cubic():
    nodes, weights = composite_gauss([0.0, 1.0, 2.0], 4)
    assert nodes.shape == weights.shape == (2, 4)
    assert np.sum(nodes ** 3 * weights) == pytest.approx(4.0, rel=1e-14)


def test_composite_gauss_absorbs_singularity():
    nodes, weights = composite_gauss([0.0, 1.0], 8, singular_points=[0.0])
    assert np.all(nodes > 0)
    assert np.sum(weights / np.sqrt(nodes)) == pytest.approx(2.0, rel=1e-13)
