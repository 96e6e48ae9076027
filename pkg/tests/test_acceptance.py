import numpy as np
import pytest

from skinperm.em import ComplexPermittivity, FrequencyGrid
from skinperm.forward import SweepBox, generate_training_table, reflection_coefficient
from skinperm.inverse import evaluate_holdout, predict, summarize_holdout, train_bank
from skinperm.measurement import MeasurementTrace
from skinperm.stats import invert_trace

pytestmark = pytest.mark.slow

DESK_GRID = FrequencyGrid(start=140e9, stop=220e9, n_points=11)
SPOT_GRID = FrequencyGrid(start=140e9, stop=220e9, n_points=3)


@pytest.fixture(scope="module")
def desk_table():
    return generate_training_table(SweepBox(), 200, DESK_GRID, seed=7, n_jobs=-1)


@pytest.fixture(scope="module")
def spot_table():
    return generate_training_table(SweepBox(), 1000, SPOT_GRID, seed=7, n_jobs=-1)


@pytest.fixture(scope="module")
def spot_bank(spot_table):
    return train_bank(spot_table, spread=1.0)


def test_desk_scale_holdout(desk_table):
    summary = summarize_holdout(evaluate_holdout(desk_table, train_fraction=0.9, seed=1, spread=1.0))
    assert summary.mean < 1e-3


def test_thousand_sample_holdout(spot_table):
    summary = summarize_holdout(evaluate_holdout(spot_table, train_fraction=0.9, seed=1, spread=1.0))
    assert summary.mean < 5e-4


def test_training_centers_are_reproduced(spot_bank, spot_table):
    model = spot_bank.model_at(SPOT_GRID.start)
    for e, g in zip(spot_table.eps[:50], spot_table.gamma[0, :50]):
        estimate = predict(model, g, spot_bank.sweep_box)
        assert abs(estimate.value - e) / abs(e) < 1e-3


def test_lattice_round_trip(spot_bank):
    re = np.linspace(3.0, 6.0, 5)
    im = np.linspace(1.0, 4.0, 5)
    for f in SPOT_GRID.frequencies():
        model = spot_bank.model_at(f)
        for r in re:
            for i in im:
                truth = ComplexPermittivity(eps_real=r, eps_imag=i)
                gamma = reflection_coefficient(float(f), truth)
                estimate = predict(model, gamma, spot_bank.sweep_box)
                assert abs(estimate.value - truth.value) / abs(truth.value) < 1e-3
                assert not estimate.extrapolated


def test_simulated_measurement_round_trip(spot_bank):
    skin = ComplexPermittivity(eps_real=4.7, eps_imag=2.4)
    freq = SPOT_GRID.frequencies()
    gamma = np.array([reflection_coefficient(float(f), skin) for f in freq])
    recovered = invert_trace(spot_bank, MeasurementTrace(freq, gamma, source="synthetic.s1p"))
    assert np.max(np.abs(recovered.eps - skin.value) / abs(skin.value)) < 1e-3
