import json

import numpy as np
import pytest

from skinperm.errors import BankFormatError, BankOrderError, BankVersionError, GridMismatchError
from skinperm.handlers import ResultHandler
from skinperm.inverse import (
    BankInverseSolver,
    ModelBank,
    fit_rbn,
    load_bank,
    predict_many,
    save_bank,
    table_provenance,
)
from tests.conftest import plane_wave_gamma


class RecordingHandler(ResultHandler):
    def __init__(self):
        self.events = []

    def handle(self, results):
        self.events.append(results)


@pytest.fixture
def bank_file(bank, tmp_path):
    path = tmp_path / "bank.json"
    save_bank(bank, path)
    return path


def rewrite(path, mutate):
    payload = json.loads(path.read_text())
    mutate(payload)
    path.write_text(json.dumps(payload))


def test_bank_layout(bank, table):
    np.testing.assert_array_equal(bank.frequencies, table.frequencies)
    assert bank.spread == 1.0
    assert bank.provenance == table_provenance(table)
    assert bank.sweep_box == table.header.sweep_box
    assert all(m.n_centers == table.n_samples for m in bank.models)


def test_models_are_trained_per_frequency(bank, table):
    alone = fit_rbn(table.gamma[1], table.eps, 1.0, freq=180e9)
    np.testing.assert_array_equal(bank.model_at(180e9).weights, alone.weights)
    np.testing.assert_array_equal(bank.model_at(180e9).bias, alone.bias)


def test_round_trip_predictions_are_bitwise(bank, bank_file):
    loaded = load_bank(bank_file)
    assert loaded.provenance == bank.provenance
    assert loaded.waveguide == bank.waveguide
    assert loaded.stack == bank.stack
    rng = np.random.default_rng(8)
    probe = rng.uniform(-0.5, -0.2, 100) + 1j * rng.uniform(-0.1, 0.1, 100)
    for before, after in zip(bank.models, loaded.models):
        np.testing.assert_array_equal(before.centers, after.centers)
        np.testing.assert_array_equal(before.weights, after.weights)
        a, fa = predict_many(before, probe, bank.sweep_box)
        b, fb = predict_many(after, probe, loaded.sweep_box)
        np.testing.assert_array_equal(a, b)
        np.testing.assert_array_equal(fa, fb)


def test_truncated_file(bank_file):
    text = bank_file.read_text()
    bank_file.write_text(text[: len(text) // 2])
    with pytest.raises(BankFormatError):
        load_bank(bank_file)


def test_missing_file(tmp_path):
    with pytest.raises(BankFormatError):
        load_bank(tmp_path / "nope.json")


def test_shuffled_frequencies(bank_file):
    def shuffle(payload):
        payload["models"].reverse()
        payload["frequencies"].reverse()

    rewrite(bank_file, shuffle)
    with pytest.raises(BankOrderError):
        load_bank(bank_file)


def test_unsupported_version(bank_file):
    rewrite(bank_file, lambda p: p.update(format_version=2))
    with pytest.raises(BankVersionError):
        load_bank(bank_file)


def test_unknown_kernel(bank_file):
    rewrite(bank_file, lambda p: p.update(kernel="multiquadric"))
    with pytest.raises(BankFormatError):
        load_bank(bank_file)


def test_frequency_list_must_match_models(bank_file):
    rewrite(bank_file, lambda p: p["frequencies"].__setitem__(0, 1.0))
    with pytest.raises(BankFormatError):
        load_bank(bank_file)


def test_bad_model_record(bank_file):
    rewrite(bank_file, lambda p: p["models"][0]["weights"].pop())
    with pytest.raises(BankFormatError):
        load_bank(bank_file)


def test_bank_rejects_unordered_models(bank):
    with pytest.raises(BankOrderError):
        ModelBank(models=tuple(reversed(bank.models)), provenance="x")


def test_model_at_unknown_frequency(bank):
    with pytest.raises(GridMismatchError):
        bank.model_at(150e9)


def test_inverse_solver_recovers_and_dispatches(bank):
    recorder = RecordingHandler()
    solver = BankInverseSolver(bank, handlers=[recorder])
    gamma = complex(plane_wave_gamma(np.array([4.7 - 2.4j]), 140e9)[0])
    estimate = solver.predict(140e9, gamma)
    assert abs(estimate.value - (4.7 - 2.4j)) / abs(4.7 - 2.4j) < 1e-3
    assert not estimate.extrapolated
    assert recorder.events == [
        {"freq": 140e9, "gamma": gamma, "eps": estimate.value, "extrapolated": False}
    ]


def test_sweep_prediction_is_worker_independent(bank):
    freqs = bank.frequencies.tolist()
    gammas = [complex(plane_wave_gamma(np.array([4.7 - 2.4j]), f)[0]) for f in freqs]
    serial, parallel = RecordingHandler(), RecordingHandler()
    a = BankInverseSolver(bank, handlers=[serial]).predict_sweep(freqs, gammas, n_jobs=1)
    b = BankInverseSolver(bank, handlers=[parallel]).predict_sweep(freqs, gammas, n_jobs=2)
    np.testing.assert_allclose([e.value for e in a], [e.value for e in b], rtol=1e-13)
    assert [e.extrapolated for e in a] == [e.extrapolated for e in b]
    assert [e["freq"] for e in parallel.events] == freqs
    assert [e["gamma"] for e in serial.events] == [e["gamma"] for e in parallel.events]
    assert a[0] == BankInverseSolver(bank).predict(freqs[0], gammas[0])
