import json

import numpy as np
import pytest

from skinperm.artifacts import sidecar_path
from skinperm.em import ComplexPermittivity, FrequencyGrid
from skinperm.errors import ForwardSolverError, InvalidArgumentError, TableFormatError
from skinperm.forward import (
    TABLE_COLUMNS,
    ReflectionSample,
    SweepBox,
    generate_training_table,
    load_table,
    reflection_coefficient,
    save_table,
)
from tests.conftest import synthetic_table

GRID = FrequencyGrid(start=140e9, stop=220e9, n_points=2)


class TestSweepBox:
    def test_rejects_reversed_bounds(self):
        with pytest.raises(ValueError):
            SweepBox(eps_real=(6.0, 3.0))
        with pytest.raises(ValueError):
            SweepBox(eps_imag=(-1.0, 4.0))

    def test_widened_and_contains(self):
        box = SweepBox()
        assert box.widened(0.1) == (pytest.approx((2.7, 6.3)), pytest.approx((0.7, 4.3)))
        assert box.contains(3.0, 4.0)
        assert not box.contains(2.8, 2.0)
        assert box.contains(2.8, 2.0, fraction=0.1)

    def test_random_sampling_is_seeded(self):
        box = SweepBox()
        re1, im1 = box.sample(50, seed=4)
        re2, im2 = box.sample(50, seed=4)
        np.testing.assert_array_equal(re1, re2)
        np.testing.assert_array_equal(im1, im2)
        assert np.all((re1 >= 3) & (re1 <= 6))
        assert np.all((im1 >= 1) & (im1 <= 4))
        assert not np.array_equal(re1, box.sample(50, seed=5)[0])

    def test_lattice_sampling(self):
        re, im = SweepBox().sample(9, seed=0, sampling="lattice")
        np.testing.assert_array_equal(re, [3, 3, 3, 4.5, 4.5, 4.5, 6, 6, 6])
        np.testing.assert_array_equal(im, [1, 2.5, 4] * 3)
        with pytest.raises(InvalidArgumentError):
            SweepBox().sample(10, seed=0, sampling="lattice")


class TestGenerate:
    def test_shape_and_header(self):
        table = generate_training_table(SweepBox(), 4, GRID, seed=1)
        assert table.gamma.shape == (2, 4)
        assert table.eps.shape == (4,)
        assert table.header.n_samples == 4
        assert table.header.seed == 1
        assert np.all(np.abs(table.gamma) < 1)
        assert table.gamma[0, 2] == reflection_coefficient(
            140e9, ComplexPermittivity.from_complex(table.eps[2])
        )

    def test_worker_count_does_not_change_results(self):
        serial = generate_training_table(SweepBox(), 4, GRID, seed=2, n_jobs=1)
        parallel = generate_training_table(SweepBox(), 4, GRID, seed=2, n_jobs=2)
        np.testing.assert_array_equal(serial.gamma, parallel.gamma)
        np.testing.assert_array_equal(serial.eps, parallel.eps)

    def test_too_few_samples(self):
        with pytest.raises(InvalidArgumentError):
            generate_training_table(SweepBox(), 3, GRID, seed=0)

    def test_multimode_grid_is_rejected(self):
        with pytest.raises(InvalidArgumentError):
            generate_training_table(SweepBox(), 4, FrequencyGrid(start=140e9, stop=240e9, n_points=2), seed=0)

    def test_solver_failures_carry_sample(self, monkeypatch):
        def explode(freq, eps, cfg):
            raise RuntimeError("no luck")

        monkeypatch.setattr("skinperm.forward.training.reflection_coefficient", explode)
        with pytest.raises(ForwardSolverError) as info:
            generate_training_table(SweepBox(), 4, GRID, seed=0)
        assert info.value.freq == 140e9
        assert isinstance(info.value.cause, RuntimeError)


class TestTableFiles:
    def test_round_trip_is_exact(self, tmp_path):
        table = synthetic_table(n_samples=25)
        path = tmp_path / "table.csv"
        save_table(table, path)
        loaded = load_table(path)
        assert loaded.header == table.header
        np.testing.assert_array_equal(loaded.eps, table.eps)
        np.testing.assert_array_equal(loaded.gamma, table.gamma)

    def test_layout(self, tmp_path):
        table = synthetic_table(n_samples=4)
        path = tmp_path / "table.csv"
        save_table(table, path)
        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(TABLE_COLUMNS)
        assert len(lines) == 1 + 3 * 4
        meta = json.loads(sidecar_path(path).read_text())
        assert meta["format_version"] == 1
        assert meta["n_samples"] == 4

    def test_samples_view(self):
        table = synthetic_table(n_samples=4)
        samples = table.samples(1)
        assert len(samples) == 4
        assert isinstance(samples[0], ReflectionSample)
        assert samples[0].freq == 180e9
        assert samples[0].eps.value == table.eps[0]

    def test_truncated_table(self, tmp_path):
        path = tmp_path / "table.csv"
        save_table(synthetic_table(n_samples=4), path)
        lines = path.read_text().splitlines()
        path.write_text("\n".join(lines[:-2]) + "\n")
        with pytest.raises(TableFormatError):
            load_table(path)

    def test_garbage_row(self, tmp_path):
        path = tmp_path / "table.csv"
        save_table(synthetic_table(n_samples=4), path)
        lines = path.read_text().splitlines()
        lines[3] = "1,2,not-a-number,4,5"
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(TableFormatError):
            load_table(path)

    def test_missing_sidecar(self, tmp_path):
        path = tmp_path / "table.csv"
        save_table(synthetic_table(n_samples=4), path)
        sidecar_path(path).unlink()
        with pytest.raises(TableFormatError):
            load_table(path)

    def test_wrong_header(self, tmp_path):
        path = tmp_path / "table.csv"
        save_table(synthetic_table(n_samples=4), path)
        text = path.read_text().replace("gamma_real", "g_re", 1)
        path.write_text(text)
        with pytest.raises(TableFormatError):
            load_table(path)

    def test_sample_outside_sweep_box(self, tmp_path):
        path = tmp_path / "table.csv"
        save_table(synthetic_table(n_samples=4), path)
        lines = path.read_text().splitlines()
        for row in (1, 5, 9):
            fields = lines[row].split(",")
            fields[1] = "9.5"
            lines[row] = ",".join(fields)
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(TableFormatError, match="outside the sweep box"):
            load_table(path)

    def test_header_sample_count_must_match_rows(self, tmp_path):
        path = tmp_path / "table.csv"
        save_table(synthetic_table(n_samples=4), path)
        meta = json.loads(sidecar_path(path).read_text())
        meta["n_samples"] = 5
        sidecar_path(path).write_text(json.dumps(meta))
        with pytest.raises(TableFormatError, match="expected 15 rows"):
            load_table(path)
