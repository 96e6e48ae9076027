import cmath

import numpy as np
import pytest

from skinperm.errors import InvalidArgumentError, TouchstoneParseError
from skinperm.measurement import (
    MeasurementTrace,
    parse_touchstone,
    read_touchstone,
    serialize_touchstone,
    write_touchstone,
    write_trace_csv,
)


class TestParse:
    def test_real_imaginary(self):
        trace = parse_touchstone("# GHz S RI R 50\n140 0.1 -0.2\n150 0.2 0.1\n")
        np.testing.assert_array_equal(trace.freq, [140e9, 150e9])
        np.testing.assert_array_equal(trace.gamma, [0.1 - 0.2j, 0.2 + 0.1j])
        assert trace.format == "RI"
        assert trace.z0 == 50.0

    def test_magnitude_angle(self):
        trace = parse_touchstone("# MHz S MA R 50\n140000 0.5 90\n")
        assert trace.freq[0] == 140e9
        assert trace.gamma[0] == pytest.approx(0.5j, abs=1e-15)

    def test_decibel_angle(self):
        trace = parse_touchstone("# Hz S DB R 50\n1.4e11 -6.020599913279624 180\n")
        assert trace.gamma[0] == pytest.approx(-0.5, abs=1e-14)

    def test_kilohertz(self):
        trace = parse_touchstone("# kHz S RI\n140000000 0.1 0\n")
        assert trace.freq[0] == 140e9

    def test_defaults_are_ghz_magnitude_angle(self):
        trace = parse_touchstone("#\n140 0.5 -30\n")
        assert trace.freq[0] == 140e9
        assert trace.gamma[0] == pytest.approx(cmath.rect(0.5, -cmath.pi / 6), abs=1e-15)
        assert trace.z0 == 50.0

    def test_options_are_case_insensitive_and_unordered(self):
        trace = parse_touchstone("# r 75 ri s ghz\n140 0.1 0.1\n")
        assert trace.z0 == 75.0
        assert trace.format == "RI"
        assert trace.freq[0] == 140e9

    def test_comments_and_blank_lines(self):
        text = "! Touchstone\n\n# GHz S RI R 50 ! option\n\n140 0.1 0.2 ! first\n! middle\n150 0.3 0.4\n"
        trace = parse_touchstone(text)
        assert len(trace) == 2
        assert trace.gamma[1] == 0.3 + 0.4j

    @pytest.mark.parametrize(
        "text, line",
        [
            ("[Version] 2.0\n# GHz S RI\n140 0 0\n", 1),
            ("# GHz S RI\n# GHz S RI\n140 0 0\n", 2),
            ("140 0.1 0.1\n# GHz S RI\n", 1),
            ("# GHz S RI\n140 0.1\n", 2),
            ("# GHz S RI\n140 0.1 0.1 0.2 0.3\n", 2),
            ("# GHz S RI\n140 a 0.1\n", 2),
            ("# GHz S RI\n150 0.1 0\n150 0.1 0\n", 3),
            ("# GHz S RI\n150 0.1 0\n140 0.1 0\n", 3),
            ("# GHz S RI\n140 1.2 0\n", 2),
            ("# GHz Z RI\n140 0.1 0\n", 1),
            ("# GHz S XX\n140 0.1 0\n", 1),
            ("# GHz S RI R\n140 0.1 0\n", 1),
            ("! header\n# GHz S RI R fifty\n140 0.1 0\n", 2),
        ],
    )
    def test_errors_carry_line_number(self, text, line):
        with pytest.raises(TouchstoneParseError) as info:
            parse_touchstone(text, source="probe.s1p")
        assert info.value.line_number == line
        assert str(info.value).startswith(f"probe.s1p:{line}: ")

    @pytest.mark.parametrize("text", ["! nothing here\n", "# GHz S RI\n! no rows\n"])
    def test_empty_documents(self, text):
        with pytest.raises(TouchstoneParseError) as info:
            parse_touchstone(text)
        assert info.value.line_number is None

    def test_small_overshoot_is_tolerated(self):
        trace = parse_touchstone("# GHz S MA\n140 1.04 0\n")
        assert abs(trace.gamma[0]) == pytest.approx(1.04)


class TestWrite:
    def test_canonical_round_trip(self):
        original = parse_touchstone("# MHz S DB R 50\n140000 -3.1 12.5\n150000 -2.9 -40.25\n", source="a.s1p")
        text = serialize_touchstone(original)
        assert text.splitlines()[1] == "# Hz S RI R 50"
        again = parse_touchstone(text)
        np.testing.assert_array_equal(again.freq, original.freq)
        np.testing.assert_array_equal(again.gamma, original.gamma)
        assert serialize_touchstone(again).splitlines()[1:] == text.splitlines()[1:]

    def test_files(self, tmp_path):
        trace = MeasurementTrace(np.array([140e9, 141e9]), np.array([0.1 + 0.2j, -0.3 + 0.05j]), source="x.s1p")
        path = write_touchstone(trace, tmp_path / "out" / "x.s1p")
        loaded = read_touchstone(path)
        np.testing.assert_array_equal(loaded.gamma, trace.gamma)
        assert loaded.source == str(path)

    def test_binary_file_is_a_parse_error(self, tmp_path):
        path = tmp_path / "bin.s1p"
        path.write_bytes(b"\xff\xfe\x00\x81")
        with pytest.raises(TouchstoneParseError):
            read_touchstone(path)

    def test_trace_csv(self, tmp_path):
        trace = MeasurementTrace(np.array([140e9]), np.array([0.25 - 0.5j]))
        path = write_trace_csv(trace, tmp_path / "trace.csv")
        assert path.read_text().splitlines() == ["freq_hz,gamma_real,gamma_imag", "140000000000,0.25,-0.5"]


class TestTrace:
    @pytest.mark.parametrize(
        "freq, gamma",
        [
            ([], []),
            ([140e9, 150e9], [0.1]),
            ([150e9, 140e9], [0.1, 0.2]),
            ([140e9], [1.5]),
        ],
    )
    def test_validation(self, freq, gamma):
        with pytest.raises(InvalidArgumentError):
            MeasurementTrace(np.array(freq, dtype=float), np.array(gamma, dtype=complex))

    def test_span_and_with_gamma(self):
        trace = MeasurementTrace(np.array([140e9, 220e9]), np.array([0.1, 0.2]))
        assert trace.span == (140e9, 220e9)
        swapped = trace.with_gamma(np.array([0.3j, 0.4j]))
        assert swapped.gamma[1] == 0.4j
        assert trace.gamma[1] == 0.2
