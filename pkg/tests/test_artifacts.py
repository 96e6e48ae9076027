import csv

from skinperm.artifacts import atomic_write_text, csv_text, fmt


def test_csv_numbers_round_trip():
    text = csv_text(("freq_hz", "eps_real"), [(140e9, 0.1 + 0.2)])
    assert text == f"freq_hz,eps_real\n140000000000,{fmt(0.1 + 0.2)}\n"
    assert float(text.splitlines()[1].split(",")[1]) == 0.1 + 0.2


def test_csv_labels_with_commas_are_quoted(tmp_path):
    path = atomic_write_text(tmp_path / "labels.csv", csv_text(("label", "n"), [("palm, left", 3), ("index", 1)]))
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    assert rows == [["label", "n"], ["palm, left", "3"], ["index", "1"]]
    assert path.read_text().splitlines()[1] == '"palm, left",3'
