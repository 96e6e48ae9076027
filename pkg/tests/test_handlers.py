import json
import logging

import numpy as np

from skinperm.em import ComplexPermittivity
from skinperm.forward import ApertureForwardSolver
from skinperm.handlers import LogResultHandler, NoOpResultHandler, SaveToFileResultHandler
from skinperm.handlers.handlers import serialize


def test_serialize_payload_values():
    eps = ComplexPermittivity(eps_real=4.7, eps_imag=2.4)
    assert serialize(1.5 - 0.5j) == [1.5, -0.5]
    assert serialize(np.complex128(2 + 1j)) == [2.0, 1.0]
    assert serialize(np.float64(3.0)) == 3.0
    assert serialize(np.array([1 + 1j, 2.0])) == [[1.0, 1.0], [2.0, 0.0]]
    assert serialize({"eps": eps}) == {"eps": {"eps_real": 4.7, "eps_imag": 2.4}}


def test_save_to_file_appends_json_lines(tmp_path):
    path = tmp_path / "events.jsonl"
    handler = SaveToFileResultHandler(str(path))
    handler.handle({"freq": 150e9, "gamma": -0.25 + 0.5j})
    handler.handle({"freq": 160e9, "gamma": -0.5 + 0j})
    lines = path.read_text().splitlines()
    assert len(lines) == 2
    assert json.loads(lines[0]) == {"freq": 150e9, "gamma": [-0.25, 0.5]}


def test_solver_events_reach_the_file(tmp_path, skin):
    path = tmp_path / "forward.jsonl"
    solver = ApertureForwardSolver(handlers=[SaveToFileResultHandler(str(path))])
    gamma = solver.reflection_coefficient(150e9, skin)
    event = json.loads(path.read_text())
    assert event["gamma"] == [gamma.real, gamma.imag]
    assert event["freq"] == 150e9


def test_log_handler_predicate(caplog):
    handler = LogResultHandler(logging.WARNING, predicate=lambda r: bool(r["extrapolated"]))
    with caplog.at_level(logging.WARNING, logger="skinperm.results"):
        handler.handle({"freq": 150e9, "extrapolated": False})
        handler.handle({"freq": 160e9, "extrapolated": True})
    assert len(caplog.records) == 1
    assert "freq=160000000000.0" in caplog.records[0].getMessage()


def test_no_op_handler_accepts_anything():
    assert NoOpResultHandler().handle({"anything": object()}) is None
