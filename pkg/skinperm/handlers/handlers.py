# handlers.py

import json
import logging
from abc import ABC, abstractmethod
from typing import Any, Callable, Dict, Optional

import numpy as np
from pydantic import BaseModel


class ResultHandler(ABC):
    """
    Abstract base class for all result handlers.
    Implement the handle() method to define custom handling logic.
    """

    @abstractmethod
    def handle(self, results: Dict[str, Any]) -> None:
        """
        Process one solver result.

        Args:
            results (Dict[str, Any]): event payload, e.g. {"freq": ..., "eps": ..., "gamma": ...}.
        """
        pass


class NoOpResultHandler(ResultHandler):
    """
    A result handler that does nothing.
    Useful as a default when no other handler is provided.
    """

    def handle(self, results: Dict[str, Any]) -> None:
        pass


def serialize(val: Any) -> Any:
    """
    Turn solver payload values into JSON-compatible objects.
    """
    if isinstance(val, BaseModel):
        return val.model_dump(mode="json")
    if isinstance(val, (complex, np.complexfloating)):
        return [float(val.real), float(val.imag)]
    if isinstance(val, np.generic):
        return val.item()
    if isinstance(val, np.ndarray):
        return [serialize(v) for v in val.tolist()]
    if isinstance(val, dict):
        return {str(k): serialize(v) for k, v in val.items()}
    if isinstance(val, (list, tuple)):
        return [serialize(v) for v in val]
    return val


class LogResultHandler(ResultHandler):
    """
    Sends each result to a logger, one line per event.
    An optional predicate selects which results are logged, e.g. only extrapolated estimates.
    """

    def __init__(
        self,
        level: int = logging.INFO,
        logger: Optional[logging.Logger] = None,
        predicate: Optional[Callable[[Dict[str, Any]], bool]] = None,
    ):
        self.level = level
        self.logger = logger or logging.getLogger("skinperm.results")
        self.predicate = predicate

    def handle(self, results: Dict[str, Any]) -> None:
        if self.predicate is not None and not self.predicate(results):
            return
        text = " ".join(f"{key}={serialize(value)}" for key, value in results.items())
        self.logger.log(self.level, text)


class SaveToFileResultHandler(ResultHandler):
    """
    Appends every result as one JSON line to a file.
    """

    def __init__(self, file_path: str):
        self.file_path = file_path

    def handle(self, results: Dict[str, Any]) -> None:
        line = json.dumps(serialize(results), sort_keys=True) + "\n"
        with open(self.file_path, "a", encoding="utf-8") as f:
            f.write(line)
