# base_inverse_solver.py

import logging
from abc import ABC, abstractmethod
from typing import TYPE_CHECKING, Any, Dict, List, Optional

from skinperm.handlers import NoOpResultHandler, ResultHandler

if TYPE_CHECKING:
    from skinperm.inverse.rbn import PermittivityEstimate


class BaseInverseSolver(ABC):
    """
    Base class for all inverse solvers eps = F^-1(Gamma).
    """

    def __init__(self, handlers: Optional[List[ResultHandler]] = None):
        self.handlers = handlers or [NoOpResultHandler()]

    @abstractmethod
    def predict(self, freq: float, gamma: complex) -> "PermittivityEstimate":
        """
        Estimate the permittivity behind a reflection coefficient measured at `freq`.
        """
        pass

    def preprocess(self, gamma: complex) -> complex:
        """
        Optional reflection-coefficient preprocessing step.
        """
        return gamma

    def _dispatch(self, result: Dict[str, Any]) -> None:
        for handler in self.handlers:
            try:
                handler.handle(result)
            except Exception:
                logging.error(f"Handler {handler.__class__.__name__} failed", exc_info=True)
