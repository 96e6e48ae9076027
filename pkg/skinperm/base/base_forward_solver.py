# base_forward_solver.py

import logging
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional

from skinperm.em.materials import ComplexPermittivity, LayerStack
from skinperm.handlers import NoOpResultHandler, ResultHandler


class BaseForwardSolver(ABC):
    def __init__(self, handlers: Optional[List[ResultHandler]] = None):
        """
        Base class for forward solvers Gamma = F(eps).

        :param handlers: Optional list of handlers receiving every computed reflection.
        """
        self.handlers = handlers or [NoOpResultHandler()]

    @abstractmethod
    def reflection_coefficient(self, freq: float, eps_skin: ComplexPermittivity) -> complex:
        """
        Dominant-mode reflection coefficient at the aperture reference plane.

        :param freq: frequency in Hz
        :param eps_skin: permittivity substituted for the skin material
        :return: complex Gamma
        """
        pass

    def preprocess(self, stack: LayerStack) -> LayerStack:
        """
        Optional: adjust the stack before it is solved.
        """
        return stack

    def _dispatch(self, results: Dict[str, Any]) -> None:
        for handler in self.handlers:
            try:
                handler.handle(results)
            except Exception:
                logging.error(f"Handler {handler.__class__.__name__} failed", exc_info=True)
