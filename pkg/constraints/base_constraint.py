# constraints/base_constraint.py
"""
BaseConstraint - shared parent class for path constraints on the state grid.
Each constraint defines:
  - values(states): g with shape (K, p), feasible where g <= 0
  - state_jacobian(states): dg/dx with shape (K, p, 4)
States passed in are the grid points x_1..x_N (x_0 is fixed data).
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Any, Dict

import numpy as np

from core.logging import logger


class BaseConstraint(ABC):
    """Abstract base class that all path constraints inherit from."""

    def __init__(self, name: str, enabled: bool = True):
        self.name = name
        self.enabled = enabled

    @abstractmethod
    def values(self, states: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @abstractmethod
    def state_jacobian(self, states: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def violation(self, states: np.ndarray) -> float:
        """Largest positive part of g; 0.0 when feasible."""
        g = self.values(states)
        return float(max(0.0, np.max(g))) if g.size else 0.0

    def log_result(self, result: Dict[str, Any]) -> None:
        status = result.get("status", "completed")
        logger.debug(f"[{self.name}] → {status} | details={result}")

    def __repr__(self) -> str:
        return f"<Constraint name={self.name} enabled={self.enabled}>"
