# constraints/link_length.py
from __future__ import annotations

import numpy as np

from constraints.base_constraint import BaseConstraint

L_INDEX = 2


class LinkLengthConstraint(BaseConstraint):
    """
    l_min <= l_k <= l_max at every grid point, as the pair
    (l_k - l_max, l_min - l_k).
    """

    def __init__(self, l_min: float, l_max: float, enabled: bool = True):
        super().__init__(name="link_length", enabled=enabled)
        if not l_min <= l_max:
            raise ValueError(f"l_min <= l_max violated (l_min={l_min}, l_max={l_max})")
        self.l_min = l_min
        self.l_max = l_max

    def values(self, states: np.ndarray) -> np.ndarray:
        l = states[:, L_INDEX]
        return np.stack([l - self.l_max, self.l_min - l], axis=1)

    def state_jacobian(self, states: np.ndarray) -> np.ndarray:
        jac = np.zeros((len(states), 2, 4))
        jac[:, 0, L_INDEX] = 1.0
        jac[:, 1, L_INDEX] = -1.0
        return jac
