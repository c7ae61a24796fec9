# model/scenario.py
from __future__ import annotations

from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from model.dynamics import State, SystemParams
from model.geometry import TrackGeometry

# integrality tolerance for T/h
GRID_TOL = 1e-9


class Bounds(BaseModel):
    """Admissible link length [m] and link acceleration [m/s^2]."""

    model_config = ConfigDict(frozen=True)

    l_min: float
    l_max: float
    u_min: float
    u_max: float

    @model_validator(mode="after")
    def _check(self) -> "Bounds":
        # degenerate ranges are allowed here (single-sample series)
        if not self.l_min <= self.l_max:
            raise ValueError(f"l_min <= l_max violated (l_min={self.l_min}, l_max={self.l_max})")
        if not self.u_min <= self.u_max:
            raise ValueError(f"u_min <= u_max violated (u_min={self.u_min}, u_max={self.u_max})")
        return self

    @property
    def l_mid(self) -> float:
        return 0.5 * (self.l_min + self.l_max)

    def contains_l(self, l: float) -> bool:
        return self.l_min <= l <= self.l_max


class Scenario(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    geom: TrackGeometry = Field(default_factory=TrackGeometry)
    params: SystemParams = Field(default_factory=SystemParams)
    T: float = 5.0
    h: float = 0.01
    x0: Tuple[float, float, float, float]
    bounds: Bounds
    q: Tuple[float, float, float, float] = (-65.0, -65.0, 0.0, 0.0)

    @model_validator(mode="after")
    def _check(self) -> "Scenario":
        if not self.T > 0:
            raise ValueError(f"T > 0 violated (T={self.T})")
        if not self.h > 0:
            raise ValueError(f"h > 0 violated (h={self.h})")
        steps = self.T / self.h
        if abs(steps - round(steps)) > GRID_TOL or round(steps) < 1:
            raise ValueError(f"T/h integral violated (T={self.T}, h={self.h})")
        b = self.bounds
        if not b.l_min < b.l_max:
            raise ValueError(f"l_min < l_max violated (l_min={b.l_min}, l_max={b.l_max})")
        if not b.u_min < b.u_max:
            raise ValueError(f"u_min < u_max violated (u_min={b.u_min}, u_max={b.u_max})")
        if not all(np.isfinite(self.x0)):
            raise ValueError(f"x0 finite violated (x0={self.x0})")
        if not b.contains_l(self.x0[2]):
            raise ValueError(
                f"x0.l within [l_min, l_max] violated (l={self.x0[2]}, bounds=[{b.l_min}, {b.l_max}])"
            )
        return self

    @property
    def N(self) -> int:
        return int(round(self.T / self.h))

    @property
    def times(self) -> np.ndarray:
        # index-multiplied, no accumulation drift
        return np.arange(self.N + 1) * self.h

    @property
    def initial_state(self) -> State:
        return State(*(float(v) for v in self.x0))

    def with_updates(self, **changes) -> "Scenario":
        """Validated copy with some fields replaced."""
        data = {name: getattr(self, name) for name in type(self).model_fields}
        data.update(changes)
        return Scenario(**data)
