# core/errors.py
"""
Exception hierarchy shared by every package.
Input problems also derive from ValueError so callers can treat them as
validation failures without importing this module.
"""
from __future__ import annotations

from typing import Optional


class PumpTrackError(Exception):
    """Base class for all errors raised by this project."""


class SingularMassError(PumpTrackError, ArithmeticError):
    def __init__(self, phi: float, l: float, mass: float):
        super().__init__(f"singular generalized mass M={mass:.3e} at phi={phi:.6g}, l={l:.6g}")
        self.phi = phi
        self.l = l
        self.mass = mass


class TrajectoryEscapeError(PumpTrackError):
    def __init__(self, step: int, l: float, lo: float, hi: float):
        super().__init__(f"link length l={l:.6g} left corridor [{lo:.6g}, {hi:.6g}] at step {step}")
        self.step = step
        self.l = l


class HorizonExceededError(PumpTrackError):
    def __init__(self, target: float, cap: float, reached: float):
        super().__init__(f"phi={target:.6g} not reached within {cap:.6g} s (last phi={reached:.6g})")
        self.target = target
        self.cap = cap
        self.reached = reached


class TargetNotReachedError(PumpTrackError, ValueError):
    def __init__(self, phi: float, phi_end: float):
        super().__init__(f"trajectory never reaches phi={phi:.6g} (ends at {phi_end:.6g})")
        self.phi = phi


class SeriesError(PumpTrackError, ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


class MissingMarkerError(PumpTrackError, KeyError):
    def __init__(self, marker: str, frame: int):
        super().__init__(f"marker '{marker}' missing at frame {frame}")
        self.marker = marker
        self.frame = frame

    def __str__(self) -> str:
        return self.args[0]
