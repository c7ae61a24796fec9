from .geometry import TrackGeometry, SurfaceCoord
from .dynamics import SystemParams, State, EomCoefficients
from .scenario import Bounds, Scenario

__all__ = [
    "TrackGeometry",
    "SurfaceCoord",
    "SystemParams",
    "State",
    "EomCoefficients",
    "Bounds",
    "Scenario",
]
