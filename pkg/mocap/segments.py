# mocap/segments.py
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np
import yaml

from core.errors import MissingMarkerError
from core.logging import logger
from mocap.series import MarkerSeries, ScalarSeries, distance_series

MODELS_DIR = os.path.join(os.path.dirname(__file__), "models")
DEFAULT_MODEL = "default_16"
FRACTION_TOL = 1e-6


@dataclass(frozen=True)
class Segment:
    name: str
    proximal: str
    distal: str
    mass_fraction: float
    com_ratio: float


@dataclass(frozen=True)
class SegmentModel:
    name: str
    segments: List[Segment]

    def __post_init__(self) -> None:
        if not self.segments:
            raise ValueError(f"segment model {self.name!r} has no segments")
        total = sum(s.mass_fraction for s in self.segments)
        if abs(total - 1.0) > FRACTION_TOL:
            raise ValueError(f"mass fractions sum to 1 violated (sum={total:.9g}) in model {self.name!r}")
        for s in self.segments:
            if s.mass_fraction < 0:
                raise ValueError(f"negative mass fraction for segment {s.name!r}")

    @property
    def markers(self) -> List[str]:
        seen: Dict[str, None] = {}
        for s in self.segments:
            seen.setdefault(s.proximal)
            seen.setdefault(s.distal)
        return list(seen)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SegmentModel":
        segments = []
        for raw in data.get("segments") or []:
            if "mass_fraction" in raw:
                fraction = float(raw["mass_fraction"])
            else:
                fraction = float(raw["mass_percent"]) / 100.0
            segments.append(
                Segment(
                    name=str(raw["name"]),
                    proximal=str(raw["proximal"]),
                    distal=str(raw["distal"]),
                    mass_fraction=fraction,
                    com_ratio=float(raw["com_ratio"]),
                )
            )
        return cls(name=str(data.get("name", "custom")), segments=segments)


def load_segment_model(name_or_path: Optional[str] = None) -> SegmentModel:
    """
    Load a segment model YAML, by name from mocap/models/<name>.yml or by path.
    """
    ref = name_or_path or DEFAULT_MODEL
    path = ref if os.path.exists(ref) else os.path.join(MODELS_DIR, f"{ref}.yml")
    with open(path, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}
    model = SegmentModel.from_dict(data)
    logger.info(f"Loaded segment model: {model.name} ({len(model.segments)} segments)")
    return model


def _marker(markers: MarkerSeries, name: str) -> np.ndarray:
    if name not in markers.positions:
        raise MissingMarkerError(name, 0)
    xyz = markers.positions[name]
    bad = ~np.all(np.isfinite(xyz), axis=1)
    if bad.any():
        raise MissingMarkerError(name, int(np.flatnonzero(bad)[0]))
    return xyz


def rider_com(markers: MarkerSeries, model: SegmentModel) -> np.ndarray:
    """Per-frame rider CoM (F, 3): mass-weighted sum of the segment CoM points."""
    com = np.zeros((markers.n_frames, 3))
    for seg in model.segments:
        p = _marker(markers, seg.proximal)
        d = _marker(markers, seg.distal)
        com += seg.mass_fraction * (p + seg.com_ratio * (d - p))
    return com


def link_length_series(
    markers: MarkerSeries,
    model: Optional[SegmentModel] = None,
    ref: str = "down_tube",
) -> ScalarSeries:
    """
    Rider-bike distance per frame. A recording that already carries the two
    points as markers "com" and "ref" is used directly; otherwise the CoM
    comes from the segment model and the distance is taken to marker `ref`.
    """
    if "com" in markers.positions and "ref" in markers.positions:
        logger.info(f"link length from two-point series ({markers.n_frames} frames)")
        return distance_series(_marker(markers, "com"), _marker(markers, "ref"), markers.sample_rate)
    model = model or load_segment_model()
    logger.info(f"link length from segment model {model.name} to marker {ref}")
    return distance_series(rider_com(markers, model), _marker(markers, ref), markers.sample_rate)
