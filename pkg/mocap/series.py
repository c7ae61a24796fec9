# mocap/series.py
"""
Motion-capture time series: reading, rider-bike distance, its acceleration
and the admissible link bounds derived from them.

CSV formats (header row required):
  scalar series   t,<column>                       e.g. t,l  or  t,a
  marker frames   t,<marker>_x,<marker>_y,<marker>_z,...
                  (the two-point form t,com_x,...,ref_z is the same layout)
Empty marker cells mean the marker was not seen in that frame.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np
import pandas as pd
from scipy.ndimage import uniform_filter1d

from core.errors import SeriesError
from model.scenario import Bounds
from tools.csv_io import read_numeric_csv

DEFAULT_RATE = 100.0
UNIFORM_TOL = 1e-6

PathLike = Union[str, Path]


@dataclass
class ScalarSeries:
    values: np.ndarray
    sample_rate: float = DEFAULT_RATE
    t0: float = 0.0

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float).reshape(-1)
        if not self.sample_rate > 0:
            raise SeriesError(f"sample rate must be positive, got {self.sample_rate}")
        if not np.all(np.isfinite(self.values)):
            raise SeriesError("series contains non-finite values")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def dt(self) -> float:
        return 1.0 / self.sample_rate

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(len(self.values)) * self.dt


@dataclass
class MarkerSeries:
    sample_rate: float = DEFAULT_RATE
    positions: Dict[str, np.ndarray] = field(default_factory=dict)  # marker -> (F, 3)

    @property
    def n_frames(self) -> int:
        return len(next(iter(self.positions.values()))) if self.positions else 0

    def __getitem__(self, marker: str) -> np.ndarray:
        return self.positions[marker]


def _rate_from_times(t: np.ndarray, path: PathLike) -> float:
    if len(t) < 2:
        return DEFAULT_RATE
    dt = np.diff(t)
    if np.any(dt <= 0):
        i = int(np.flatnonzero(dt <= 0)[0])
        raise SeriesError(f"{path}: timestamps not increasing", line=i + 3)
    step = float(np.median(dt))
    off = np.abs(dt - step) > UNIFORM_TOL * max(1.0, step) + 1e-9
    if off.any():
        i = int(np.flatnonzero(off)[0])
        raise SeriesError(f"{path}: non-uniform sampling (dt={dt[i]:.6g}, expected {step:.6g})", line=i + 3)
    return 1.0 / step


def read_scalar_series(path: PathLike, column: str) -> ScalarSeries:
    df = read_numeric_csv(path, ["t", column])
    t = df["t"].to_numpy(dtype=float)
    return ScalarSeries(df[column].to_numpy(dtype=float), sample_rate=_rate_from_times(t, path), t0=float(t[0]))


def read_marker_csv(path: PathLike) -> MarkerSeries:
    path = Path(path)
    try:
        df = pd.read_csv(path, skipinitialspace=True, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        raise SeriesError(f"{path}: empty file") from None
    df.columns = [str(c).strip() for c in df.columns]
    if "t" not in df.columns:
        raise SeriesError(f"{path}: missing column t", line=1)
    if df.empty:
        raise SeriesError(f"{path}: no data rows")

    def parse(col: str, allow_missing: bool) -> np.ndarray:
        out = np.empty(len(df))
        for i, cell in enumerate(df[col].astype(str).str.strip()):
            if cell == "" and allow_missing:
                out[i] = np.nan
                continue
            try:
                out[i] = float(cell)
            except ValueError:
                raise SeriesError(f"{path}: column {col}: cannot parse {cell!r}", line=i + 2) from None
        return out

    t = parse("t", allow_missing=False)
    names = [c[:-2] for c in df.columns if c.endswith("_x")]
    positions: Dict[str, np.ndarray] = {}
    for name in names:
        cols = [f"{name}_{axis}" for axis in "xyz"]
        if any(c not in df.columns for c in cols):
            raise SeriesError(f"{path}: marker {name} needs {', '.join(cols)}", line=1)
        positions[name] = np.stack([parse(c, allow_missing=True) for c in cols], axis=1)
    return MarkerSeries(sample_rate=_rate_from_times(t, path), positions=positions)


# -------- transforms --------

def distance_series(com: np.ndarray, ref: np.ndarray, sample_rate: float = DEFAULT_RATE) -> ScalarSeries:
    com = np.asarray(com, dtype=float)
    ref = np.asarray(ref, dtype=float)
    if com.shape != ref.shape:
        raise SeriesError(f"length mismatch: {com.shape} vs {ref.shape}")
    return ScalarSeries(np.linalg.norm(com - ref, axis=-1), sample_rate=sample_rate)


def smooth(series: ScalarSeries, window: int) -> ScalarSeries:
    """Centred moving average; edges repeat the end samples."""
    if window < 1:
        raise ValueError(f"window >= 1 required, got {window}")
    if window == 1:
        return series
    return ScalarSeries(
        uniform_filter1d(series.values, size=window, mode="nearest"),
        sample_rate=series.sample_rate,
        t0=series.t0,
    )


def accel_series(l: ScalarSeries, smooth_window: Optional[int] = None) -> ScalarSeries:
    """
    Second derivative of l: central 3-point stencil inside, one-sided
    second-order 4-point stencil at both ends (3 samples: ends copy the centre).
    """
    if smooth_window:
        l = smooth(l, smooth_window)
    x = l.values
    n = len(x)
    if n < 3:
        raise SeriesError(f"acceleration needs at least 3 samples, got {n}")
    inv = l.sample_rate * l.sample_rate
    a = np.empty(n)
    a[1:-1] = (x[2:] - 2.0 * x[1:-1] + x[:-2]) * inv
    if n >= 4:
        # 2x0 - 5x1 + 4x2 - x3 in difference form: exact zero on constants
        a[0] = (2.0 * (x[0] - x[1]) - 3.0 * (x[1] - x[2]) + (x[2] - x[3])) * inv
        a[-1] = (2.0 * (x[-1] - x[-2]) - 3.0 * (x[-2] - x[-3]) + (x[-3] - x[-4])) * inv
    else:
        a[0] = a[-1] = a[1]
    return ScalarSeries(a, sample_rate=l.sample_rate, t0=l.t0)


def extract_bounds(l: ScalarSeries, a: ScalarSeries) -> Bounds:
    if len(l) == 0 or len(a) == 0:
        raise SeriesError("bounds need non-empty l and a series")
    return Bounds(
        l_min=float(np.min(l.values)),
        l_max=float(np.max(l.values)),
        u_min=float(np.min(a.values)),
        u_max=float(np.max(a.values)),
    )
