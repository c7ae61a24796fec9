# tools/csv_io.py
"""
CSV and key-value report I/O.
All numbers are written with 15 significant digits; reads are bit-exact
(cells are parsed as text, then with float()).
"""
from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, Iterable, Mapping, Sequence, Union

import numpy as np
import pandas as pd

from core.errors import SeriesError
from core.logging import logger

PathLike = Union[str, Path]
FLOAT_FORMAT = "%.15g"

TRAJECTORY_COLUMNS = ["t", "phi", "phidot", "l", "ldot", "u", "xb1", "xb2", "xb3", "vb_mag", "K", "U"]


def fmt15(x: Any) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".15g")
    return str(x)


def read_numeric_csv(path: PathLike, columns: Sequence[str]) -> pd.DataFrame:
    """
    Read a headered CSV and require the given numeric columns.
    Raises SeriesError (with the 1-based file line when known) on empty files,
    missing columns or unparsable / non-finite cells.
    """
    path = Path(path)
    try:
        df = pd.read_csv(path, skipinitialspace=True, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        raise SeriesError(f"{path}: empty file") from None
    except FileNotFoundError:
        raise SeriesError(f"{path}: no such file") from None
    except pd.errors.ParserError as e:
        raise SeriesError(f"{path}: {e}") from None

    df.columns = [str(c).strip() for c in df.columns]
    missing = [c for c in columns if c not in df.columns]
    if missing:
        raise SeriesError(f"{path}: missing column(s) {', '.join(missing)}", line=1)
    if df.empty:
        raise SeriesError(f"{path}: no data rows")

    out = pd.DataFrame(index=df.index)
    for c in columns:
        raw = df[c].astype(str).str.strip()
        values = pd.to_numeric(raw, errors="coerce")
        bad = ~np.isfinite(values.to_numpy(dtype=float))
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            # header is line 1
            raise SeriesError(f"{path}: column {c}: cannot parse {raw.iloc[i]!r}", line=i + 2)
        out[c] = [float(v) for v in raw]
    return out


def read_controls_csv(path: PathLike) -> np.ndarray:
    return read_numeric_csv(path, ["u"])["u"].to_numpy(dtype=float)


def write_controls_csv(path: PathLike, times: Iterable[float], controls: Iterable[float]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df = pd.DataFrame({"t": list(times), "u": list(controls)})
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.debug(f"wrote {len(df)} controls to {path}")
    return path


def trajectory_frame(traj) -> pd.DataFrame:
    """One row per grid point; u repeats the held value, last row repeats the final control."""
    u = np.append(traj.controls, traj.controls[-1]) if len(traj.controls) else np.zeros(len(traj.times))
    return pd.DataFrame(
        {
            "t": traj.times,
            "phi": traj.states[:, 0],
            "phidot": traj.states[:, 1],
            "l": traj.states[:, 2],
            "ldot": traj.states[:, 3],
            "u": u,
            "xb1": traj.bike_pos[:, 0],
            "xb2": traj.bike_pos[:, 1],
            "xb3": traj.bike_pos[:, 2],
            "vb_mag": traj.bike_speed,
            "K": traj.kinetic,
            "U": traj.potential,
        },
        columns=TRAJECTORY_COLUMNS,
    )


def write_trajectory_csv(path: PathLike, traj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    trajectory_frame(traj).to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.debug(f"wrote trajectory ({len(traj.times)} rows) to {path}")
    return path


def format_report(values: Mapping[str, Any]) -> str:
    """`key = value` lines, readable back as scenario overrides."""
    return "".join(f"{k} = {fmt15(v)}\n" for k, v in values.items())


def write_report(path: PathLike, values: Mapping[str, Any]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_report(values), encoding="utf-8")
    return path


def read_report(path: PathLike) -> Dict[str, str]:
    out: Dict[str, str] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#") or "=" not in line:
            continue
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out
