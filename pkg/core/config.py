# core/config.py
"""
Process settings (environment / .env) and scenario files.

Scenario files use the dotenv grammar: one `key = value` per line, `#`
comments; q and x0 take four comma-separated numbers. Unset keys keep the
defaults below, which are the published pump-track scenario.
"""
from __future__ import annotations

import io
import math
import os
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Tuple, Union

from dotenv import dotenv_values, load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from model.dynamics import SystemParams
from model.geometry import TrackGeometry
from model.scenario import Bounds, Scenario
from workflows.ocp import SolverOptions

load_dotenv()


class Config:
    def __init__(self):
        self.scenario_path = os.getenv("PUMPTRACK_CONFIG", "")
        self.out_dir = os.getenv("PUMPTRACK_OUT_DIR", "out")
        self.log_level = os.getenv("PUMPTRACK_LOG_LEVEL", "INFO").upper()


# bounds measured on the shipped rider recording (data/fixtures)
DEFAULT_L_MIN = 0.278028432325324
DEFAULT_L_MAX = 0.595589962783839
DEFAULT_U_MIN = -8.66483516272901
DEFAULT_U_MAX = 30.1478116762068

Vec4 = Tuple[float, float, float, float]

VECTOR_KEYS = ("q", "x0")
INT_KEYS = ("max_iters", "max_outer")
STR_KEYS = ("grad_mode",)
KEY_ORDER = (
    "R", "r", "lambda", "m_b", "m_r", "g_grav",
    "T", "h", "q", "x0",
    "l_min", "l_max", "u_min", "u_max",
    "max_iters", "max_outer", "feas_tol", "grad_mode",
)


def _first_message(e: ValidationError) -> str:
    msg = e.errors()[0]["msg"]
    return msg.removeprefix("Value error, ")


class ScenarioConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True, frozen=True)

    R: float = 3.0
    r: float = 1.0
    lam: float = Field(3.0, alias="lambda")
    m_b: float = 15.0
    m_r: float = 80.0
    g_grav: float = 9.8067
    T: float = 5.0
    h: float = 0.01
    q: Vec4 = (-65.0, -65.0, 0.0, 0.0)
    # None: (0, pi/3, midpoint of the l bounds, 0)
    x0: Optional[Vec4] = None
    l_min: float = DEFAULT_L_MIN
    l_max: float = DEFAULT_L_MAX
    u_min: float = DEFAULT_U_MIN
    u_max: float = DEFAULT_U_MAX
    max_iters: int = 300
    max_outer: int = 12
    feas_tol: float = 1e-4
    grad_mode: Literal["adjoint", "fd"] = "adjoint"

    @model_validator(mode="after")
    def _check(self) -> "ScenarioConfig":
        try:
            self.to_scenario()
        except ValidationError as e:
            raise ValueError(_first_message(e)) from None
        self.solver_options()
        return self

    @property
    def initial_state(self) -> Vec4:
        if self.x0 is not None:
            return self.x0
        return (0.0, math.pi / 3.0, 0.5 * (self.l_min + self.l_max), 0.0)

    def to_scenario(self) -> Scenario:
        return Scenario(
            geom=TrackGeometry(R=self.R, r=self.r, lam=self.lam),
            params=SystemParams(m_b=self.m_b, m_r=self.m_r, g_grav=self.g_grav),
            T=self.T,
            h=self.h,
            x0=self.initial_state,
            bounds=Bounds(l_min=self.l_min, l_max=self.l_max, u_min=self.u_min, u_max=self.u_max),
            q=self.q,
        )

    def solver_options(self) -> SolverOptions:
        return SolverOptions(
            max_iters=self.max_iters,
            max_outer=self.max_outer,
            feas_tol=self.feas_tol,
            grad_mode=self.grad_mode,
        )

    def as_values(self) -> Dict[str, Any]:
        """Every documented key with its effective value (x0 resolved)."""
        data = self.model_dump(by_alias=True)
        data["x0"] = self.initial_state
        return {k: data[k] for k in KEY_ORDER}

    def with_overrides(self, **values: Any) -> "ScenarioConfig":
        data = self.model_dump(by_alias=True)
        data.update(values)
        return build_scenario_config(data)


def build_scenario_config(values: Dict[str, Any]) -> ScenarioConfig:
    """ScenarioConfig from a key mapping; any invariant violation is a ValueError naming it."""
    try:
        return ScenarioConfig(**values)
    except ValidationError as e:
        err = e.errors()[0]
        where = ".".join(str(p) for p in err.get("loc", ()))
        msg = _first_message(e)
        raise ValueError(f"{where}: {msg}" if where else msg) from None


def _parse_value(key: str, raw: Optional[str]) -> Any:
    if raw is None or raw.strip() == "":
        raise ValueError(f"{key}: missing value")
    text = raw.strip()
    try:
        if key in VECTOR_KEYS:
            parts = [p.strip() for p in text.split(",")]
            if len(parts) != 4:
                raise ValueError
            return tuple(float(p) for p in parts)
        if key in INT_KEYS:
            return int(text)
        if key in STR_KEYS:
            return text
        return float(text)
    except ValueError:
        raise ValueError(f"{key}: cannot parse {raw!r}") from None


def parse_scenario_text(text: str) -> ScenarioConfig:
    raw = dotenv_values(stream=io.StringIO(text), interpolate=False)
    unknown = [k for k in raw if k not in KEY_ORDER]
    if unknown:
        raise ValueError(f"unknown key(s): {', '.join(unknown)}")
    return build_scenario_config({k: _parse_value(k, v) for k, v in raw.items()})


def load_scenario_config(path: Optional[Union[str, Path]] = None) -> ScenarioConfig:
    """Scenario from a file; no path (and no PUMPTRACK_CONFIG) gives the defaults."""
    path = path or Config().scenario_path
    if not path:
        return ScenarioConfig()
    return parse_scenario_text(Path(path).read_text(encoding="utf-8"))


def _dump_value(v: Any) -> str:
    if isinstance(v, tuple):
        return ", ".join(repr(float(x)) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def dump_scenario_config(cfg: ScenarioConfig) -> str:
    """Exact text form: floats via repr, so parse(dump(cfg)) == cfg."""
    return "".join(f"{k} = {_dump_value(v)}\n" for k, v in cfg.as_values().items())
