# workflows/simulate.py
"""
Simulation engine
-----------------
Fixed-step RK4 on the explicit equations of motion, with the pumping input
held constant over each step (zero-order hold).

- rollout: full trajectory with derived signals for a control sequence
- coast_time_to: coasting baseline (u = 0, fixed link length)
- speed_gain / bound_contacts / energy_drift / lap_time_reduction: metrics
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.errors import HorizonExceededError, TargetNotReachedError, TrajectoryEscapeError
from core.logging import logger
from model.dynamics import (
    State,
    SystemParams,
    explicit_rhs,
    kinetic_energy,
    potential_energy,
)
from model.geometry import TrackGeometry, bike_position, bike_velocity, speed
from model.scenario import Bounds, Scenario

DEFAULT_CORRIDOR = 0.05


@dataclass
class Trajectory:
    """
    Sampled solution on the grid t_k = k*h.
    states has shape (N+1, 4) with columns (phi, phidot, l, ldot); controls (N,).
    """

    times: np.ndarray
    states: np.ndarray
    controls: np.ndarray
    bike_pos: np.ndarray = field(repr=False)
    bike_speed: np.ndarray = field(repr=False)
    kinetic: np.ndarray = field(repr=False)
    potential: np.ndarray = field(repr=False)

    @classmethod
    def from_states(
        cls,
        geom: TrackGeometry,
        params: SystemParams,
        times: np.ndarray,
        states: np.ndarray,
        controls: np.ndarray,
    ) -> "Trajectory":
        if len(states) != len(controls) + 1 or len(times) != len(states):
            raise ValueError(
                f"inconsistent lengths: {len(times)} times, {len(states)} states, {len(controls)} controls"
            )
        cols = State(*(states[:, i] for i in range(4)))
        return cls(
            times=times,
            states=states,
            controls=controls,
            bike_pos=bike_position(geom, cols.phi),
            bike_speed=speed(bike_velocity(geom, cols.phi, cols.phidot)),
            kinetic=kinetic_energy(geom, params, cols),
            potential=potential_energy(geom, params, cols),
        )

    @property
    def N(self) -> int:
        return len(self.controls)

    @property
    def phi(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def l(self) -> np.ndarray:
        return self.states[:, 2]

    @property
    def total_energy(self) -> np.ndarray:
        return self.kinetic + self.potential

    @property
    def terminal_phi(self) -> float:
        return float(self.states[-1, 0])

    def state(self, k: int) -> State:
        return State(*(float(v) for v in self.states[k]))


# -------- integrator --------

def _rk4(geom: TrackGeometry, params: SystemParams, x: np.ndarray, u: float, h: float):
    """One RK4 step; returns the new state and the four stage evaluation points."""
    p1 = x
    k1 = explicit_rhs(geom, params, State(*p1), u)
    p2 = x + 0.5 * h * k1
    k2 = explicit_rhs(geom, params, State(*p2), u)
    p3 = x + 0.5 * h * k2
    k3 = explicit_rhs(geom, params, State(*p3), u)
    p4 = x + h * k3
    k4 = explicit_rhs(geom, params, State(*p4), u)
    x_next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return x_next, (p1, p2, p3, p4)


def rk4_step(geom: TrackGeometry, params: SystemParams, s: State, u: float, h: float) -> State:
    x_next, _ = _rk4(geom, params, np.asarray(s, dtype=float), float(u), float(h))
    return State(*(float(v) for v in x_next))


def integrate_states(
    scenario: Scenario,
    controls: np.ndarray,
    *,
    corridor: Optional[float] = None,
    record_stages: bool = False,
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """
    States (N+1, 4) under `controls`. With record_stages the RK4 stage points
    come back as an (N, 4, 4) array [step, stage, component].
    corridor=None disables the escape check.
    """
    geom, params, h = scenario.geom, scenario.params, scenario.h
    n = len(controls)
    states = np.empty((n + 1, 4))
    states[0] = scenario.x0
    stages = np.empty((n, 4, 4)) if record_stages else None
    lo = scenario.bounds.l_min - corridor if corridor is not None else None
    hi = scenario.bounds.l_max + corridor if corridor is not None else None

    x = states[0]
    for k in range(n):
        x, pts = _rk4(geom, params, x, float(controls[k]), h)
        if stages is not None:
            stages[k] = pts
        if lo is not None and not (lo <= x[2] <= hi):
            raise TrajectoryEscapeError(k + 1, float(x[2]), lo, hi)
        states[k + 1] = x
    return states, stages


def rollout(scenario: Scenario, controls: Sequence[float], corridor: Optional[float] = DEFAULT_CORRIDOR) -> Trajectory:
    u = np.asarray(controls, dtype=float).reshape(-1)
    if len(u) != scenario.N:
        raise ValueError(f"expected {scenario.N} controls, got {len(u)}")
    if not np.all(np.isfinite(u)):
        raise ValueError("controls must be finite")
    b = scenario.bounds
    outside = int(np.count_nonzero((u < b.u_min) | (u > b.u_max)))
    if outside:
        logger.warning(f"rollout: {outside} controls outside [{b.u_min}, {b.u_max}]")

    logger.info(f"rollout N={scenario.N} h={scenario.h}")
    states, _ = integrate_states(scenario, u, corridor=corridor)
    return Trajectory.from_states(scenario.geom, scenario.params, scenario.times, states, u)


# -------- coasting baseline --------

def coast_time_to(
    scenario: Scenario,
    phi_target: float,
    l_fixed: float,
    cap: Optional[float] = None,
) -> float:
    """
    Time for the unpumped system (u = 0, l' = 0, l = l_fixed) to reach
    phi_target from x0. The crossing is located by linear interpolation.
    """
    phi0, phidot0 = float(scenario.x0[0]), float(scenario.x0[1])
    if not phidot0 > 0:
        raise ValueError(f"phidot0 > 0 violated (phidot0={phidot0})")
    if not l_fixed > 0:
        raise ValueError(f"l > 0 violated (l={l_fixed})")
    if phi_target <= phi0:
        return 0.0

    h = scenario.h
    cap = 4.0 * scenario.T if cap is None else cap
    max_steps = int(math.ceil(cap / h - 1e-9))
    geom, params = scenario.geom, scenario.params

    x = np.array([phi0, phidot0, l_fixed, 0.0])
    for k in range(max_steps):
        x_next, _ = _rk4(geom, params, x, 0.0, h)
        if x_next[0] >= phi_target:
            frac = (phi_target - x[0]) / (x_next[0] - x[0])
            t = (k + frac) * h
            logger.debug(f"coast: l={l_fixed} reached phi={phi_target:.6g} at t={t:.6g}")
            return float(t)
        x = x_next
    raise HorizonExceededError(phi_target, cap, float(x[0]))


# -------- metrics --------

def value_at_phi(traj: Trajectory, phi: float, values: np.ndarray) -> float:
    """`values` interpolated at the first grid interval where the trajectory crosses phi."""
    p = traj.phi
    if p[0] == phi:
        return float(values[0])
    hits = np.flatnonzero(((p[:-1] - phi) * (p[1:] - phi) <= 0.0) & (p[:-1] != p[1:]))
    if len(hits) == 0:
        raise TargetNotReachedError(phi, float(p[-1]))
    k = hits[0]
    w = (phi - p[k]) / (p[k + 1] - p[k])
    return float(values[k] + w * (values[k + 1] - values[k]))


def speed_gain(traj: Trajectory, phi_a: float, phi_b: float) -> float:
    if phi_a == phi_b:
        # still require the angle to be on the trajectory
        value_at_phi(traj, phi_a, traj.bike_speed)
        return 0.0
    return value_at_phi(traj, phi_b, traj.bike_speed) - value_at_phi(traj, phi_a, traj.bike_speed)


def bound_contacts(traj: Trajectory, bounds: Bounds, tol: float = 1e-3) -> Dict[str, List[Tuple[int, int]]]:
    """
    Maximal runs [first, last] of grid indices where l sits within tol of a
    bound, keyed "l_min" and "l_max".
    """

    def runs(mask: np.ndarray) -> List[Tuple[int, int]]:
        out: List[Tuple[int, int]] = []
        start = None
        for i, on in enumerate(mask):
            if on and start is None:
                start = i
            elif not on and start is not None:
                out.append((start, i - 1))
                start = None
        if start is not None:
            out.append((start, len(mask) - 1))
        return out

    l = traj.l
    return {
        "l_min": runs(np.abs(l - bounds.l_min) <= tol),
        "l_max": runs(np.abs(l - bounds.l_max) <= tol),
    }


def energy_drift(traj: Trajectory) -> float:
    e = traj.total_energy
    if e[0] == 0.0:
        raise ValueError("initial total energy is zero; relative drift undefined")
    return float((e[-1] - e[0]) / abs(e[0]))


def lap_time_reduction(coast_time: float, horizon: float) -> float:
    """Percent of the coasting time saved by covering the same angle in `horizon`."""
    if not coast_time > 0:
        raise ValueError(f"coast_time > 0 violated (coast_time={coast_time})")
    return 100.0 * (coast_time - horizon) / coast_time
