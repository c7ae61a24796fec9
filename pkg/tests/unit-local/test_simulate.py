# tests/unit-local/test_simulate.py
import logging
import math

import numpy as np
import pytest

from core.errors import HorizonExceededError, TargetNotReachedError, TrajectoryEscapeError
from model.dynamics import State, kinetic_energy, potential_energy
from model.geometry import bike_position, bike_velocity, speed
from workflows.simulate import (
    Trajectory,
    bound_contacts,
    coast_time_to,
    energy_drift,
    lap_time_reduction,
    rk4_step,
    rollout,
    speed_gain,
)


# ----------------------------
# Helpers
# ----------------------------

def zero_rollout(scenario):
    return rollout(scenario, np.zeros(scenario.N))


def synthetic_trajectory(scenario, l_values):
    n = len(l_values)
    states = np.zeros((n, 4))
    states[:, 0] = np.linspace(0.0, 1.0, n)
    states[:, 1] = 1.0
    states[:, 2] = l_values
    return Trajectory.from_states(
        scenario.geom, scenario.params, np.arange(n) * scenario.h, states, np.zeros(n - 1)
    )


# ----------------------------
# rk4_step
# ----------------------------

def test_equilibrium_is_fixed_point(geom, params, scenario):
    s = State(0.0, 0.0, scenario.x0[2], 0.0)
    out = rk4_step(geom, params, s, 0.0, 0.01)
    assert out == pytest.approx(tuple(s), abs=1e-14)


def test_input_moves_link_rate_linearly(geom, params, scenario):
    b = scenario.bounds
    s = State(0.0, 0.0, scenario.x0[2], 0.0)
    lo = rk4_step(geom, params, s, b.u_min, 0.01)
    hi = rk4_step(geom, params, s, b.u_max, 0.01)
    assert hi.ldot - lo.ldot == pytest.approx((b.u_max - b.u_min) * 0.01, rel=1e-12)


def test_rk4_convergence_order(geom, params):
    start = State(0.0, math.pi / 3, 0.4368, 0.1)
    horizon = 1.6

    def run(h):
        s = start
        for _ in range(int(round(horizon / h))):
            s = rk4_step(geom, params, s, 0.0, h)
        return np.array(s)

    reference = run(1e-4)
    steps = np.array([0.02, 0.01, 0.005])
    errors = np.array([np.max(np.abs(run(h) - reference)) for h in steps])
    order = np.polyfit(np.log(steps), np.log(errors), 1)[0]
    assert order >= 3.8


# ----------------------------
# rollout
# ----------------------------

def test_zero_controls_keep_link_length(scenario):
    traj = zero_rollout(scenario)
    assert np.all(traj.l == scenario.x0[2])
    assert len(traj.states) == scenario.N + 1
    assert len(traj.controls) == scenario.N


def test_energy_conserved_without_pumping(scenario):
    traj = zero_rollout(scenario)
    assert abs(energy_drift(traj)) < 1e-6


def test_time_grid_is_index_multiplied(scenario):
    traj = zero_rollout(scenario)
    k = np.arange(scenario.N + 1)
    assert np.all(traj.times == k * scenario.h)
    assert abs(traj.times[-1] - scenario.T) < 1e-9


def test_derived_signals_recomputable(scenario):
    traj = zero_rollout(scenario)
    g, p = scenario.geom, scenario.params
    for k in (0, 17, 250, scenario.N):
        s = traj.state(k)
        assert traj.kinetic[k] == pytest.approx(kinetic_energy(g, p, s), rel=1e-12)
        assert traj.potential[k] == pytest.approx(potential_energy(g, p, s), rel=1e-12, abs=1e-12)
        assert traj.bike_speed[k] == pytest.approx(speed(bike_velocity(g, s.phi, s.phidot)), rel=1e-12)
        np.testing.assert_allclose(traj.bike_pos[k], bike_position(g, s.phi), atol=1e-12)


def test_rollout_is_deterministic(scenario):
    # zero-mean in l' too, so l stays within 0.04 of its start
    u = 0.5 * np.cos(5.0 * scenario.times[:-1])
    a, b = rollout(scenario, u), rollout(scenario, u)
    assert np.ptp(a.states[:, 2]) < 0.05
    assert np.array_equal(a.states, b.states)


def test_rollout_rejects_wrong_length(scenario):
    with pytest.raises(ValueError):
        rollout(scenario, np.zeros(scenario.N - 1))


def test_rollout_warns_on_out_of_bounds_controls(scenario, caplog):
    u = np.zeros(scenario.N)
    u[3] = scenario.bounds.u_max + 1.0
    with caplog.at_level(logging.WARNING, logger="pumptrack"):
        rollout(scenario, u, corridor=None)
    assert any("outside" in r.getMessage() for r in caplog.records)


def test_rollout_aborts_when_link_escapes(scenario):
    u = np.full(scenario.N, scenario.bounds.u_max)
    with pytest.raises(TrajectoryEscapeError) as exc:
        rollout(scenario, u)
    assert exc.value.l > scenario.bounds.l_max + 0.05


# ----------------------------
# coast_time_to
# ----------------------------

def test_coast_ordering_longest_link_fastest(scenario):
    b = scenario.bounds
    target = 2 * math.pi
    t_max = coast_time_to(scenario, target, b.l_max)
    t_mid = coast_time_to(scenario, target, b.l_mid)
    t_min = coast_time_to(scenario, target, b.l_min)
    assert t_max < t_mid < t_min


def test_coast_target_at_start_is_zero(scenario):
    assert coast_time_to(scenario, scenario.x0[0], scenario.bounds.l_max) == 0.0


def test_coast_small_step_is_kinematic(scenario):
    eps = 1e-4
    t = coast_time_to(scenario, scenario.x0[0] + eps, scenario.bounds.l_max)
    assert t == pytest.approx(eps / scenario.x0[1], rel=1e-3)


def test_coast_horizon_exceeded(scenario):
    with pytest.raises(HorizonExceededError):
        coast_time_to(scenario, 2 * math.pi, scenario.bounds.l_max, cap=0.1)


# ----------------------------
# metrics
# ----------------------------

def test_speed_gain_zero_without_pumping(scenario):
    traj = zero_rollout(scenario)
    assert abs(speed_gain(traj, 0.0, math.pi)) < 0.02


def test_speed_gain_same_angle_is_zero(scenario):
    traj = zero_rollout(scenario)
    assert speed_gain(traj, 1.0, 1.0) == 0.0


def test_speed_gain_unreached_angle(scenario):
    traj = zero_rollout(scenario)
    with pytest.raises(TargetNotReachedError):
        speed_gain(traj, 0.0, 100.0)


def test_bound_contacts_runs(scenario):
    b = scenario.bounds
    l = [b.l_max, b.l_max, b.l_mid, b.l_min, b.l_min + 5e-4, b.l_min, b.l_mid, b.l_max]
    contacts = bound_contacts(synthetic_trajectory(scenario, l), b, tol=1e-3)
    assert contacts["l_max"] == [(0, 1), (7, 7)]
    assert contacts["l_min"] == [(3, 5)]


def test_energy_drift_sign(scenario):
    traj = synthetic_trajectory(scenario, [0.3, 0.3, 0.5])
    e = traj.total_energy
    assert energy_drift(traj) == pytest.approx((e[-1] - e[0]) / abs(e[0]))


def test_lap_time_reduction():
    assert lap_time_reduction(6.13, 5.0) == pytest.approx(18.43, abs=5e-3)
    with pytest.raises(ValueError):
        lap_time_reduction(0.0, 5.0)
