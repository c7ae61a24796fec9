# tests/unit-local/test_ocp.py
import numpy as np
import pytest
from scipy.optimize import OptimizeResult

from workflows.ocp import (
    OcpProblem,
    SolverOptions,
    gradient,
    objective,
    solve,
    stage_jacobians,
)
from workflows.simulate import rollout

ZERO_Q = (0.0, 0.0, 0.0, 0.0)


# ----------------------------
# Helpers
# ----------------------------

def central_difference(scenario, u, step=1e-6):
    g = np.zeros_like(u)
    for k in range(len(u)):
        e = np.zeros_like(u)
        e[k] = step
        g[k] = (objective(scenario, u + e) - objective(scenario, u - e)) / (2 * step)
    return g


@pytest.fixture(scope="module")
def short_scenario(scenario):
    # N = 50
    return scenario.with_updates(T=0.5)


# ----------------------------
# objective
# ----------------------------

def test_objective_zero_weights_zero_controls(scenario):
    sc = scenario.with_updates(q=ZERO_Q)
    assert objective(sc, np.zeros(sc.N)) == 0.0


def test_objective_negative_when_coasting_at_l_max(scenario):
    b = scenario.bounds
    sc = scenario.with_updates(x0=(scenario.x0[0], scenario.x0[1], b.l_max, 0.0))
    assert objective(sc, np.zeros(sc.N)) < 0.0


def test_objective_shift_by_constant_state_term(scenario):
    # zero controls keep l = l0, so a weight w on l adds w * l0 * T
    w = 3.0
    base = scenario.with_updates(q=ZERO_Q)
    shifted = scenario.with_updates(q=(0.0, 0.0, w, 0.0))
    u = np.zeros(scenario.N)
    diff = objective(shifted, u) - objective(base, u)
    assert diff == pytest.approx(w * scenario.x0[2] * scenario.T, rel=1e-12)


def test_objective_matches_rollout_quadrature(short_scenario):
    u = np.linspace(-2.0, 2.0, short_scenario.N)
    traj = rollout(short_scenario, u, corridor=None)
    q = np.asarray(short_scenario.q)
    expected = short_scenario.h * (np.sum(traj.states[:-1] @ q) + u @ u)
    assert objective(short_scenario, u) == pytest.approx(expected, rel=1e-12)


def test_objective_rejects_wrong_length(scenario):
    with pytest.raises(ValueError):
        objective(scenario, np.zeros(3))


# ----------------------------
# gradient
# ----------------------------

def test_adjoint_gradient_matches_central_differences(short_scenario):
    rng = np.random.default_rng(7)
    u = rng.uniform(-5.0, 5.0, short_scenario.N)
    g = gradient(short_scenario, u)
    fd = central_difference(short_scenario, u)
    assert np.linalg.norm(g - fd) / np.linalg.norm(fd) < 1e-4


def test_forward_difference_mode_agrees(short_scenario):
    rng = np.random.default_rng(11)
    u = rng.uniform(-5.0, 5.0, short_scenario.N)
    ga = gradient(short_scenario, u, mode="adjoint")
    gf = gradient(short_scenario, u, mode="fd")
    assert np.linalg.norm(ga - gf) / np.linalg.norm(ga) < 1e-4


def test_input_penalty_gradient(short_scenario):
    sc = short_scenario.with_updates(q=ZERO_Q)
    u = np.linspace(-3.0, 3.0, sc.N)
    np.testing.assert_allclose(gradient(sc, u), 2.0 * u * sc.h, rtol=1e-12, atol=1e-15)


def test_zero_gradient_at_rest_without_weights(short_scenario):
    sc = short_scenario.with_updates(q=ZERO_Q)
    assert np.all(gradient(sc, np.zeros(sc.N)) == 0.0)


def test_unknown_gradient_mode(short_scenario):
    with pytest.raises(ValueError):
        gradient(short_scenario, np.zeros(short_scenario.N), mode="bogus")


def test_stage_jacobians_chain_rows(geom, params):
    pts = np.array([[0.3, 1.0, 0.4, 0.2], [2.0, -0.5, 0.5, -1.0]])
    A, B = stage_jacobians(geom, params, pts, np.array([1.0, -2.0]))
    assert A.shape == (2, 4, 4) and B.shape == (2, 4)
    np.testing.assert_array_equal(A[:, 0], [[0, 1, 0, 0]] * 2)
    np.testing.assert_array_equal(A[:, 2], [[0, 0, 0, 1]] * 2)
    np.testing.assert_array_equal(A[:, 3], [[0, 0, 0, 0]] * 2)
    np.testing.assert_array_equal(B[:, 3], [1, 1])


# ----------------------------
# SolverOptions
# ----------------------------

@pytest.mark.parametrize(
    "kwargs",
    [{"grad_mode": "newton"}, {"max_iters": 0}, {"max_outer": 0}, {"feas_tol": 0.0}],
)
def test_solver_options_validation(kwargs):
    with pytest.raises(ValueError):
        SolverOptions(**kwargs)


# ----------------------------
# solve
# ----------------------------

def test_single_step_without_weights_stays_at_rest(scenario):
    sc = scenario.with_updates(T=scenario.h, q=ZERO_Q)
    sol = solve(OcpProblem(sc))
    assert sol.converged
    assert np.all(sol.controls == 0.0)
    assert sol.objective == 0.0


def test_zero_weights_full_horizon_zero_controls(scenario):
    sc = scenario.with_updates(q=ZERO_Q)
    sol = solve(OcpProblem(sc), SolverOptions(max_iters=20, max_outer=2))
    assert np.max(np.abs(sol.controls)) < 1e-6


def test_short_horizon_solve_improves_and_stays_feasible(scenario):
    sc = scenario.with_updates(T=1.0)
    opts = SolverOptions(max_iters=150, max_outer=12)
    sol = solve(OcpProblem(sc), opts)
    b = sc.bounds

    assert sol.converged
    assert sol.constraint_violation <= opts.feas_tol
    assert sol.objective < sol.baseline_objective
    assert np.all(sol.controls >= b.u_min) and np.all(sol.controls <= b.u_max)
    assert np.all(sol.trajectory.l <= b.l_max + opts.feas_tol)
    assert np.all(sol.trajectory.l >= b.l_min - opts.feas_tol)
    assert sol.objective == pytest.approx(objective(sc, sol.controls), rel=1e-12)

    for trace in sol.merit_history:
        steps = np.diff(trace)
        assert np.all(steps <= 1e-9 * np.maximum(1.0, np.abs(trace[:-1])))


def test_default_options_two_second_solve_beats_coasting(scenario):
    sc = scenario.with_updates(T=2.0)
    opts = SolverOptions()
    sol = solve(OcpProblem(sc), opts)
    assert sol.iterations > 0
    assert sol.objective < sol.baseline_objective
    assert sol.constraint_violation <= opts.feas_tol
    assert np.max(np.abs(sol.controls)) > 0.0


def test_failed_line_search_is_not_converged(scenario, monkeypatch):
    def no_step(fun, x0, **kwargs):
        value, grad = fun(x0)
        return OptimizeResult(
            x=np.array(x0, copy=True), fun=value, jac=grad, nit=0, status=2, success=False,
            message="ABNORMAL_TERMINATION_IN_LNSRCH",
        )

    monkeypatch.setattr("workflows.ocp.minimize", no_step)
    sc = scenario.with_updates(T=0.2)
    sol = solve(OcpProblem(sc), SolverOptions(max_outer=3))
    assert not sol.converged
    assert sol.outer_iterations == 3
    assert np.all(sol.controls == 0.0)
    assert sol.objective == sol.baseline_objective


def test_disabled_constraint_kept_on_problem(scenario):
    sc = scenario.with_updates(T=scenario.h, q=ZERO_Q)
    problem = OcpProblem(sc)
    problem.constraints[0].enabled = False
    before = list(problem.constraints)
    sol = solve(problem)
    assert sol.converged
    assert problem.constraints == before
    assert problem.constraints[0].enabled is False
