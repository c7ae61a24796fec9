# workflows/ocp.py
"""
Pumping optimizer
-----------------
Single shooting over the piecewise-constant control sequence u_0..u_{N-1}:

    minimize   sum_k (q . x_k + u_k^2) * h          (left rectangle rule)
    subject to u_min <= u_k <= u_max                (box, handled by L-BFGS-B)
               l_min <= l_k <= l_max, k = 1..N      (augmented Lagrangian)

The inner problem is scipy's L-BFGS-B on the augmented merit; the outer loop
updates multipliers and penalty in the LANCELOT manner. Gradients come from
the discrete adjoint of the RK4 rollout, with stage Jacobians of the explicit
dynamics taken by complex step, or from forward differences (grad_mode="fd").
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import approx_fprime, minimize

from constraints import BaseConstraint, default_path_constraints
from core.logging import logger
from model.dynamics import SystemParams, phi_acceleration
from model.geometry import TrackGeometry
from model.scenario import Scenario
from workflows.simulate import Trajectory, integrate_states

GradMode = Literal["adjoint", "fd"]

COMPLEX_STEP = 1e-20
FD_STEP = 1e-7


@dataclass
class SolverOptions:
    max_iters: int = 300          # L-BFGS-B iterations per outer loop
    max_outer: int = 12
    feas_tol: float = 1e-4        # [m] on the link-length bounds
    grad_mode: GradMode = "adjoint"
    penalty0: float = 1.0
    penalty_growth: float = 10.0
    # violation must shrink by this factor or the penalty grows
    violation_decrease: float = 0.25

    def __post_init__(self) -> None:
        if self.grad_mode not in ("adjoint", "fd"):
            raise ValueError(f"grad_mode must be 'adjoint' or 'fd', got {self.grad_mode!r}")
        if self.max_iters < 1 or self.max_outer < 1:
            raise ValueError("max_iters >= 1 and max_outer >= 1 required")
        if not self.feas_tol > 0:
            raise ValueError(f"feas_tol > 0 violated (feas_tol={self.feas_tol})")


@dataclass
class OcpProblem:
    scenario: Scenario
    constraints: List[BaseConstraint] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.constraints:
            self.constraints = default_path_constraints(self.scenario.bounds)

    @property
    def N(self) -> int:
        return self.scenario.N

    @property
    def control_bounds(self) -> List[Tuple[float, float]]:
        b = self.scenario.bounds
        return [(b.u_min, b.u_max)] * self.N


@dataclass
class OcpSolution:
    controls: np.ndarray
    trajectory: Trajectory
    objective: float
    iterations: int
    converged: bool
    constraint_violation: float
    baseline_objective: float
    outer_iterations: int = 0
    merit_history: List[List[float]] = field(default_factory=list)
    grad_mode: str = "adjoint"
    wall_time: float = 0.0


# -------- objective and gradient --------

def _running_cost(scenario: Scenario, states: np.ndarray, u: np.ndarray) -> float:
    q = np.asarray(scenario.q, dtype=float)
    return float(scenario.h * (np.sum(states[:-1] @ q) + u @ u))


def _as_controls(scenario: Scenario, controls: Sequence[float]) -> np.ndarray:
    u = np.asarray(controls, dtype=float).reshape(-1)
    if len(u) != scenario.N:
        raise ValueError(f"expected {scenario.N} controls, got {len(u)}")
    return u


def objective(scenario: Scenario, controls: Sequence[float], corridor: Optional[float] = None) -> float:
    u = _as_controls(scenario, controls)
    states, _ = integrate_states(scenario, u, corridor=corridor)
    return _running_cost(scenario, states, u)


def _rhs_batch(geom: TrackGeometry, params: SystemParams, X: np.ndarray, u: np.ndarray) -> np.ndarray:
    phi, phidot, l, ldot = X[:, 0], X[:, 1], X[:, 2], X[:, 3]
    acc = phi_acceleration(geom, params, phi, phidot, l, ldot, u)
    return np.stack(np.broadcast_arrays(phidot, acc, ldot, u), axis=1)


def stage_jacobians(geom: TrackGeometry, params: SystemParams, points: np.ndarray, u: np.ndarray):
    """
    df/dx (M, 4, 4) and df/du (M, 4) of the explicit dynamics at M points,
    by complex step.
    """
    base = points.astype(complex)
    uc = u.astype(complex)
    A = np.empty(points.shape + (4,))
    for j in range(4):
        X = base.copy()
        X[:, j] += 1j * COMPLEX_STEP
        A[:, :, j] = _rhs_batch(geom, params, X, uc).imag / COMPLEX_STEP
    B = _rhs_batch(geom, params, base, uc + 1j * COMPLEX_STEP).imag / COMPLEX_STEP
    return A, B


def _adjoint(
    scenario: Scenario,
    u: np.ndarray,
    stages: np.ndarray,
    state_grad: np.ndarray,
) -> np.ndarray:
    """
    Gradient of a cost C(x_0..x_N) with dC/dx_k = state_grad[k] through the
    RK4 recursion. Direct control terms are not included.
    """
    n, h = len(u), scenario.h
    A, B = stage_jacobians(scenario.geom, scenario.params, stages.reshape(-1, 4), np.repeat(u, 4))
    A = A.reshape(n, 4, 4, 4)
    B = B.reshape(n, 4, 4)

    grad = np.zeros(n)
    lam = state_grad[n].copy()
    for k in range(n - 1, -1, -1):
        Ak, Bk = A[k], B[k]
        a4 = (h / 6.0) * lam
        a3 = (h / 3.0) * lam
        a2 = (h / 3.0) * lam
        a1 = (h / 6.0) * lam
        xbar = lam.copy()
        ubar = Bk[3] @ a4

        g = Ak[3].T @ a4
        xbar += g
        a3 = a3 + h * g

        g = Ak[2].T @ a3
        xbar += g
        a2 = a2 + 0.5 * h * g
        ubar += Bk[2] @ a3

        g = Ak[1].T @ a2
        xbar += g
        a1 = a1 + 0.5 * h * g
        ubar += Bk[1] @ a2

        xbar += Ak[0].T @ a1
        ubar += Bk[0] @ a1

        grad[k] = ubar
        lam = xbar + state_grad[k]
    return grad


def gradient(scenario: Scenario, controls: Sequence[float], mode: GradMode = "adjoint") -> np.ndarray:
    """d objective / d u_k."""
    u = _as_controls(scenario, controls)
    if mode == "fd":
        return approx_fprime(u, lambda v: objective(scenario, v), FD_STEP)
    if mode != "adjoint":
        raise ValueError(f"unknown gradient mode {mode!r}")
    states, stages = integrate_states(scenario, u, record_stages=True)
    state_grad = np.zeros_like(states)
    state_grad[:-1] = scenario.h * np.asarray(scenario.q, dtype=float)
    return _adjoint(scenario, u, stages, state_grad) + 2.0 * scenario.h * u


# -------- augmented Lagrangian --------

class _Merit:
    """Objective plus PHR penalty (max(0, mu + rho g)^2 - mu^2) / (2 rho) on every g."""

    def __init__(self, problem: OcpProblem, mode: GradMode, constraints: Sequence[BaseConstraint]):
        self.problem = problem
        self.mode = mode
        self.constraints = list(constraints)
        zeros = np.zeros((problem.N, 4))
        self.multipliers = [np.zeros_like(c.values(zeros)) for c in self.constraints]
        self.penalty = 1.0

    def value_and_state_grad(self, u: np.ndarray, record_stages: bool):
        sc = self.problem.scenario
        states, stages = integrate_states(sc, u, record_stages=record_stages)
        value = _running_cost(sc, states, u)
        state_grad = np.zeros_like(states)
        state_grad[:-1] = sc.h * np.asarray(sc.q, dtype=float)
        rho = self.penalty
        for c, mu in zip(self.constraints, self.multipliers):
            g = c.values(states[1:])
            t = np.maximum(0.0, mu + rho * g)
            value += float(np.sum(t * t - mu * mu)) / (2.0 * rho)
            state_grad[1:] += np.einsum("kp,kpj->kj", t, c.state_jacobian(states[1:]))
        return value, states, stages, state_grad

    def __call__(self, u: np.ndarray) -> Tuple[float, np.ndarray]:
        if self.mode == "fd":
            value = self.value_and_state_grad(u, False)[0]
            grad = approx_fprime(u, lambda v: self.value_and_state_grad(v, False)[0], FD_STEP)
            return value, grad
        value, _, stages, state_grad = self.value_and_state_grad(u, True)
        sc = self.problem.scenario
        return value, _adjoint(sc, u, stages, state_grad) + 2.0 * sc.h * u

    def update(self, states: np.ndarray) -> None:
        for i, c in enumerate(self.constraints):
            self.multipliers[i] = np.maximum(0.0, self.multipliers[i] + self.penalty * c.values(states[1:]))


def _violation(problem: OcpProblem, states: np.ndarray) -> float:
    return max((c.violation(states[1:]) for c in problem.constraints if c.enabled), default=0.0)


def solve(problem: OcpProblem, options: Optional[SolverOptions] = None) -> OcpSolution:
    options = options or SolverOptions()
    sc = problem.scenario
    started = time.perf_counter()
    constraints = [c for c in problem.constraints if c.enabled]

    u = np.zeros(problem.N)
    states, _ = integrate_states(sc, u)
    baseline = _running_cost(sc, states, u)
    viol = _violation(problem, states)
    best: Optional[Tuple[np.ndarray, np.ndarray, float, float]] = None
    if viol <= options.feas_tol:
        best = (u.copy(), states, baseline, viol)
    logger.info(f"solve N={problem.N} baseline={baseline:.6g} grad_mode={options.grad_mode}")

    merit = _Merit(problem, options.grad_mode, constraints)
    merit.penalty = options.penalty0
    history: List[List[float]] = []
    iterations = 0
    outer = 0
    last = (u, states, baseline, viol)
    prev_viol = np.inf
    stalled = False

    for outer in range(1, options.max_outer + 1):
        trace: List[float] = []

        def record(intermediate_result) -> None:
            trace.append(float(intermediate_result.fun))
            logger.debug(f"solve outer={outer} it={len(trace)} merit={intermediate_result.fun:.10g}")

        res = minimize(
            merit,
            u,
            jac=True,
            method="L-BFGS-B",
            bounds=problem.control_bounds,
            callback=record,
            options={"maxiter": options.max_iters},
        )
        iterations += int(res.nit)
        # line search failed before the first step: u is the start point, not a minimizer
        stalled = res.status == 2 and res.nit == 0
        history.append(trace)
        b = sc.bounds
        u = np.clip(res.x, b.u_min, b.u_max)
        states, _ = integrate_states(sc, u)
        value = _running_cost(sc, states, u)
        viol = _violation(problem, states)
        last = (u, states, value, viol)
        logger.info(
            f"solve outer={outer} objective={value:.6g} viol={viol:.3e} rho={merit.penalty:.3g} nit={res.nit}"
        )

        if viol <= options.feas_tol and (best is None or value <= best[2]):
            best = (u.copy(), states, value, viol)
        if stalled:
            logger.warning(f"solve outer={outer}: inner solve made no progress ({res.message}); lowering rho")
            merit.penalty /= options.penalty_growth
            continue
        if viol <= options.feas_tol:
            break

        merit.update(states)
        if viol > options.violation_decrease * prev_viol:
            merit.penalty *= options.penalty_growth
        prev_viol = viol

    converged = last[3] <= options.feas_tol and not stalled
    if stalled:
        logger.warning(f"solve: inner solve stalled in the last of {outer} outer iterations")
    elif not converged:
        logger.warning(
            f"solve: no feasible point after {outer} outer iterations (viol={last[3]:.3e}); "
            f"returning {'best feasible' if best is not None else 'last'} iterate"
        )
    u_out, states_out, value_out, viol_out = best if best is not None else last
    for c in constraints:
        v = c.violation(states_out[1:])
        c.log_result({"status": "satisfied" if v <= options.feas_tol else "violated", "violation": v})

    traj = Trajectory.from_states(sc.geom, sc.params, sc.times, states_out, u_out)
    return OcpSolution(
        controls=u_out,
        trajectory=traj,
        objective=value_out,
        iterations=iterations,
        converged=converged,
        constraint_violation=viol_out,
        baseline_objective=baseline,
        outer_iterations=outer,
        merit_history=history,
        grad_mode=options.grad_mode,
        wall_time=time.perf_counter() - started,
    )
