"""Sequential linear-quadratic (SLQ) solver for equality-constrained optimal control.

The problem is discretized on a uniform grid with zero-order-hold inputs. Every iteration rolls
the current policy out with a fixed-step RK4 integrator, linearizes dynamics and constraints
about the rollout, integrates the continuous-time Riccati equation backwards over each interval
with the input update projected onto the linearized constraints, and line-searches the
feedforward update on a merit function (cost plus an l1 penalty on the constraint residual).
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from loopshaped_mpc.domain.models.arrays import FloatArray
from loopshaped_mpc.domain.models.errors import (
    ChartError,
    ConstraintDegeneracyError,
    DimensionMismatchError,
    DivergenceError,
    LinearizationError,
    SynthesisError,
)
from loopshaped_mpc.domain.models.lq_approximation import LqApproximation, NodeConstraint
from loopshaped_mpc.domain.models.ocp import OcpDefinition
from loopshaped_mpc.domain.models.solver_result import IterationRecord, SolverResult
from loopshaped_mpc.domain.models.solver_settings import SolverSettings
from loopshaped_mpc.domain.models.trajectory import FeedbackPolicy, Trajectory

logger = logging.getLogger(__name__)

# RK4 is stable for real eigenvalues with |lambda h| below about 2.78.
_RK4_STABLE_STEP = 2.5
_NEGLIGIBLE_UPDATE = 1e-12
# Substep doublings tried on an interval before the sweep is declared divergent.
_SUBSTEP_REFINEMENTS = 4


@dataclass(frozen=True, eq=False)
class BackwardPassResult:
    """Gains and feedforward updates about a nominal trajectory."""

    gains: FloatArray  # (N, m, n)
    feedforward_updates: FloatArray  # (N, m)
    expected_decrease: float
    cost_to_go: FloatArray  # Hessian of the value function at the first node
    regularization: float


@dataclass(frozen=True, eq=False)
class LineSearchResult:
    trajectory: Trajectory
    step: float
    cost: float
    merit: float
    violation: float


@dataclass(frozen=True)
class _MeritTerms:
    cost: float
    merit: float
    violation_inf: float


class _IndefiniteHessianError(Exception):
    """Reduced input Hessian not positive definite at the given regularization."""


class _KktSystem:
    """Factorized [[R, D'], [D, 0]] of one interval; solves for the affine input update."""

    def __init__(
        self,
        r: FloatArray,
        constraint: NodeConstraint | None,
        node: int,
        rank_tolerance: float,
    ) -> None:
        m = r.shape[0]
        self._m = m
        self._node = node
        self._state_jacobian = np.zeros((0, 0))
        self._residual = np.zeros(0)
        if constraint is None or constraint.rows == 0:
            matrix = r
            self._rows = 0
        else:
            d = constraint.input_jacobian
            singular_values = np.linalg.svd(d, compute_uv=False)
            if (
                d.shape[0] > m
                or singular_values[0] == 0.0
                or singular_values[-1] / singular_values[0] < rank_tolerance
            ):
                raise ConstraintDegeneracyError(
                    f"constraint input Jacobian is rank deficient at node {node}", node=node
                )
            null_space = linalg.null_space(d)
            if null_space.size and np.min(np.linalg.eigvalsh(null_space.T @ r @ null_space)) <= 0.0:
                raise _IndefiniteHessianError
            self._rows = d.shape[0]
            self._state_jacobian = constraint.state_jacobian
            self._residual = constraint.residual
            matrix = np.block([[r, d.T], [d, np.zeros((self._rows, self._rows))]])
        if self._rows == 0 and np.min(np.linalg.eigvalsh(r)) <= 0.0:
            raise _IndefiniteHessianError
        self._factor = linalg.lu_factor(matrix)

    def solve(
        self, b: FloatArray, s_matrix: FloatArray, s_vector: FloatArray, r_vector: FloatArray
    ) -> tuple[FloatArray, FloatArray]:
        """Return (K, k) of the update du = K dx + k minimizing the Hamiltonian.

        Raises:
            LinearizationError: If the value function passed in, or the update, is not finite.
        """
        if not _all_finite(s_matrix, s_vector):
            raise self._diverged()
        top_gain = -b.T @ s_matrix
        top_ff = -(r_vector + b.T @ s_vector)
        if self._rows:
            rhs_gain = np.vstack([top_gain, -self._state_jacobian])
            rhs_ff = np.concatenate([top_ff, -self._residual])
        else:
            rhs_gain, rhs_ff = top_gain, top_ff
        with np.errstate(over="ignore", invalid="ignore"):
            solution = linalg.lu_solve(self._factor, np.column_stack([rhs_gain, rhs_ff]))
        if not _all_finite(solution):
            raise self._diverged()
        return solution[: self._m, :-1], solution[: self._m, -1]

    def _diverged(self) -> LinearizationError:
        return LinearizationError(f"Riccati sweep diverged at node {self._node}", node=self._node)


@dataclass(frozen=True, eq=False)
class _RiccatiInterval:
    """Right-hand side of the backward Riccati equation on one interval, in reversed time."""

    kkt: _KktSystem
    a: FloatArray
    b: FloatArray
    q_mat: FloatArray
    q_vec: FloatArray
    r_mat: FloatArray
    r_vec: FloatArray

    def derivative(self, s_mat: FloatArray, s_vec: FloatArray) -> tuple[FloatArray, FloatArray]:
        gain, ff = self.kkt.solve(self.b, s_mat, s_vec, self.r_vec)
        closed = self.a + self.b @ gain
        d_mat = self.q_mat + gain.T @ self.r_mat @ gain + s_mat @ closed + closed.T @ s_mat
        d_vec = (
            self.q_vec
            + gain.T @ (self.r_mat @ ff)
            + gain.T @ self.r_vec
            + closed.T @ s_vec
            + s_mat @ self.b @ ff
        )
        return 0.5 * (d_mat + d_mat.T), d_vec


def _all_finite(*arrays: FloatArray) -> bool:
    return all(bool(np.all(np.isfinite(array))) for array in arrays)


def _integrate_riccati(
    derivative: Callable[[FloatArray, FloatArray], tuple[FloatArray, FloatArray]],
    s_matrix: FloatArray,
    s_vector: FloatArray,
    dt: float,
    substeps: int,
) -> tuple[FloatArray, FloatArray] | None:
    """RK4 over one interval in ``substeps`` steps; None once any stage leaves the finite range."""
    h = dt / substeps
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(substeps):
            matrix_rate = np.zeros_like(s_matrix)
            vector_rate = np.zeros_like(s_vector)
            slope_matrix, slope_vector = np.zeros_like(s_matrix), np.zeros_like(s_vector)
            for fraction, weight in ((0.0, 1.0), (0.5, 2.0), (0.5, 2.0), (1.0, 1.0)):
                point_matrix = s_matrix + fraction * h * slope_matrix
                point_vector = s_vector + fraction * h * slope_vector
                if not _all_finite(point_matrix, point_vector):
                    return None
                try:
                    slope_matrix, slope_vector = derivative(point_matrix, point_vector)
                except LinearizationError:
                    return None
                matrix_rate += weight * slope_matrix
                vector_rate += weight * slope_vector
            s_matrix = s_matrix + (h / 6.0) * matrix_rate
            s_vector = s_vector + (h / 6.0) * vector_rate
            s_matrix = 0.5 * (s_matrix + s_matrix.T)
    if not _all_finite(s_matrix, s_vector):
        return None
    return s_matrix, s_vector


def _riccati_interval(
    derivative: Callable[[FloatArray, FloatArray], tuple[FloatArray, FloatArray]],
    s_matrix: FloatArray,
    s_vector: FloatArray,
    dt: float,
    substeps: int,
    node: int,
) -> tuple[FloatArray, FloatArray]:
    """Integrate one interval, doubling the substeps while the result is not finite.

    Raises:
        LinearizationError: If the value function still diverges at the finest subdivision.
    """
    for _ in range(_SUBSTEP_REFINEMENTS + 1):
        integrated = _integrate_riccati(derivative, s_matrix, s_vector, dt, substeps)
        if integrated is not None:
            return integrated
        substeps *= 2
        logger.debug(f"Riccati interval {node} left the finite range, retrying with {substeps}")
    raise LinearizationError(f"Riccati sweep diverged at node {node}", node=node)


def _rk4(
    f: Callable[[FloatArray, float], FloatArray], x: FloatArray, t: float, h: float
) -> FloatArray:
    k1 = f(x, t)
    k2 = f(x + 0.5 * h * k1, t + 0.5 * h)
    k3 = f(x + 0.5 * h * k2, t + 0.5 * h)
    k4 = f(x + h * k3, t + h)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


class SlqSolver:
    """Discretized SLQ with equality-constraint projection.

    A solver instance keeps no state between calls and can be reused for independent problems.
    """

    def __init__(self, settings: SolverSettings | None = None) -> None:
        self.settings = settings or SolverSettings()

    # ------------------------------------------------------------------ forward

    def rollout(
        self, ocp: OcpDefinition, x0: FloatArray, policy: FeedbackPolicy, step: float = 1.0
    ) -> Trajectory:
        """Simulate ``policy`` from ``x0``; stored inputs are the projected ones.

        Raises:
            DivergenceError: If the state becomes non-finite.
        """
        if policy.node_count != ocp.node_count:
            raise DimensionMismatchError(
                f"policy has {policy.node_count} nodes, problem has {ocp.node_count}"
            )
        times = ocp.node_times()
        dt = ocp.dt
        states = np.empty((ocp.node_count + 1, ocp.state_dim))
        inputs = np.empty((ocp.node_count, ocp.input_dim))
        states[0] = x0
        block = ocp.state_dim - ocp.exact_block_dim
        for k in range(ocp.node_count):
            x, t = states[k], float(times[k])
            u = policy.input(k, x, step)
            if ocp.input_projection is not None:
                u = ocp.input_projection(x, u, t)
            inputs[k] = u
            try:
                states[k + 1] = _rk4(lambda y, s, u=u: ocp.dynamics(y, u, s), x, t, dt)
            except ChartError as exc:
                raise DivergenceError(
                    f"state left the Euler chart at node {k + 1}", node=k + 1, time=t + dt
                ) from exc
            if ocp.exact_block_step is not None:
                states[k + 1, block:] = ocp.exact_block_step(x[block:], u, dt)
            if not (np.all(np.isfinite(states[k + 1])) and np.all(np.isfinite(u))):
                raise DivergenceError(
                    f"non-finite state at node {k + 1} (t={t + dt:.4f})", node=k + 1, time=t + dt
                )
        return Trajectory(times=times, states=states, inputs=inputs)

    def evaluate(self, ocp: OcpDefinition, trajectory: Trajectory) -> _MeritTerms:
        """Cost, merit and constraint violation of a trajectory."""
        dt = trajectory.dt
        cost = 0.0
        violation_l1 = 0.0
        violation_inf = 0.0
        for k in range(trajectory.node_count):
            x, u, t = trajectory.states[k], trajectory.inputs[k], float(trajectory.times[k])
            cost += dt * ocp.running_cost(x, u, t)
            if ocp.equality_constraints is not None:
                residual = np.abs(ocp.equality_constraints(x, u, t))
                if residual.size:
                    violation_l1 += dt * float(residual.sum())
                    violation_inf = max(violation_inf, float(residual.max()))
        cost += ocp.terminal_cost.value(trajectory.states[-1], trajectory.end_time)
        merit = cost + self.settings.constraint_penalty * violation_l1
        return _MeritTerms(cost=cost, merit=merit, violation_inf=violation_inf)

    # ------------------------------------------------------------- linearization

    def _difference_step(self, v: FloatArray) -> FloatArray:
        return self.settings.fd_step * np.maximum(1.0, np.abs(v))

    def _finite_difference(
        self,
        fn: Callable[[FloatArray, FloatArray, float], FloatArray],
        x: FloatArray,
        u: FloatArray,
        t: float,
        vectorized: bool,
    ) -> tuple[FloatArray, FloatArray]:
        n = x.size
        v = np.concatenate([x, u])
        h = self._difference_step(v)
        perturbation = np.diag(h)
        points = np.vstack([v + perturbation, v - perturbation])
        if vectorized:
            values = np.asarray(fn(points[:, :n], points[:, n:], t))
        else:
            values = np.stack([np.asarray(fn(p[:n], p[n:], t)) for p in points])
        count = v.size
        jacobian = ((values[:count] - values[count:]) / (2.0 * h[:, None])).T
        return jacobian[:, :n], jacobian[:, n:]

    def linearize(self, ocp: OcpDefinition, trajectory: Trajectory) -> LqApproximation:
        """Jacobians and quadratic cost expansion about every node of ``trajectory``.

        Raises:
            LinearizationError: If a derivative is not finite.
        """
        n_nodes, n, m = trajectory.node_count, ocp.state_dim, ocp.input_dim
        a = np.empty((n_nodes, n, n))
        b = np.empty((n_nodes, n, m))
        q_vec = np.empty((n_nodes, n))
        r_vec = np.empty((n_nodes, m))
        q_mat = np.empty((n_nodes, n, n))
        r_mat = np.empty((n_nodes, m, m))
        constraints: list[NodeConstraint | None] = []

        for k in range(n_nodes):
            x, u, t = trajectory.states[k], trajectory.inputs[k], float(trajectory.times[k])
            if ocp.dynamics_jacobian is not None:
                a[k], b[k] = ocp.dynamics_jacobian(x, u, t)
            else:
                a[k], b[k] = self._finite_difference(ocp.dynamics, x, u, t, ocp.vectorized)
            q_vec[k] = ocp.state_cost.gradient(x, t)
            q_mat[k] = ocp.state_cost.hessian(x, t)
            r_vec[k] = ocp.input_cost.gradient(u, t)
            r_mat[k] = ocp.input_cost.hessian(u, t)
            constraints.append(self._linearize_constraints(ocp, x, u, t, k))

            node_terms = (a[k], b[k], q_vec[k], r_vec[k], q_mat[k], r_mat[k])
            if not all(np.all(np.isfinite(term)) for term in node_terms):
                raise LinearizationError(f"non-finite derivative at node {k}", node=k)

        x_final = trajectory.states[-1]
        terminal_gradient = ocp.terminal_cost.gradient(x_final, trajectory.end_time)
        terminal_hessian = ocp.terminal_cost.hessian(x_final, trajectory.end_time)
        if not (np.all(np.isfinite(terminal_gradient)) and np.all(np.isfinite(terminal_hessian))):
            raise LinearizationError("non-finite terminal cost derivative", node=n_nodes)

        return LqApproximation(
            dt=trajectory.dt,
            state_jacobians=a,
            input_jacobians=b,
            state_gradients=q_vec,
            input_gradients=r_vec,
            state_hessians=q_mat,
            input_hessians=r_mat,
            terminal_gradient=terminal_gradient,
            terminal_hessian=terminal_hessian,
            constraints=tuple(constraints),
        )

    def _linearize_constraints(
        self, ocp: OcpDefinition, x: FloatArray, u: FloatArray, t: float, node: int
    ) -> NodeConstraint | None:
        if ocp.equality_constraints is None:
            return None
        residual = np.asarray(ocp.equality_constraints(x, u, t), dtype=float)
        if residual.size == 0:
            return None
        if ocp.constraint_jacobian is not None:
            c, d = ocp.constraint_jacobian(x, u, t)
        else:
            c, d = self._finite_difference(ocp.equality_constraints, x, u, t, ocp.vectorized)
        constraint = NodeConstraint(state_jacobian=c, input_jacobian=d, residual=residual)
        if not all(np.all(np.isfinite(v)) for v in (c, d, residual)):
            raise LinearizationError(f"non-finite constraint derivative at node {node}", node=node)
        return constraint

    # ------------------------------------------------------------------ backward

    def backward_pass(self, lq: LqApproximation, regularization: float) -> BackwardPassResult:
        """Riccati sweep producing an affine policy update.

        The regularization is raised until every reduced input Hessian is positive definite.

        Raises:
            ConstraintDegeneracyError: If a constraint input Jacobian loses row rank.
            SynthesisError: If no regularization below the ceiling makes the Hessians definite.
        """
        settings = self.settings
        mu = max(regularization, 0.0)
        while True:
            try:
                return self._sweep(lq, mu)
            except _IndefiniteHessianError:
                mu = max(mu * settings.regularization_increase, settings.regularization_floor)
                if mu > settings.regularization_ceiling:
                    raise SynthesisError(
                        "input Hessian stays indefinite up to the regularization ceiling"
                    ) from None
                logger.debug(f"Indefinite input Hessian, regularization raised to {mu:.3e}")

    def _sweep(self, lq: LqApproximation, mu: float) -> BackwardPassResult:
        n_nodes, n, m = lq.node_count, lq.state_dim, lq.input_dim
        dt = lq.dt
        gains = np.zeros((n_nodes, m, n))
        updates = np.zeros((n_nodes, m))
        s_matrix = np.array(lq.terminal_hessian, dtype=float)
        s_vector = np.array(lq.terminal_gradient, dtype=float)
        decrease = 0.0
        penalty = 0.0

        for k in range(n_nodes - 1, -1, -1):
            a, b = lq.state_jacobians[k], lq.input_jacobians[k]
            q_mat, q_vec = lq.state_hessians[k], lq.state_gradients[k]
            r_mat = lq.input_hessians[k] + mu * np.eye(m)
            r_vec = lq.input_gradients[k]
            kkt = _KktSystem(r_mat, lq.constraints[k], k, self.settings.rank_tolerance)
            derivative = _RiccatiInterval(kkt, a, b, q_mat, q_vec, r_mat, r_vec).derivative

            gain, _ = kkt.solve(b, s_matrix, s_vector, r_vec)
            spectral_radius = float(np.max(np.abs(np.linalg.eigvals(a + b @ gain))))
            substeps = max(
                self.settings.riccati_substeps,
                math.ceil(2.0 * spectral_radius * dt / _RK4_STABLE_STEP),
            )
            s_matrix, s_vector = _riccati_interval(
                derivative, s_matrix, s_vector, dt, substeps, node=k
            )

            gains[k], updates[k] = kkt.solve(b, s_matrix, s_vector, r_vec)
            ff = updates[k]
            decrease -= dt * float(ff @ (r_vec + b.T @ s_vector) + 0.5 * ff @ r_mat @ ff)
            constraint = lq.constraints[k]
            if constraint is not None:
                penalty += dt * float(np.abs(constraint.residual).sum())

        expected = decrease + self.settings.constraint_penalty * penalty
        return BackwardPassResult(
            gains=gains,
            feedforward_updates=updates,
            expected_decrease=expected,
            cost_to_go=s_matrix,
            regularization=mu,
        )

    # --------------------------------------------------------------- line search

    def line_search(
        self,
        ocp: OcpDefinition,
        x0: FloatArray,
        policy: FeedbackPolicy,
        current: Trajectory,
        current_merit: float | None = None,
    ) -> LineSearchResult:
        """Backtrack on the feedforward update until the merit strictly decreases.

        Returns step 0 and ``current`` when no step down to ``min_step`` decreases the merit, or
        when the update is negligible.
        """
        settings = self.settings
        reference = self.evaluate(ocp, current)
        baseline_merit = reference.merit if current_merit is None else current_merit
        rejected = LineSearchResult(
            trajectory=current,
            step=0.0,
            cost=reference.cost,
            merit=baseline_merit,
            violation=reference.violation_inf,
        )
        scale = 1.0 + float(np.max(np.abs(policy.nominal_inputs), initial=0.0))
        largest_update = float(np.max(np.abs(policy.feedforward_updates), initial=0.0))
        if largest_update <= _NEGLIGIBLE_UPDATE * scale:
            return rejected

        step = 1.0
        while step >= settings.min_step * (1.0 - 1e-12):
            try:
                candidate = self.rollout(ocp, x0, policy, step)
            except DivergenceError as exc:
                logger.debug(f"Trial step {step:g} diverged at node {exc.node}")
            else:
                terms = self.evaluate(ocp, candidate)
                if terms.merit < baseline_merit:
                    return LineSearchResult(
                        trajectory=candidate,
                        step=step,
                        cost=terms.cost,
                        merit=terms.merit,
                        violation=terms.violation_inf,
                    )
            step *= settings.backtracking_factor
        return rejected

    # ------------------------------------------------------------------- solving

    def initial_policy(self, ocp: OcpDefinition, x0: FloatArray) -> FeedbackPolicy:
        """Open-loop policy replaying the problem's initial inputs.

        ``ocp.initial_guess`` takes precedence over ``ocp.initial_input``; without either the
        inputs are zero.
        """
        times = ocp.node_times()[:-1]
        if ocp.initial_guess is not None:
            inputs = np.asarray(ocp.initial_guess(np.asarray(x0, dtype=float), times), dtype=float)
            if inputs.shape != (ocp.node_count, ocp.input_dim):
                raise DimensionMismatchError(
                    f"initial guess must be {(ocp.node_count, ocp.input_dim)}, got {inputs.shape}"
                )
        elif ocp.initial_input is None:
            inputs = np.zeros((ocp.node_count, ocp.input_dim))
        else:
            inputs = np.stack([np.asarray(ocp.initial_input(float(t)), dtype=float) for t in times])
        return FeedbackPolicy(
            nominal_states=np.tile(np.asarray(x0, dtype=float), (ocp.node_count + 1, 1)),
            nominal_inputs=inputs,
            feedforward_updates=np.zeros_like(inputs),
            gains=np.zeros((ocp.node_count, ocp.input_dim, ocp.state_dim)),
        )

    def solve(
        self,
        ocp: OcpDefinition,
        x0: FloatArray,
        warm_start: FeedbackPolicy | None = None,
    ) -> SolverResult:
        """Iterate until the merit stalls or ``max_iterations`` is reached.

        Raises:
            DivergenceError: If the initial rollout diverges.
        """
        x0 = np.asarray(x0, dtype=float)
        if x0.shape != (ocp.state_dim,):
            raise DimensionMismatchError(f"initial state must have {ocp.state_dim} entries")
        policy = warm_start if warm_start is not None else self.initial_policy(ocp, x0)
        try:
            trajectory = self.rollout(ocp, x0, policy)
        except DivergenceError as exc:
            raise DivergenceError(
                f"initial rollout diverged: {exc}", node=exc.node, time=exc.time
            ) from exc
        return self._iterate(
            ocp, x0, trajectory, self.settings.max_iterations, self.settings.regularization
        )

    def mpc_step(self, ocp: OcpDefinition, x0: FloatArray, previous: SolverResult) -> SolverResult:
        """One real-time iteration warm-started from ``previous`` shifted onto ``ocp``'s horizon."""
        x0 = np.asarray(x0, dtype=float)
        policy = shift_policy(previous, ocp.node_times())
        trajectory = self.rollout(ocp, x0, policy)
        return self._iterate(ocp, x0, trajectory, 1, previous.regularization)

    def _iterate(
        self,
        ocp: OcpDefinition,
        x0: FloatArray,
        trajectory: Trajectory,
        max_iterations: int,
        regularization: float,
    ) -> SolverResult:
        settings = self.settings
        mu = max(regularization, settings.regularization_floor)
        terms = self.evaluate(ocp, trajectory)
        records = [
            IterationRecord(0, terms.cost, terms.merit, 0.0, terms.violation_inf, mu, math.nan)
        ]
        converged = False
        gains = np.zeros((ocp.node_count, ocp.input_dim, ocp.state_dim))

        for iteration in range(1, max_iterations + 1):
            backward = self.backward_pass(self.linearize(ocp, trajectory), mu)
            mu = backward.regularization
            gains = backward.gains
            threshold = settings.tolerance * (1.0 + abs(terms.merit))
            if backward.expected_decrease <= threshold:
                converged = True
                logger.debug(
                    f"Iteration {iteration}: expected decrease "
                    f"{backward.expected_decrease:.3e} below {threshold:.3e}"
                )
                break

            policy = FeedbackPolicy(
                nominal_states=trajectory.states,
                nominal_inputs=trajectory.inputs,
                feedforward_updates=backward.feedforward_updates,
                gains=backward.gains,
            )
            search = self.line_search(ocp, x0, policy, trajectory, terms.merit)
            if search.step == 0.0:
                mu = min(mu * settings.regularization_increase, settings.regularization_ceiling)
                records.append(
                    IterationRecord(
                        iteration,
                        terms.cost,
                        terms.merit,
                        0.0,
                        terms.violation_inf,
                        mu,
                        backward.expected_decrease,
                    )
                )
                logger.debug(f"Iteration {iteration}: no step accepted, regularization {mu:.3e}")
                if mu >= settings.regularization_ceiling:
                    logger.warning("Regularization reached its ceiling, stopping")
                    break
                continue

            improvement = terms.merit - search.merit
            trajectory = search.trajectory
            terms = _MeritTerms(search.cost, search.merit, search.violation)
            mu = max(mu / settings.regularization_decrease, settings.regularization_floor)
            records.append(
                IterationRecord(
                    iteration,
                    terms.cost,
                    terms.merit,
                    search.step,
                    terms.violation_inf,
                    mu,
                    backward.expected_decrease,
                )
            )
            logger.debug(
                f"Iteration {iteration}: cost {terms.cost:.6g}, merit {terms.merit:.6g}, "
                f"step {search.step:g}, violation {terms.violation_inf:.3e}, "
                f"regularization {mu:.3e}"
            )
            if improvement <= settings.tolerance * (1.0 + abs(terms.merit)):
                converged = True
                break

        policy = FeedbackPolicy(
            nominal_states=trajectory.states,
            nominal_inputs=trajectory.inputs,
            feedforward_updates=np.zeros_like(trajectory.inputs),
            gains=gains,
        )
        return SolverResult(
            trajectory=trajectory,
            policy=policy,
            iterations=tuple(records),
            converged=converged,
            regularization=mu,
        )


def shift_policy(previous: SolverResult, times: FloatArray) -> FeedbackPolicy:
    """Resample a solution onto new node times, holding its last node beyond its horizon."""
    old = previous.trajectory
    clamped = np.clip(times, old.start_time, old.end_time)
    states = np.stack([old.state_at(float(t)) for t in clamped])
    indices = [old.input_index(float(t)) for t in clamped[:-1]]
    inputs = old.inputs[indices]
    gains = previous.policy.gains[indices]
    return FeedbackPolicy(
        nominal_states=states,
        nominal_inputs=inputs,
        feedforward_updates=np.zeros_like(inputs),
        gains=gains,
    )
