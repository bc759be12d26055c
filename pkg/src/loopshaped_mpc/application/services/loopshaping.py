"""Frequency shaping of optimal control problems.

Each input u_i is weighted by r_i(w) = (1 + beta_i jw) / (1 + alpha_i jw). Instead of filtering
the input inside the cost, the problem is rewritten over an auxiliary input nu with u = s(nu),
s = 1/r, realized by a bank of first-order filters whose states join the problem state.
"""

import logging
from collections.abc import Callable

import numpy as np
from scipy import linalg, signal

from loopshaped_mpc.application.services.costs import (
    EmbeddedCost,
    PenaltyCost,
    QuadraticInputCost,
    SumCost,
)
from loopshaped_mpc.application.services.lti_core import balanced_first_order, tf_eval
from loopshaped_mpc.domain.models.arrays import ComplexArray, FloatArray
from loopshaped_mpc.domain.models.augmented_ocp import AugmentedOcp
from loopshaped_mpc.domain.models.errors import (
    DimensionMismatchError,
    ExtrapolationError,
    UnsupportedStructureError,
)
from loopshaped_mpc.domain.models.filter_bank import FilterBank
from loopshaped_mpc.domain.models.ocp import ConstraintFn, JacobianFn, OcpDefinition
from loopshaped_mpc.domain.models.shaping_spec import ShapingSpec
from loopshaped_mpc.domain.models.state_space import StateSpaceRealization
from loopshaped_mpc.domain.models.trajectory import Trajectory
from loopshaped_mpc.domain.models.transfer_function import RationalTransferFunction

logger = logging.getLogger(__name__)

DERIVATIVE_PENALTY_WEIGHT = 1e6
_TIME_EPS = 1e-9


def make_r_filter(spec: ShapingSpec, index: int) -> RationalTransferFunction:
    """Shaping function (1 + beta s) / (1 + alpha s) of input ``index``."""
    channel = spec.channel(index)
    if not channel.is_shaped:
        return RationalTransferFunction.identity()
    return RationalTransferFunction(numerator=(1.0, channel.beta), denominator=(1.0, channel.alpha))


def _inverse_filter(spec: ShapingSpec, index: int) -> RationalTransferFunction:
    channel = spec.channel(index)
    return RationalTransferFunction(numerator=(1.0, channel.alpha), denominator=(1.0, channel.beta))


def _assemble_bank(
    blocks: list[StateSpaceRealization], indices: tuple[int, ...], m: int
) -> StateSpaceRealization:
    """Stack one-state (or static) blocks on the diagonal of an m-input, m-output system."""
    a = linalg.block_diag(*[block.a for block in blocks if block.n_states]) if indices else None
    n_s = len(indices)
    b = np.zeros((n_s, m))
    c = np.zeros((m, n_s))
    d = np.eye(m)
    state = 0
    for i, block in enumerate(blocks):
        d[i, i] = block.d[0, 0]
        if block.n_states:
            b[state, i] = block.b[0, 0]
            c[i, state] = block.c[0, 0]
            state += 1
    return StateSpaceRealization(a=a if a is not None else np.zeros((0, 0)), b=b, c=c, d=d)


def make_filter_bank(spec: ShapingSpec) -> FilterBank:
    """Block-diagonal balanced realization of s_i = 1/r_i for every input.

    Unshaped inputs contribute no state and a unit feedthrough.
    """
    blocks = [
        balanced_first_order(_inverse_filter(spec, i))
        if spec.channel(i).is_shaped
        else StateSpaceRealization.static_gain(1.0)
        for i in range(len(spec))
    ]
    indices = tuple(i for i, block in enumerate(blocks) if block.n_states)
    return FilterBank(_assemble_bank(blocks, indices, len(spec)), indices)


def shaping_realization(spec: ShapingSpec) -> StateSpaceRealization:
    """Realization of the shaping functions r_i themselves (requires alpha_i > 0 when shaped)."""
    blocks = []
    for i in range(len(spec)):
        tf = make_r_filter(spec, i)
        if tf.denominator_degree < tf.numerator_degree:
            raise UnsupportedStructureError(f"input {i} has alpha = 0, its shaping is improper")
        blocks.append(balanced_first_order(tf))
    indices = tuple(i for i, block in enumerate(blocks) if block.n_states)
    return _assemble_bank(blocks, indices, len(spec))


def shaped_input_weight(spec: ShapingSpec, r: FloatArray, omega: float) -> ComplexArray:
    """Frequency-dependent input weight r(jw)^H R r(jw)."""
    weight = np.atleast_2d(np.asarray(r, dtype=float))
    if weight.shape != (len(spec), len(spec)):
        raise DimensionMismatchError(f"R must be {len(spec)}x{len(spec)}, got {weight.shape}")
    response = np.array([tf_eval(make_r_filter(spec, i), abs(omega)) for i in range(len(spec))])
    if omega < 0.0:
        response = np.conj(response)
    return np.conj(response)[:, None] * weight * response[None, :]


def recover_input(bank: FilterBank, x_s: FloatArray, nu: FloatArray) -> FloatArray:
    x_s = np.asarray(x_s, dtype=float)
    nu = np.asarray(nu, dtype=float)
    if x_s.shape[-1] != bank.n_states or nu.shape[-1] != bank.n_inputs:
        raise DimensionMismatchError(
            f"bank needs {bank.n_states} filter states and {bank.n_inputs} inputs, "
            f"got {x_s.shape} and {nu.shape}"
        )
    return x_s @ bank.c.T + nu @ bank.d.T


def hold_step(bank: FilterBank, x_s: FloatArray, nu: FloatArray, h: float) -> FloatArray:
    """Exact solution of x_s' = A_s x_s + B_s nu over ``h`` with ``nu`` held constant.

    Solver rollouts and the tracker both advance filter states with this map.
    """
    forcing = bank.b @ nu
    if bank.is_diagonal:
        a = np.diag(bank.a)
        decay = np.exp(a * h)
        with np.errstate(divide="ignore", invalid="ignore"):
            gain = np.where(a == 0.0, h, np.expm1(a * h) / np.where(a == 0.0, 1.0, a))
        return decay * x_s + gain * forcing
    n = bank.n_states
    block = np.zeros((n + 1, n + 1))
    block[:n, :n] = bank.a * h
    block[:n, n] = forcing * h
    transition = linalg.expm(block)
    return transition[:n, :n] @ x_s + transition[:n, n]


def interval_mean_maps(bank: FilterBank, h: float) -> tuple[FloatArray, FloatArray]:
    """Maps (C_bar, D_bar) giving the mean of u over a hold of length ``h``.

    Starting from x_s with nu held, the recovered input averages to C_bar x_s + D_bar nu over
    the hold. C_bar = C_s E1 / h and D_bar = D_s + C_s E2 B_s / h, where E1 and E2 are the
    first and second integrals of exp(A_s t) read off one block exponential.
    """
    if not h > 0.0:
        raise ValueError(f"hold length must be positive, got {h}")
    n = bank.n_states
    if n == 0:
        return np.array(bank.c), np.array(bank.d)
    generator = np.zeros((3 * n, 3 * n))
    generator[:n, :n] = bank.a
    generator[:n, n : 2 * n] = np.eye(n)
    generator[n : 2 * n, 2 * n :] = np.eye(n)
    integrals = linalg.expm(generator * h)
    first, second = integrals[:n, n : 2 * n], integrals[:n, 2 * n :]
    return bank.c @ first / h, bank.d + bank.c @ second @ bank.b / h


def propagate_filter_state(
    bank: FilterBank, x_s: FloatArray, nu_plan: Trajectory, start: float, dt: float
) -> FloatArray:
    """Advance the filter state from ``start`` to ``start + dt`` under the planned nu.

    Raises:
        ExtrapolationError: If the plan does not cover the interval.
    """
    if not dt > 0.0:
        raise ValueError(f"propagation step must be positive, got {dt}")
    x_s = np.asarray(x_s, dtype=float)
    if bank.n_states == 0:
        return x_s.copy()
    end = start + dt
    if not (nu_plan.covers(start) and nu_plan.covers(end)):
        raise ExtrapolationError(
            f"plan [{nu_plan.start_time:.4f}, {nu_plan.end_time:.4f}] does not cover "
            f"[{start:.4f}, {end:.4f}]"
        )
    t = start
    while t < end - _TIME_EPS:
        index = nu_plan.input_index(t)
        boundary = min(end, nu_plan.start_time + (index + 1) * nu_plan.dt)
        if boundary <= t + _TIME_EPS:
            boundary = end
        x_s = hold_step(bank, x_s, nu_plan.inputs[index], boundary - t)
        t = boundary
    return x_s


def filter_signal(
    realization: StateSpaceRealization,
    samples: FloatArray,
    dt: float,
    x0: FloatArray | None = None,
) -> FloatArray:
    """Response of ``realization`` to a uniformly sampled input, linearly interpolated."""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if samples.shape[1] != realization.n_inputs:
        raise DimensionMismatchError(
            f"signal has {samples.shape[1]} channels, realization {realization.n_inputs}"
        )
    if realization.n_states == 0:
        return samples @ realization.d.T
    times = dt * np.arange(samples.shape[0])
    system = signal.StateSpace(realization.a, realization.b, realization.c, realization.d)
    _, outputs, _ = signal.lsim(system, samples, times, X0=x0, interp=True)
    return np.asarray(outputs, dtype=float).reshape(samples.shape[0], realization.n_outputs)


def time_domain_cost(
    states: FloatArray, inputs: FloatArray, dt: float, q: FloatArray, r: FloatArray
) -> float:
    """Sum of x'Qx + u'Ru over uniformly sampled (periodic) signals, times dt."""
    states = np.atleast_2d(states)
    inputs = np.atleast_2d(inputs)
    state_terms = np.einsum("ki,ij,kj->", states, q, states)
    input_terms = np.einsum("ki,ij,kj->", inputs, r, inputs)
    return float(dt * (state_terms + input_terms))


def frequency_domain_cost(
    states: FloatArray,
    inputs: FloatArray,
    dt: float,
    q: FloatArray,
    r: FloatArray,
    spec: ShapingSpec | None = None,
) -> float:
    """Discrete Parseval counterpart of ``time_domain_cost``.

    With ``spec`` the input term uses the shaped weight r(jw)^H R r(jw) at every DFT frequency,
    which equals the time-domain cost of the inputs filtered through r.
    """
    states = np.atleast_2d(states)
    inputs = np.atleast_2d(inputs)
    count = states.shape[0]
    if inputs.shape[0] != count:
        raise DimensionMismatchError("state and input signals must have the same length")
    state_spectrum = np.fft.fft(states, axis=0)
    input_spectrum = np.fft.fft(inputs, axis=0)
    state_terms = np.einsum("ki,ij,kj->", state_spectrum.conj(), q, state_spectrum)
    if spec is None:
        input_terms = np.einsum("ki,ij,kj->", input_spectrum.conj(), r, input_spectrum)
    else:
        frequencies = 2.0 * np.pi * np.fft.fftfreq(count, d=dt)
        weights = np.stack([shaped_input_weight(spec, r, float(w)) for w in frequencies])
        input_terms = np.einsum("ki,kij,kj->", input_spectrum.conj(), weights, input_spectrum)
    return float(dt / count * (state_terms + input_terms).real)


def augmented_initial_state(
    augmented: AugmentedOcp, x0: FloatArray, u0: FloatArray
) -> FloatArray:
    """Initial augmented state with the filters at rest under the constant input ``u0``.

    For a derivative augmentation the filter state is the input itself.
    """
    if augmented.bank.is_derivative:
        filter_state = np.asarray(u0, dtype=float)
    else:
        filter_state = augmented.bank.steady_state(u0)
    return np.concatenate([np.asarray(x0, dtype=float), filter_state])


def _augmented_projection(
    original: OcpDefinition, mean_c: FloatArray, mean_d: FloatArray, n: int
) -> Callable[[FloatArray, FloatArray, float], FloatArray] | None:
    """Projection acting on the hold mean of u, corrected through its nu feedthrough."""
    projection = original.input_projection
    if projection is None:
        return None
    feedthrough = np.diag(mean_d).copy()
    adjustable = feedthrough > 0.0
    safe = np.where(adjustable, feedthrough, 1.0)

    def project(z: FloatArray, nu: FloatArray, t: float) -> FloatArray:
        x, x_s = z[..., :n], z[..., n:]
        mean = x_s @ mean_c.T + nu @ mean_d.T
        correction = (projection(x, mean, t) - mean) / safe
        return nu + np.where(adjustable, correction, 0.0)

    return project


def _inverting_guess(
    ocp: OcpDefinition, bank: FilterBank, mean_c: FloatArray, mean_d: FloatArray
) -> Callable[[FloatArray, FloatArray], FloatArray] | None:
    """Initial nu whose hold means reproduce ``ocp.initial_input`` from the initial filter state."""
    initial_input = ocp.initial_input
    if initial_input is None:
        return None
    n, h = ocp.state_dim, ocp.dt

    def guess(z0: FloatArray, times: FloatArray) -> FloatArray:
        x_s = np.asarray(z0, dtype=float)[n:]
        inputs = np.empty((times.size, ocp.input_dim))
        for k, t in enumerate(times):
            target = np.asarray(initial_input(float(t)), dtype=float)
            inputs[k] = np.linalg.solve(mean_d, target - mean_c @ x_s)
            x_s = hold_step(bank, x_s, inputs[k], h)
        return inputs

    return guess


def augment_ocp(ocp: OcpDefinition, spec: ShapingSpec) -> AugmentedOcp:
    """Rewrite ``ocp`` over z = (x, x_s) and nu with u = C_s x_s + D_s nu driving the dynamics.

    The input cost of ``ocp`` is moved onto nu; state and terminal costs act on x only.
    Equality constraints and the input projection act on the mean of u over each hold interval,
    C_bar x_s + D_bar nu (see ``interval_mean_maps``), so a constraint met at the nodes is met
    on average between them. Filter states are advanced exactly by ``hold_step``, and the
    initial guess inverts the filters so that its hold means equal ``ocp.initial_input``.

    Raises:
        DimensionMismatchError: If ``spec`` does not have one channel per input.
    """
    if len(spec) != ocp.input_dim:
        raise DimensionMismatchError(
            f"shaping spec has {len(spec)} channels, problem has {ocp.input_dim} inputs"
        )
    bank = make_filter_bank(spec)
    n, n_s, m = ocp.state_dim, bank.n_states, ocp.input_dim
    a_s, b_s, c_s, d_s = bank.a, bank.b, bank.c, bank.d
    mean_c, mean_d = interval_mean_maps(bank, ocp.dt)

    def recover(z: FloatArray, nu: FloatArray) -> FloatArray:
        return z[..., n:] @ c_s.T + nu @ d_s.T

    def recover_mean(z: FloatArray, nu: FloatArray) -> FloatArray:
        return z[..., n:] @ mean_c.T + nu @ mean_d.T

    def dynamics(z: FloatArray, nu: FloatArray, t: float) -> FloatArray:
        x, x_s = z[..., :n], z[..., n:]
        x_dot = ocp.dynamics(x, recover(z, nu), t)
        return np.concatenate([x_dot, x_s @ a_s.T + nu @ b_s.T], axis=-1)

    dynamics_jacobian: JacobianFn | None = None
    if ocp.dynamics_jacobian is not None:
        original_jacobian = ocp.dynamics_jacobian

        def composed_jacobian(
            z: FloatArray, nu: FloatArray, t: float
        ) -> tuple[FloatArray, FloatArray]:
            a_x, b_u = original_jacobian(z[:n], recover(z, nu), t)
            a_z = np.block([[a_x, b_u @ c_s], [np.zeros((n_s, n)), a_s]])
            b_z = np.vstack([b_u @ d_s, b_s])
            return a_z, b_z

        dynamics_jacobian = composed_jacobian

    constraints: ConstraintFn | None = None
    constraint_jacobian: JacobianFn | None = None
    if ocp.equality_constraints is not None:
        original_constraints = ocp.equality_constraints

        def recovered_constraints(z: FloatArray, nu: FloatArray, t: float) -> FloatArray:
            return original_constraints(z[..., :n], recover_mean(z, nu), t)

        constraints = recovered_constraints
        if ocp.constraint_jacobian is not None:
            original_constraint_jacobian = ocp.constraint_jacobian

            def composed_constraint_jacobian(
                z: FloatArray, nu: FloatArray, t: float
            ) -> tuple[FloatArray, FloatArray]:
                c_x, d_u = original_constraint_jacobian(z[:n], recover_mean(z, nu), t)
                return np.hstack([c_x, d_u @ mean_c]), d_u @ mean_d

            constraint_jacobian = composed_constraint_jacobian

    def filter_step(x_s: FloatArray, nu: FloatArray, h: float) -> FloatArray:
        return hold_step(bank, x_s, nu, h)

    augmented = OcpDefinition(
        state_dim=n + n_s,
        input_dim=m,
        dynamics=dynamics,
        state_cost=EmbeddedCost(ocp.state_cost, 0, n, n + n_s),
        input_cost=ocp.input_cost,
        terminal_cost=EmbeddedCost(ocp.terminal_cost, 0, n, n + n_s),
        horizon=ocp.horizon,
        node_count=ocp.node_count,
        start_time=ocp.start_time,
        equality_constraints=constraints,
        input_projection=_augmented_projection(ocp, mean_c, mean_d, n),
        dynamics_jacobian=dynamics_jacobian,
        constraint_jacobian=constraint_jacobian,
        initial_input=ocp.initial_input,
        vectorized=ocp.vectorized,
        exact_block_dim=n_s,
        exact_block_step=filter_step if n_s else None,
        initial_guess=_inverting_guess(ocp, bank, mean_c, mean_d),
    )
    logger.debug(f"Augmented problem: {n} states + {n_s} filter states, {m} inputs")
    return AugmentedOcp(original=ocp, bank=bank, ocp=augmented, interval_mean=(mean_c, mean_d))


def derivative_augmentation(
    ocp: OcpDefinition,
    rate_weight: FloatArray | None = None,
    penalty_weight: float = DERIVATIVE_PENALTY_WEIGHT,
) -> AugmentedOcp:
    """Augmentation with u as a state and its derivative nu = du/dt as the new input.

    The input cost of ``ocp`` becomes a cost on the state u; nu is weighted by ``rate_weight``
    (default: the input Hessian of ``ocp``). Equality constraints turn into pure-state constraints
    and are enforced by a quadratic penalty.
    """
    n, m = ocp.state_dim, ocp.input_dim
    bank = FilterBank(
        StateSpaceRealization(a=np.zeros((m, m)), b=np.eye(m), c=np.eye(m), d=np.zeros((m, m))),
        tuple(range(m)),
        is_derivative=True,
    )
    if rate_weight is None:
        rate_weight = ocp.input_cost.hessian(np.zeros(m), ocp.start_time)

    def dynamics(z: FloatArray, nu: FloatArray, t: float) -> FloatArray:
        return np.concatenate([ocp.dynamics(z[..., :n], z[..., n:], t), nu], axis=-1)

    running_terms = [
        EmbeddedCost(ocp.state_cost, 0, n, n + m),
        EmbeddedCost(ocp.input_cost, n, m, n + m),
    ]
    if ocp.equality_constraints is not None:
        original_constraints = ocp.equality_constraints

        def residual(z: FloatArray, t: float) -> FloatArray:
            return original_constraints(z[:n], z[n:], t)

        residual_jacobian: Callable[[FloatArray, float], FloatArray] | None = None
        if ocp.constraint_jacobian is not None:
            original_constraint_jacobian = ocp.constraint_jacobian

            def stacked_jacobian(z: FloatArray, t: float) -> FloatArray:
                c_x, d_u = original_constraint_jacobian(z[:n], z[n:], t)
                return np.hstack([c_x, d_u])

            residual_jacobian = stacked_jacobian

        running_terms.append(
            PenaltyCost(residual, penalty_weight, n + m, jacobian=residual_jacobian)
        )

    augmented = OcpDefinition(
        state_dim=n + m,
        input_dim=m,
        dynamics=dynamics,
        state_cost=SumCost(running_terms),
        input_cost=QuadraticInputCost(rate_weight),
        terminal_cost=EmbeddedCost(ocp.terminal_cost, 0, n, n + m),
        horizon=ocp.horizon,
        node_count=ocp.node_count,
        start_time=ocp.start_time,
        initial_input=lambda t: np.zeros(m),
        vectorized=ocp.vectorized,
    )
    return AugmentedOcp(original=ocp, bank=bank, ocp=augmented)
