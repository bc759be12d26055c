"""LTI utilities: transfer-function evaluation, realizations and LQR synthesis."""

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial
from scipy import linalg

from loopshaped_mpc.domain.models.arrays import ComplexArray, FloatArray
from loopshaped_mpc.domain.models.errors import (
    DimensionMismatchError,
    EvaluationAtPoleError,
    SynthesisError,
    UnsupportedStructureError,
)
from loopshaped_mpc.domain.models.state_space import StateSpaceRealization
from loopshaped_mpc.domain.models.transfer_function import RationalTransferFunction

logger = logging.getLogger(__name__)

# Condition number of (jwI - A) above which the sample is treated as a pole.
POLE_CONDITION_LIMIT = 1e14
ARE_RESIDUAL_TOLERANCE = 1e-8


@dataclass(frozen=True, eq=False)
class LqrResult:
    """Infinite-horizon continuous-time LQR design, u = -K x."""

    gain: FloatArray
    cost_to_go: FloatArray
    closed_loop_eigenvalues: ComplexArray
    residual: float


def tf_eval(tf: RationalTransferFunction, omega: float) -> complex:
    """Evaluate ``tf`` at s = j*omega.

    Raises:
        ValueError: If ``omega`` is negative.
        EvaluationAtPoleError: If the denominator vanishes at ``omega``.
    """
    if omega < 0.0:
        raise ValueError(f"frequency must be nonnegative, got {omega}")
    s = 1j * omega
    denominator = complex(polynomial.polyval(s, tf.denominator))
    if denominator == 0.0:
        raise EvaluationAtPoleError(f"transfer function has a pole at omega={omega}")
    return complex(polynomial.polyval(s, tf.numerator)) / denominator


def ss_freq_response(ss: StateSpaceRealization, omega: float) -> ComplexArray:
    """Frequency response C (jwI - A)^-1 B + D as a (p, m) complex matrix."""
    d = ss.d.astype(np.complex128)
    if ss.n_states == 0:
        return d
    resolvent = 1j * omega * np.eye(ss.n_states) - ss.a
    condition = np.linalg.cond(resolvent)
    if not math.isfinite(condition) or condition > POLE_CONDITION_LIMIT:
        raise EvaluationAtPoleError(f"j*{omega} is (numerically) an eigenvalue of A")
    try:
        transfer = np.linalg.solve(resolvent, ss.b.astype(np.complex128))
    except np.linalg.LinAlgError as exc:
        raise EvaluationAtPoleError(f"j*{omega} is an eigenvalue of A") from exc
    return ss.c @ transfer + d


def balanced_first_order(tf: RationalTransferFunction) -> StateSpaceRealization:
    """Closed-form balanced realization of a first-order proper transfer function.

    (c0 + c1 s) / (d0 + d1 s) = D + k / (s - a) with a = -d0/d1; the residue k is split as
    B = sqrt|k|, C = sign(k) sqrt|k| so that |B| = |C|. A static ``tf`` (degree zero, or a
    cancelled residue) yields a realization without states.

    Raises:
        UnsupportedStructureError: For improper, higher-order or unstable transfer functions.
    """
    if not tf.is_proper:
        raise UnsupportedStructureError("improper transfer functions have no realization")
    if tf.denominator_degree == 0:
        return StateSpaceRealization.static_gain(tf.dc_gain)
    if tf.denominator_degree > 1:
        raise UnsupportedStructureError(
            f"only first-order filters are realized, got degree {tf.denominator_degree}"
        )

    d0, d1 = tf.denominator
    c0 = tf.numerator[0]
    c1 = tf.numerator[1] if tf.numerator_degree == 1 else 0.0
    feedthrough = c1 / d1
    pole = -d0 / d1
    if pole >= 0.0:
        raise UnsupportedStructureError(f"filter pole {pole} is not in the open left half-plane")
    residue = (c0 - feedthrough * d0) / d1
    if residue == 0.0:
        return StateSpaceRealization.static_gain(feedthrough)

    magnitude = math.sqrt(abs(residue))
    return StateSpaceRealization(
        a=np.array([[pole]]),
        b=np.array([[magnitude]]),
        c=np.array([[math.copysign(magnitude, residue)]]),
        d=np.array([[feedthrough]]),
    )


def lqr_gain(a: FloatArray, b: FloatArray, q: FloatArray, r: FloatArray) -> LqrResult:
    """Continuous-time LQR gain from the stabilizing solution of the algebraic Riccati equation.

    Raises:
        DimensionMismatchError: If the matrices do not fit together.
        SynthesisError: If R is not positive definite, Q is indefinite, the pair is not
            stabilizable, or the solution fails its residual or stability checks.
    """
    a, b, q, r = (np.atleast_2d(np.asarray(m, dtype=float)) for m in (a, b, q, r))
    n, m = b.shape
    if a.shape != (n, n) or q.shape != (n, n) or r.shape != (m, m):
        raise DimensionMismatchError(
            f"LQR needs A {(n, n)}, Q {(n, n)}, R {(m, m)}; got {a.shape}, {q.shape}, {r.shape}"
        )
    if not np.allclose(r, r.T) or np.min(np.linalg.eigvalsh(r)) <= 0.0:
        raise SynthesisError("input weight R must be symmetric positive definite")
    q_scale = max(1.0, float(np.max(np.abs(q))))
    if not np.allclose(q, q.T) or np.min(np.linalg.eigvalsh(q)) < -1e-12 * q_scale:
        raise SynthesisError("state weight Q must be symmetric positive semidefinite")

    try:
        cost_to_go = linalg.solve_continuous_are(a, b, q, r)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SynthesisError(
            f"algebraic Riccati equation has no stabilizing solution: {exc}"
        ) from exc
    if not np.all(np.isfinite(cost_to_go)):
        raise SynthesisError("algebraic Riccati equation returned a non-finite solution")

    gain = np.linalg.solve(r, b.T @ cost_to_go)
    eigenvalues = np.linalg.eigvals(a - b @ gain)
    if np.max(eigenvalues.real) >= 0.0:
        raise SynthesisError(
            f"closed loop is not Hurwitz, max real part {np.max(eigenvalues.real):.3e}"
        )

    residual_matrix = a.T @ cost_to_go + cost_to_go @ a - cost_to_go @ b @ gain + q
    residual = float(np.max(np.abs(residual_matrix)))
    bound = ARE_RESIDUAL_TOLERANCE * (1.0 + float(np.linalg.norm(cost_to_go)))
    if residual > bound:
        raise SynthesisError(f"Riccati residual {residual:.3e} exceeds {bound:.3e}")
    logger.debug(f"LQR synthesized for n={n}, m={m}; residual {residual:.3e}")

    return LqrResult(
        gain=gain,
        cost_to_go=cost_to_go,
        closed_loop_eigenvalues=eigenvalues,
        residual=residual,
    )
