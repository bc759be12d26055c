"""Loop-gain and robust-stability analysis of LQR designs, with and without input shaping."""

import logging

import numpy as np

from loopshaped_mpc.application.services.loopshaping import make_filter_bank
from loopshaped_mpc.application.services.lti_core import lqr_gain, ss_freq_response
from loopshaped_mpc.domain.models.arrays import ComplexArray, FloatArray
from loopshaped_mpc.domain.models.errors import DimensionMismatchError, EvaluationAtPoleError
from loopshaped_mpc.domain.models.loop_analysis import LoopAnalysis
from loopshaped_mpc.domain.models.shaping_spec import ShapingSpec
from loopshaped_mpc.domain.models.state_space import StateSpaceRealization

logger = logging.getLogger(__name__)

_SINGULAR_CONDITION = 1e12


def default_frequency_grid(points: int = 200) -> FloatArray:
    """Log-spaced grid over [1e-2, 1e4] rad/s."""
    return np.logspace(-2.0, 4.0, points)


def _margin(sample: ComplexArray) -> float:
    if not np.all(np.isfinite(sample)) or np.linalg.cond(sample) > _SINGULAR_CONDITION:
        return float("nan")
    return_difference = np.eye(sample.shape[0]) + np.linalg.inv(sample)
    return float(np.linalg.svd(return_difference, compute_uv=False)[-1])


def stability_margin(frequencies: FloatArray, loop_gains: ComplexArray) -> LoopAnalysis:
    """Smallest singular value of I + GK(jw)^-1 at every sample.

    SISO gains may be passed as a vector. Samples with a singular loop gain get a NaN margin.
    """
    gains = np.asarray(loop_gains, dtype=np.complex128)
    if gains.ndim == 1:
        gains = gains[:, None, None]
    margins = np.array([_margin(sample) for sample in gains])
    singular = int(np.isnan(margins).sum())
    if singular:
        logger.warning(f"Loop gain singular at {singular} of {margins.size} frequencies")
    return LoopAnalysis(frequencies=frequencies, loop_gains=gains, margins=margins)


def is_robust(analysis: LoopAnalysis, bound: FloatArray) -> bool:
    """True when the uncertainty bound l_m(w) stays below the margin wherever it is defined."""
    bound = np.broadcast_to(np.asarray(bound, dtype=float), analysis.margins.shape)
    defined = ~np.isnan(analysis.margins)
    return bool(np.all(bound[defined] < analysis.margins[defined]))


def _controller_realization(
    bank_a: FloatArray,
    bank_b: FloatArray,
    bank_c: FloatArray,
    bank_d: FloatArray,
    gain: FloatArray,
    n: int,
) -> StateSpaceRealization:
    """Map from the plant state x to the plant input u for the feedback nu = -K (x, x_s)."""
    k_x, k_s = gain[:, :n], gain[:, n:]
    return StateSpaceRealization(
        a=bank_a - bank_b @ k_s,
        b=-bank_b @ k_x,
        c=bank_c - bank_d @ k_s,
        d=-bank_d @ k_x,
    )


def loop_gain_compare(
    plant: StateSpaceRealization,
    q: FloatArray,
    r: FloatArray,
    spec: ShapingSpec,
    frequencies: FloatArray | None = None,
) -> tuple[LoopAnalysis, LoopAnalysis]:
    """Loop gains broken at the plant input for the plain and the shaped LQR design.

    The shaped design solves LQR on the filter-augmented plant with the state weight padded by
    zeros; its loop closes through the filter states at the original input.

    Raises:
        DimensionMismatchError: If the plant is not single-input.
        SynthesisError: Propagated from either LQR design.
    """
    if plant.n_inputs != 1 or len(spec) != 1:
        raise DimensionMismatchError("loop gain comparison needs a single-input plant and spec")
    grid = default_frequency_grid() if frequencies is None else np.asarray(frequencies)
    n = plant.n_states
    state_to_state = StateSpaceRealization(plant.a, plant.b, np.eye(n), np.zeros((n, 1)))

    baseline_gain = lqr_gain(plant.a, plant.b, q, r).gain
    bank = make_filter_bank(spec)
    n_s = bank.n_states
    a_aug = np.block([[plant.a, plant.b @ bank.c], [np.zeros((n_s, n)), bank.a]])
    b_aug = np.vstack([plant.b @ bank.d, bank.b])
    q_aug = np.zeros((n + n_s, n + n_s))
    q_aug[:n, :n] = q
    shaped_gain = lqr_gain(a_aug, b_aug, q_aug, r).gain
    controller = _controller_realization(bank.a, bank.b, bank.c, bank.d, shaped_gain, n)

    baseline = np.empty((grid.size, 1, 1), dtype=np.complex128)
    shaped = np.empty((grid.size, 1, 1), dtype=np.complex128)
    for k, omega in enumerate(grid):
        try:
            plant_response = ss_freq_response(state_to_state, float(omega))
        except EvaluationAtPoleError:
            baseline[k] = shaped[k] = np.nan
            continue
        baseline[k] = baseline_gain @ plant_response
        shaped[k] = -ss_freq_response(controller, float(omega)) @ plant_response
    logger.info(
        f"Loop gains compared on {grid.size} frequencies, {n_s} filter state(s) in the shaped loop"
    )
    return stability_margin(grid, baseline), stability_margin(grid, shaped)
