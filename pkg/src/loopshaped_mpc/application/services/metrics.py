"""Force-tracking and smoothness metrics."""

import math

import numpy as np
from scipy.integrate import trapezoid
from scipy.signal import periodogram

from loopshaped_mpc.domain.models.arrays import FloatArray
from loopshaped_mpc.domain.models.episode_log import EpisodeLog
from loopshaped_mpc.domain.models.errors import MisalignedSeriesError
from loopshaped_mpc.domain.models.kinodynamic import LEG_COUNT
from loopshaped_mpc.domain.models.metrics_report import MetricsReport


def metrics_mae_mse(
    desired: FloatArray, measured: FloatArray, times: FloatArray
) -> tuple[float, float]:
    """Time-averaged absolute and squared error, by trapezoidal quadrature.

    Vector series (one column per component) reduce to the mean of the component metrics.

    Raises:
        MisalignedSeriesError: If the series and the time base differ in length or the time
            base spans no time.
    """
    desired = np.asarray(desired, dtype=float)
    measured = np.asarray(measured, dtype=float)
    times = np.asarray(times, dtype=float)
    if desired.shape != measured.shape or desired.shape[0] != times.shape[0]:
        raise MisalignedSeriesError(
            f"series shapes {desired.shape} and {measured.shape} do not share the time base "
            f"of {times.shape[0]} samples"
        )
    duration = float(times[-1] - times[0]) if times.size else 0.0
    if not duration > 0.0:
        raise MisalignedSeriesError("metrics need at least two samples spanning positive time")
    error = measured - desired
    mae = trapezoid(np.abs(error), times, axis=0) / duration
    mse = trapezoid(error**2, times, axis=0) / duration
    return float(np.mean(mae)), float(np.mean(mse))


def spectral_power_above(series: FloatArray, sample_rate: float, cutoff: float) -> float:
    """Fraction of the Hann-windowed periodogram power at or above ``cutoff`` rad/s.

    The mean is removed first; a constant series has no power and yields 0.

    Raises:
        ValueError: If the cutoff lies above the Nyquist frequency.
    """
    cutoff_hz = cutoff / (2.0 * math.pi)
    if cutoff_hz > sample_rate / 2.0:
        raise ValueError(
            f"cutoff {cutoff} rad/s is above the Nyquist frequency "
            f"{math.pi * sample_rate:.3f} rad/s"
        )
    values = np.asarray(series, dtype=float)
    frequencies, power = periodogram(
        values - values.mean(), fs=sample_rate, window="hann", detrend=False
    )
    total = float(power.sum())
    if total <= 0.0:
        return 0.0
    return float(power[frequencies >= cutoff_hz].sum() / total)


def episode_metrics(
    log: EpisodeLog, start: float | None = None, power_cutoff: float | None = None
) -> MetricsReport:
    """Normal-force tracking of every leg, planned against realized, from ``start`` on."""
    window = log if start is None else log.window(start, float(log.times[-1]))
    leg_mae: list[float] = []
    leg_mse: list[float] = []
    for leg in range(LEG_COUNT):
        column = 3 * leg + 2
        mae, mse = metrics_mae_mse(
            window.planned_forces[:, column], window.realized_forces[:, column], window.times
        )
        leg_mae.append(mae)
        leg_mse.append(mse)

    high_frequency = None
    if power_cutoff is not None and window.sample_count > 1:
        sample_rate = 1.0 / float(window.times[1] - window.times[0])
        fractions = [
            spectral_power_above(window.planned_forces[:, 3 * leg + 2], sample_rate, power_cutoff)
            for leg in range(LEG_COUNT)
        ]
        high_frequency = float(np.mean(fractions))

    heights = window.base_heights
    failure_speed = None
    if log.verdict.failed and log.sample_count:
        failure_speed = float(log.commanded_speeds[-1])
    return MetricsReport(
        leg_mae=tuple(leg_mae),
        leg_mse=tuple(leg_mse),
        mae=float(np.mean(leg_mae)),
        mse=float(np.mean(leg_mse)),
        high_frequency_fraction=high_frequency,
        base_height_min=float(heights.min()),
        base_height_max=float(heights.max()),
        failure_speed=failure_speed,
    )
