"""Clock-driven gait timing, the swing-foot normal-velocity curve and mode constraints."""

import numpy as np

from loopshaped_mpc.application.services.quadruped_model import foot_velocity
from loopshaped_mpc.domain.models.arrays import BoolArray, FloatArray
from loopshaped_mpc.domain.models.gait import GaitSchedule, LegMode, ModeInfo, SwingProfile
from loopshaped_mpc.domain.models.kinodynamic import LEG_COUNT, input_force
from loopshaped_mpc.domain.models.robot_params import RobotParams

# Rounding applied to the cycle fraction so that t = k * period lands exactly on a boundary.
_PHASE_DECIMALS = 12


def _cycle_fraction(gait: GaitSchedule, t: float, leg: int) -> float:
    fraction = (t / gait.period - gait.offsets[leg]) % 1.0
    return round(fraction, _PHASE_DECIMALS) % 1.0


def mode_at(gait: GaitSchedule, t: float, leg: int) -> ModeInfo:
    """Contact mode of ``leg`` at time ``t`` and the phase within that mode."""
    if t < 0.0:
        raise ValueError(f"gait time must be nonnegative, got {t}")
    fraction = _cycle_fraction(gait, t, leg)
    if fraction < gait.duty_factor:
        return ModeInfo(LegMode.STANCE, fraction / gait.duty_factor)
    return ModeInfo(LegMode.SWING, (fraction - gait.duty_factor) / (1.0 - gait.duty_factor))


def stance_mask(gait: GaitSchedule, t: float) -> BoolArray:
    return np.array([mode_at(gait, t, leg).is_stance for leg in range(LEG_COUNT)])


def constraint_rows(gait: GaitSchedule, t: float) -> int:
    """3 rows per stance leg, 4 per swing leg."""
    stance = int(stance_mask(gait, t).sum())
    return 3 * stance + 4 * (LEG_COUNT - stance)


def swing_reference(
    profile: SwingProfile, phase: float, swing_duration: float
) -> tuple[float, float]:
    """Normal velocity c and normal displacement of a swinging foot at ``phase`` in [0, 1].

    The foot rises with a smooth cubic to the apex, then descends on a cubic Hermite segment that
    ends at zero displacement with the touchdown velocity. The descent is as long as needed to
    reach the touchdown velocity without overshooting the apex, but never more than half the swing.
    """
    if not 0.0 <= phase <= 1.0:
        raise ValueError(f"swing phase must lie in [0, 1], got {phase}")
    if not swing_duration > 0.0:
        raise ValueError("swing duration must be positive")
    height = profile.apex_height
    touchdown = profile.touchdown_velocity
    apex_time = max(0.5 * swing_duration, swing_duration - 2.0 * height / abs(touchdown))
    descent = swing_duration - apex_time
    t = phase * swing_duration

    if t <= apex_time:
        s = t / apex_time
        return 6.0 * height * (s - s**2) / apex_time, height * (3.0 * s**2 - 2.0 * s**3)

    sigma = (t - apex_time) / descent
    displacement = height * (1.0 - 3.0 * sigma**2 + 2.0 * sigma**3) + descent * touchdown * (
        sigma**3 - sigma**2
    )
    rate = height * (6.0 * sigma**2 - 6.0 * sigma) + descent * touchdown * (
        3.0 * sigma**2 - 2.0 * sigma
    )
    return rate / descent, displacement


def mode_constraints(
    x: FloatArray,
    u: FloatArray,
    t: float,
    gait: GaitSchedule,
    profile: SwingProfile,
    params: RobotParams,
) -> FloatArray:
    """Equality residuals of the contact schedule; accepts stacked (x, u).

    Stance legs keep their foot still (three rows). Swing legs follow the swing curve along the
    terrain normal (one row) and carry no force (three rows). Rows are ordered by leg.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    velocities = foot_velocity(x, u, params)
    rows: list[FloatArray] = []
    for leg in range(LEG_COUNT):
        info = mode_at(gait, t, leg)
        if info.is_stance:
            rows.append(velocities[..., leg, :])
            continue
        target, _ = swing_reference(profile, info.phase, gait.swing_duration)
        normal_rate = velocities[..., leg, :] @ gait.normal
        rows.append((normal_rate - target)[..., None])
        rows.append(u[..., input_force(leg)])
    return np.concatenate(rows, axis=-1)


def cone_set(gait: GaitSchedule, t: float) -> tuple[BoolArray, FloatArray, float]:
    """Legs whose forces must lie in the friction cone, with the cone's normal and coefficient."""
    return stance_mask(gait, t), np.asarray(gait.normal), gait.friction
