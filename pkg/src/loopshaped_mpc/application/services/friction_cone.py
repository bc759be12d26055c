"""Euclidean projection onto the second-order friction cone."""

import numpy as np

from loopshaped_mpc.domain.models.arrays import FloatArray


def project_to_cone(force: FloatArray, normal: FloatArray, friction: float) -> FloatArray:
    """Nearest point of {f : |f_t| <= mu f.n} to ``force``; accepts stacked (..., 3) forces.

    Forces inside the cone are returned unchanged, forces in the polar cone map to zero and
    everything else lands on the cone surface.
    """
    if not friction > 0.0:
        raise ValueError(f"friction coefficient must be positive, got {friction}")
    force = np.asarray(force, dtype=float)
    normal = np.asarray(normal, dtype=float)
    normal = normal / np.linalg.norm(normal)

    normal_part = force @ normal
    tangential = force - normal_part[..., None] * normal
    tangential_norm = np.linalg.norm(tangential, axis=-1)

    inside = tangential_norm <= friction * normal_part
    polar = friction * tangential_norm <= -normal_part
    surface_normal = (normal_part + friction * tangential_norm) / (1.0 + friction**2)
    with np.errstate(invalid="ignore", divide="ignore"):
        direction = np.where(
            tangential_norm[..., None] > 0.0,
            tangential / np.where(tangential_norm > 0.0, tangential_norm, 1.0)[..., None],
            0.0,
        )
    projected = surface_normal[..., None] * (normal + friction * direction)

    result = np.where(inside[..., None], force, projected)
    return np.where(polar[..., None], 0.0, result)


def in_cone(
    force: FloatArray, normal: FloatArray, friction: float, tolerance: float = 1e-9
) -> bool:
    """True when every stacked force lies in the cone up to ``tolerance``."""
    force = np.asarray(force, dtype=float)
    normal = np.asarray(normal, dtype=float) / np.linalg.norm(normal)
    normal_part = force @ normal
    tangential = force - normal_part[..., None] * normal
    return bool(
        np.all(np.linalg.norm(tangential, axis=-1) <= friction * normal_part + tolerance)
    )
