"""Range sensor observation model.

Each UAV reports the 3D slant range from its camera position to the target,
gated by a Bernoulli detection flag. The target lives on the ground plane, so
particle i is lifted to (x_i, y_i, 0) before the distance is taken.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .grid import CameraPose, ParticleGrid
from .validation import check_positive, check_scalar

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RangeObservation:
    """One range report: sensor id, measured range, detection flag, pose, noise."""

    sensor_id: str
    range: float
    detected: bool
    pose: CameraPose
    sigma_d: float
    t: int | None = None

    def __post_init__(self):
        if not isinstance(self.sensor_id, str) or not self.sensor_id:
            raise ValueError("sensor_id must be a non-empty string")
        check_positive(self.sigma_d, "sigma_d")
        object.__setattr__(self, "detected", bool(self.detected))
        if self.detected:
            check_scalar(self.range, "range", minimum=0.0)
        else:
            object.__setattr__(self, "range", 0.0)


def particle_ranges(grid: ParticleGrid, pose: CameraPose) -> np.ndarray:
    """Slant range from the camera to every particle lifted onto z = 0."""
    diff = grid.positions - pose.position[None, :2]
    return np.sqrt((diff ** 2).sum(axis=1) + pose.altitude ** 2)


def range_log_likelihood(grid: ParticleGrid, obs: RangeObservation) -> np.ndarray:
    """Per-particle log N(range; r_i, sigma_d^2); zeros when not detected.

    A missed detection carries no information about where the target is, so
    the likelihood is uniform (all ones in linear space, logged here).
    """
    if not obs.detected:
        logger.info("sensor %s: no detection, uniform likelihood", obs.sensor_id)
        return np.zeros(grid.n_particles)
    r = particle_ranges(grid, obs.pose)
    resid = obs.range - r
    return -0.5 * (resid / obs.sigma_d) ** 2 - np.log(obs.sigma_d * np.sqrt(2.0 * np.pi))


def range_likelihood(grid: ParticleGrid, obs: RangeObservation) -> np.ndarray:
    """Linear-space range likelihood vector (ones when not detected)."""
    if not obs.detected:
        logger.info("sensor %s: no detection, uniform likelihood", obs.sensor_id)
        return np.ones(grid.n_particles)
    return np.exp(range_log_likelihood(grid, obs))
