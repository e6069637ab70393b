"""Human sketch observation model.

An operator circles a region of the display; the sketch reduces to the set of
particles it encloses. Conditioned on a reliability a in [0, 1], a sketch
enclosing M particles has likelihood a^d * (1-a)^(M-d) at a candidate
particle, where d is 1 inside the sketch and 0 outside: every enclosed
particle acts as one draw, and at most one of them can be the target.

The tracker never knows a. It keeps a Beta(alpha, beta) posterior per operator
and fuses the sketch through the reliability-marginalized likelihood

    integral_0^1 (a^d (1-a)^(M-d))^w_h Beta(a; alpha, beta) da
        = B(w_h d + alpha, w_h (M - d) + beta) / B(alpha, beta),

which takes exactly two values over the grid (inside / outside). The fusion
weight w_h enters here, inside the marginalization, and must not be applied
again downstream.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import betaln

from .errors import EmptySketchError
from .grid import ParticleGrid, Polygon, polygon_mask
from .validation import check_mask, check_positive, check_probability, check_scalar

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReliabilityState:
    """Beta(alpha, beta) posterior over one operator's reliability."""

    alpha: float
    beta: float
    operator_id: str = ""

    def __post_init__(self):
        check_positive(self.alpha, "alpha")
        check_positive(self.beta, "beta")

    @property
    def mean(self) -> float:
        return self.alpha / (self.alpha + self.beta)

    @property
    def variance(self) -> float:
        s = self.alpha + self.beta
        return self.alpha * self.beta / (s * s * (s + 1.0))


@dataclass(frozen=True)
class SketchObservation:
    """One sketch: operator id, enclosing polygon, particle mask, count, tick."""

    operator_id: str
    mask: np.ndarray
    t: int
    polygon: Polygon | None = None

    def __post_init__(self):
        if not isinstance(self.operator_id, str) or not self.operator_id:
            raise ValueError("operator_id must be a non-empty string")
        mask = np.ascontiguousarray(np.asarray(self.mask, dtype=bool).reshape(-1))
        if mask.sum() < 1:
            raise EmptySketchError("sketch mask encloses no particle")
        mask.flags.writeable = False
        object.__setattr__(self, "mask", mask)

    @property
    def n_enclosed(self) -> int:
        return int(self.mask.sum())

    @classmethod
    def from_polygon(cls, grid: ParticleGrid, polygon: Polygon, operator_id: str,
                     t: int) -> "SketchObservation":
        mask = polygon_mask(grid, polygon)
        return cls(operator_id=operator_id, mask=mask, t=t, polygon=polygon)


def single_draw_likelihood(a: float, match: bool) -> float:
    """Likelihood of one drawn particle: a if it is the target, else 1 - a."""
    a = check_probability(a, "a")
    return a if match else 1.0 - a


def multi_draw_likelihood(a: float, n_enclosed: int, match: bool) -> float:
    """Likelihood of an M-particle sketch at a fixed reliability a.

    match means the candidate particle is one of the enclosed set.
    """
    a = check_probability(a, "a")
    m = int(n_enclosed)
    if m < 1:
        raise ValueError(f"n_enclosed must be >= 1, got {n_enclosed}")
    d = 1 if match else 0
    return a ** d * (1.0 - a) ** (m - d)


def marginal_log_values(rel: ReliabilityState, w_h: float, n_enclosed: int) -> tuple[float, float]:
    """Log of the marginalized sketch likelihood (inside, outside).

    log B(w_h d + alpha, w_h (M - d) + beta) - log B(alpha, beta) for d = 1, 0.
    Exact zeros for w_h = 0: a weightless operator has no influence.
    """
    w_h = check_scalar(w_h, "w_h", minimum=0.0)
    m = int(n_enclosed)
    if m < 1:
        raise ValueError(f"n_enclosed must be >= 1, got {n_enclosed}")
    log_norm = betaln(rel.alpha, rel.beta)
    log_in = betaln(w_h + rel.alpha, w_h * (m - 1) + rel.beta) - log_norm
    log_out = betaln(rel.alpha, w_h * m + rel.beta) - log_norm
    return float(log_in), float(log_out)


def marginal_sketch_likelihood(sketch: SketchObservation, rel: ReliabilityState,
                               w_h: float, n_particles: int | None = None) -> np.ndarray:
    """Per-particle marginalized sketch likelihood vector (linear space).

    The vector takes the inside value on masked particles and the outside value
    elsewhere; a whole-grid mask is therefore constant and carries no
    information (flagged). The weight w_h is already folded in.
    """
    n = len(sketch.mask) if n_particles is None else int(n_particles)
    mask = check_mask(sketch.mask, n, "sketch.mask")
    log_in, log_out = marginal_log_values(rel, w_h, sketch.n_enclosed)
    if sketch.n_enclosed == n:
        logger.info("operator %s sketch covers the whole grid: zero information",
                    sketch.operator_id)
    return np.where(mask, np.exp(log_in), np.exp(log_out))
