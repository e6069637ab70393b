"""Constant-velocity transition kernel over the particle grid.

Between ticks the target moves by velocity * T_s plus isotropic Gaussian
process noise with per-axis variance (T_s^2 / 2) * sigma_p^2. The velocity
itself follows an independent random walk with per-axis variance
T_s * sigma_p^2, applied by the simulator and optionally estimated by the
tracker; the kernel always encodes a single step with a fixed velocity.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .grid import ParticleGrid
from .validation import check_positive, check_scalar, check_vector2

logger = logging.getLogger(__name__)

# Kernel entries below this (after row normalization) are dropped and the row
# renormalized; keeps large-grid kernels sparse without visible mass loss.
SPARSITY_FLOOR = 1e-12

# Unnormalized row mass below this triggers the nearest-particle fallback.
_LOG_UNDERFLOW = np.log(np.finfo(float).tiny)


@dataclass(frozen=True)
class VelocityState:
    """Current velocity estimate and the configured initial velocity."""

    velocity: np.ndarray
    initial: np.ndarray

    def __post_init__(self):
        v = check_vector2(self.velocity, "velocity")
        v0 = check_vector2(self.initial, "initial")
        for name, arr in (("velocity", v), ("initial", v0)):
            arr = np.ascontiguousarray(arr)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @classmethod
    def at(cls, velocity) -> "VelocityState":
        v = check_vector2(velocity, "velocity")
        return cls(velocity=v, initial=v.copy())


@dataclass(frozen=True)
class TransitionKernel:
    """Row-stochastic one-step transition matrix between grid particles.

    matrix[j, i] is the probability of moving from particle j to particle i.
    """

    matrix: sparse.csr_matrix
    velocity: np.ndarray
    sigma_p: float
    t_s: float

    def __post_init__(self):
        m = self.matrix
        if not sparse.issparse(m):
            m = sparse.csr_matrix(np.asarray(m, dtype=float))
        else:
            m = m.tocsr().astype(float)
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"kernel must be square, got {m.shape}")
        if m.nnz and m.data.min() < 0:
            raise ValueError("kernel entries must be nonnegative")
        row_sums = np.asarray(m.sum(axis=1)).ravel()
        if np.any(np.abs(row_sums - 1.0) > 1e-12):
            worst = float(np.max(np.abs(row_sums - 1.0)))
            raise ValueError(f"kernel rows must sum to 1 within 1e-12 (off by {worst:.3e})")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "velocity", check_vector2(self.velocity, "velocity"))

    @property
    def n_states(self) -> int:
        return self.matrix.shape[0]

    @property
    def position_std(self) -> float:
        """Per-axis standard deviation of the one-step process noise."""
        return float(np.sqrt(self.t_s ** 2 / 2.0) * self.sigma_p)


def transition_std(sigma_p: float, t_s: float) -> float:
    """Per-axis position noise std for one tick: sqrt(T_s^2 / 2) * sigma_p."""
    return float(np.sqrt(t_s ** 2 / 2.0) * sigma_p)


def build_kernel(grid: ParticleGrid, velocity, sigma_p: float, t_s: float) -> TransitionKernel:
    """Discretize the constant-velocity Gaussian step onto the grid.

    Each row j holds the isotropic Gaussian density centered at
    position_j + velocity * T_s, evaluated at every particle and normalized to
    sum 1, which also folds mass that would leave the workspace back onto the
    grid. Rows whose unnormalized mass underflows entirely collapse to a point
    mass at the nearest particle (logged once per kernel build).
    """
    v = check_vector2(velocity, "velocity")
    sigma_p = check_positive(sigma_p, "sigma_p")
    t_s = check_positive(t_s, "t_s")
    var = (t_s ** 2 / 2.0) * sigma_p ** 2

    pos = grid.positions
    means = pos + v * t_s
    # (j, i) squared distances from row means to all particles.
    d2 = ((means[:, None, :] - pos[None, :, :]) ** 2).sum(axis=2)
    log_w = -d2 / (2.0 * var)

    row_max = log_w.max(axis=1)
    truncated = row_max < _LOG_UNDERFLOW
    if np.any(truncated):
        logger.warning("boundary truncation: %d kernel rows collapsed to nearest particle",
                       int(truncated.sum()))

    w = np.exp(log_w - row_max[:, None])
    w /= w.sum(axis=1, keepdims=True)
    if np.any(truncated):
        idx = np.argmax(log_w[truncated], axis=1)
        w[truncated] = 0.0
        w[np.nonzero(truncated)[0], idx] = 1.0

    # Sparsify and renormalize so dropped tail mass never skews rows.
    w[w < SPARSITY_FLOOR] = 0.0
    w /= w.sum(axis=1, keepdims=True)
    matrix = sparse.csr_matrix(w)
    return TransitionKernel(matrix=matrix, velocity=v, sigma_p=sigma_p, t_s=t_s)


def predict(weights: np.ndarray, kernel: TransitionKernel) -> np.ndarray:
    """One Chapman-Kolmogorov step: propagate belief weights through the kernel."""
    q = np.asarray(weights, dtype=float).reshape(-1)
    if q.shape[0] != kernel.n_states:
        raise ValueError(f"belief length {q.shape[0]} != kernel size {kernel.n_states}")
    out = kernel.matrix.T @ q
    total = out.sum()
    if total <= 0.0 or not np.isfinite(total):
        raise ValueError("prediction produced no mass; kernel or belief invalid")
    return out / total


def sample_velocity(state: VelocityState, sigma_p: float, t_s: float,
                    rng: np.random.Generator) -> VelocityState:
    """Velocity random walk: v' ~ N(v, T_s * sigma_p^2 * I)."""
    sigma_p = check_scalar(sigma_p, "sigma_p", minimum=0.0)
    t_s = check_positive(t_s, "t_s")
    std = np.sqrt(t_s) * sigma_p
    v_new = state.velocity + rng.normal(0.0, std, size=2) if std > 0 else state.velocity.copy()
    return VelocityState(velocity=v_new, initial=state.initial)


def velocity_walk_std(sigma_p: float, t_s: float) -> float:
    """Per-axis velocity walk std for one tick: sqrt(T_s) * sigma_p."""
    return float(np.sqrt(t_s) * sigma_p)
