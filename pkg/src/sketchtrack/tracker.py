"""Forward filter: weighted opinion-pool fusion and the joint update step.

One tick = predict through the transition kernel, multiply by the fused
observation likelihood, renormalize, read out MMSE / MAP estimates, then
update each sketching operator's reliability against the new posterior.

Fusion is a weighted product: range likelihoods are raised to their source
weights; sketch vectors arrive already marginalized with their weight folded
in and enter the product as-is. All accumulation happens in log space in
sorted source-id order, so source permutations are bit-identical and scaling
any single likelihood cancels in the normalization.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateLikelihoodError
from .grid import ParticleGrid
from .human import ReliabilityState, SketchObservation, marginal_log_values
from .learning import ReliabilityUpdate, update_reliability
from .motion import TransitionKernel, predict
from .sensors import RangeObservation, range_log_likelihood
from .validation import check_likelihood_vector, check_weight_vector

logger = logging.getLogger(__name__)

BELIEF_ATOL = 1e-12


@dataclass(frozen=True)
class Belief:
    """Discrete posterior over grid particles at tick t."""

    weights: np.ndarray
    t: int = 0

    def __post_init__(self):
        w = check_weight_vector(self.weights, len(np.asarray(self.weights).reshape(-1)),
                                "weights", atol=BELIEF_ATOL)
        w = np.ascontiguousarray(w)
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "t", int(self.t))

    @property
    def n_particles(self) -> int:
        return len(self.weights)

    @classmethod
    def uniform(cls, n_particles: int, t: int = 0) -> "Belief":
        return cls(weights=np.full(n_particles, 1.0 / n_particles), t=t)

    @classmethod
    def point_mass(cls, index: int, n_particles: int, t: int = 0) -> "Belief":
        w = np.zeros(n_particles)
        w[index] = 1.0
        return cls(weights=w, t=t)

    @classmethod
    def from_weights(cls, weights, t: int = 0) -> "Belief":
        """Normalize arbitrary nonnegative weights into a Belief."""
        w = np.asarray(weights, dtype=float).reshape(-1)
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and nonnegative")
        total = w.sum()
        if total <= 0:
            raise ValueError("weights carry no mass")
        return cls(weights=w / total, t=t)


@dataclass(frozen=True)
class FusionWeights:
    """Per-source fusion weights keyed by source id; weights sum to 1."""

    by_source: dict[str, float]

    def __post_init__(self):
        if not self.by_source:
            raise ValueError("at least one source weight required")
        for sid, w in self.by_source.items():
            if not isinstance(sid, str) or not sid:
                raise ValueError("source ids must be non-empty strings")
            if not (0.0 <= w <= 1.0):
                raise ValueError(f"weight for {sid!r} must be in [0, 1], got {w}")
        total = sum(self.by_source.values())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"fusion weights must sum to 1, got {total!r}")
        object.__setattr__(self, "by_source", dict(self.by_source))

    def __getitem__(self, source_id: str) -> float:
        return self.by_source[source_id]

    def __contains__(self, source_id: str) -> bool:
        return source_id in self.by_source


def weight_values(n_sensors: int, m_humans: int) -> tuple[float, float]:
    """Default per-source weights: n/(n^2+m^2) per sensor, m/(n^2+m^2) per human.

    Matches the worked two-sensor one-human split (2/5, 2/5, 1/5) and
    degenerates to 1/n with no humans and 1/m with no sensors.
    """
    n, m = int(n_sensors), int(m_humans)
    if n < 0 or m < 0 or (n == 0 and m == 0):
        raise ValueError(f"need at least one source, got n={n_sensors}, m={m_humans}")
    denom = n * n + m * m
    w_u = n / denom if n else 0.0
    w_h = m / denom if m else 0.0
    # Renormalize for float safety; n*w_u + m*w_h is exactly 1 in exact arithmetic.
    total = n * w_u + m * w_h
    return w_u / total, w_h / total


def assign_weights(sensor_ids, operator_ids) -> FusionWeights:
    """FusionWeights from source-id lists using the default count rule."""
    sensor_ids = list(sensor_ids)
    operator_ids = list(operator_ids)
    overlap = set(sensor_ids) & set(operator_ids)
    if overlap:
        raise ValueError(f"source ids must be distinct across kinds: {sorted(overlap)}")
    w_u, w_h = weight_values(len(sensor_ids), len(operator_ids))
    by_source = {sid: w_u for sid in sensor_ids}
    by_source.update({oid: w_h for oid in operator_ids})
    return FusionWeights(by_source=by_source)


@dataclass(frozen=True)
class ObservationBundle:
    """All observations sharing one tick: range reports plus sketches."""

    t: int
    ranges: tuple[RangeObservation, ...] = ()
    sketches: tuple[SketchObservation, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "ranges", tuple(self.ranges))
        object.__setattr__(self, "sketches", tuple(self.sketches))
        ids = [r.sensor_id for r in self.ranges] + [s.operator_id for s in self.sketches]
        if len(ids) != len(set(ids)):
            raise ValueError("bundle sources must be pairwise distinct")
        for r in self.ranges:
            if r.t is not None and r.t != self.t:
                raise ValueError(f"range from {r.sensor_id} stamped {r.t}, bundle is {self.t}")
        for s in self.sketches:
            if s.t != self.t:
                raise ValueError(f"sketch from {s.operator_id} stamped {s.t}, bundle is {self.t}")


def fuse(sensor_likelihoods: dict[str, np.ndarray],
         sketch_likelihoods: dict[str, np.ndarray],
         weights: FusionWeights) -> np.ndarray:
    """Weighted opinion pool over linear-space likelihood vectors.

    Sensor vectors are raised to their weights; sketch vectors (weight already
    marginalized in) multiply as-is. Returns an unnormalized linear vector
    scaled so its maximum is 1. Raises DegenerateLikelihoodError when the
    product has no mass anywhere.
    """
    sizes = {len(np.asarray(v).reshape(-1))
             for v in list(sensor_likelihoods.values()) + list(sketch_likelihoods.values())}
    if len(sizes) != 1:
        raise ValueError(f"likelihood vectors disagree on grid size: {sorted(sizes)}")
    n = sizes.pop()

    log_entries = []
    with np.errstate(divide="ignore"):
        for sid, vec in sensor_likelihoods.items():
            v = check_likelihood_vector(vec, n, f"sensor {sid}")
            log_entries.append((sid, weights[sid] * np.log(v)))
        for oid, vec in sketch_likelihoods.items():
            v = check_likelihood_vector(vec, n, f"sketch {oid}")
            log_entries.append((oid, np.log(v)))
    return _fuse_log(log_entries, n)


def _fuse_log(log_entries: list[tuple[str, np.ndarray]], n_particles: int) -> np.ndarray:
    """Accumulate log-likelihood terms in sorted source order, exponentiate."""
    total = np.zeros(n_particles)
    for _, term in sorted(log_entries, key=lambda e: e[0]):
        total = total + term
    peak = np.max(total)
    if not np.isfinite(peak):
        raise DegenerateLikelihoodError("fused likelihood carries no mass")
    return np.exp(total - peak)


def update(belief: Belief, fused: np.ndarray) -> tuple[Belief, bool]:
    """Multiplicative Bayes update; keeps the prior when the product is degenerate.

    Returns (posterior, degenerate_flag).
    """
    v = check_likelihood_vector(fused, belief.n_particles, "fused")
    post = belief.weights * v
    total = post.sum()
    if total <= 0.0 or not np.isfinite(total):
        logger.warning("degenerate posterior at t=%d: keeping prior", belief.t)
        return Belief(weights=belief.weights.copy(), t=belief.t), True
    return Belief(weights=post / total, t=belief.t), False


def mmse_estimate(belief: Belief, grid: ParticleGrid) -> np.ndarray:
    """Posterior-mean position: sum_i q_i * position_i."""
    if belief.n_particles != grid.n_particles:
        raise ValueError("belief and grid disagree on particle count")
    return grid.positions.T @ belief.weights


def map_estimate(belief: Belief, grid: ParticleGrid) -> np.ndarray:
    """Highest-weight particle position; ties break to the lowest index."""
    if belief.n_particles != grid.n_particles:
        raise ValueError("belief and grid disagree on particle count")
    return grid.positions[int(np.argmax(belief.weights))].copy()


@dataclass(frozen=True)
class StepResult:
    """Output of one joint filter step."""

    belief: Belief
    reliabilities: dict[str, ReliabilityState]
    mmse: np.ndarray
    map_point: np.ndarray
    degenerate: bool = False
    skipped_sources: tuple[str, ...] = ()
    reliability_updates: tuple[ReliabilityUpdate, ...] = ()


def joint_step(belief: Belief, kernel: TransitionKernel, bundle: ObservationBundle,
               reliabilities: dict[str, ReliabilityState], *, grid: ParticleGrid,
               weights: FusionWeights, variance_mode: str = "paper") -> StepResult:
    """Predict, fuse, update, estimate, then learn reliabilities.

    The bundle must be stamped one tick after the belief. Undetected range
    reports are uninformative and skipped. Reliability updates run after the
    posterior update, against the new posterior, in sorted operator order.
    """
    if bundle.t != belief.t + 1:
        raise ValueError(f"bundle t={bundle.t} must follow belief t={belief.t}")

    predicted = Belief(weights=predict(belief.weights, kernel), t=belief.t + 1)

    log_entries: list[tuple[str, np.ndarray]] = []
    skipped: list[str] = []
    for obs in bundle.ranges:
        if obs.sensor_id not in weights:
            raise ValueError(f"no fusion weight for sensor {obs.sensor_id!r}")
        if not obs.detected:
            skipped.append(obs.sensor_id)
            continue
        log_entries.append((obs.sensor_id,
                            weights[obs.sensor_id] * range_log_likelihood(grid, obs)))
    for sketch in bundle.sketches:
        if sketch.operator_id not in weights:
            raise ValueError(f"no fusion weight for operator {sketch.operator_id!r}")
        log_in, log_out = marginal_log_values(
            reliabilities[sketch.operator_id], weights[sketch.operator_id],
            sketch.n_enclosed)
        log_entries.append((sketch.operator_id,
                            np.where(sketch.mask, log_in, log_out)))

    degenerate = False
    if log_entries:
        try:
            fused = _fuse_log(log_entries, grid.n_particles)
            posterior, degenerate = update(predicted, fused)
        except DegenerateLikelihoodError:
            logger.warning("degenerate fused likelihood at t=%d: keeping prediction", bundle.t)
            posterior, degenerate = predicted, True
    else:
        posterior = predicted

    new_reliabilities = dict(reliabilities)
    updates: list[ReliabilityUpdate] = []
    for sketch in sorted(bundle.sketches, key=lambda s: s.operator_id):
        result = update_reliability(
            new_reliabilities[sketch.operator_id], sketch, posterior.weights,
            weights[sketch.operator_id], variance_mode=variance_mode)
        new_reliabilities[sketch.operator_id] = result.state
        updates.append(result)

    return StepResult(
        belief=posterior,
        reliabilities=new_reliabilities,
        mmse=mmse_estimate(posterior, grid),
        map_point=map_estimate(posterior, grid),
        degenerate=degenerate,
        skipped_sources=tuple(skipped),
        reliability_updates=tuple(updates),
    )


@dataclass
class Tracker:
    """Stateful wrapper around joint_step with optional velocity estimation.

    velocity_mode "fixed" keeps the configured velocity; "mmse-diff" tracks the
    exponentially smoothed finite difference of successive MMSE estimates
    (smoothing factor 0.5) and rebuilds the kernel as the estimate moves.
    """

    grid: ParticleGrid
    weights: FusionWeights
    belief: Belief
    reliabilities: dict[str, ReliabilityState]
    sigma_p: float
    t_s: float
    velocity: np.ndarray
    velocity_mode: str = "fixed"
    variance_mode: str = "paper"
    _kernel: TransitionKernel | None = field(default=None, repr=False)
    _kernel_cache: dict = field(default_factory=dict, repr=False)
    _last_mmse: np.ndarray | None = field(default=None, repr=False)

    SMOOTHING = 0.5
    _CACHE_LIMIT = 256

    def __post_init__(self):
        if self.velocity_mode not in ("fixed", "mmse-diff"):
            raise ValueError(f"velocity_mode must be 'fixed' or 'mmse-diff', "
                             f"got {self.velocity_mode!r}")
        self.velocity = np.asarray(self.velocity, dtype=float).reshape(2).copy()

    def kernel(self) -> TransitionKernel:
        from .motion import build_kernel  # local import keeps module deps one-way

        key = (round(float(self.velocity[0]), 3), round(float(self.velocity[1]), 3))
        cached = self._kernel_cache.get(key)
        if cached is None:
            if len(self._kernel_cache) >= self._CACHE_LIMIT:
                self._kernel_cache.clear()
            cached = build_kernel(self.grid, np.array(key), self.sigma_p, self.t_s)
            self._kernel_cache[key] = cached
        return cached

    def step(self, bundle: ObservationBundle) -> StepResult:
        result = joint_step(self.belief, self.kernel(), bundle, self.reliabilities,
                            grid=self.grid, weights=self.weights,
                            variance_mode=self.variance_mode)
        if self.velocity_mode == "mmse-diff" and self._last_mmse is not None:
            observed = (result.mmse - self._last_mmse) / self.t_s
            self.velocity = (1.0 - self.SMOOTHING) * self.velocity + self.SMOOTHING * observed
        self._last_mmse = result.mmse.copy()
        self.belief = result.belief
        self.reliabilities = result.reliabilities
        return result
