"""Scenario simulation: synthetic truth, sensors, and sketching operators.

A scenario is fully described by a ScenarioConfig (serializable to YAML).
Running it generates one shared truth trajectory and one shared observation
sequence per seed, then filters that sequence once per requested mode
("autonomous" uses only the range sensors, "fused" adds the operators), so
mode comparisons are paired draw-for-draw. Every entity (truth, each sensor,
each operator) consumes its own RNG stream spawned from the scenario seed,
which keeps the shared inputs identical no matter which modes run.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .errors import ConfigError, EmptySketchError
from .grid import Bounds, CameraPose, ParticleGrid, Polygon, build_grid, points_in_polygon
from .human import ReliabilityState, SketchObservation
from .sensors import RangeObservation
from .tracker import (Belief, FusionWeights, ObservationBundle, Tracker,
                      assign_weights)

logger = logging.getLogger(__name__)

MODES = ("autonomous", "fused")

# Vertex count of the regular polygon standing in for a drawn disc.
SKETCH_POLYGON_VERTICES = 24


@dataclass(frozen=True)
class SensorConfig:
    """One range sensor: a camera hovering at a fixed station and altitude."""

    id: str
    altitude: float
    sigma_d: float = 0.05
    p_d: float = 0.95
    station: tuple[float, float] | None = None

    def __post_init__(self):
        if not self.id:
            raise ConfigError("sensor id must be non-empty")
        if self.altitude <= 0:
            raise ConfigError(f"sensor {self.id}: altitude must be > 0")
        if self.sigma_d <= 0:
            raise ConfigError(f"sensor {self.id}: sigma_d must be > 0")
        if not (0.0 <= self.p_d <= 1.0):
            raise ConfigError(f"sensor {self.id}: p_d must be in [0, 1]")
        if self.station is not None:
            object.__setattr__(self, "station", (float(self.station[0]), float(self.station[1])))


@dataclass(frozen=True)
class OperatorConfig:
    """One synthetic operator: disc sketches with a given size and accuracy.

    style "enclose" circles where the operator believes the target is (the
    target falls inside with probability p_enclose). style "clearing" circles
    a region the operator can rule out from outside context, synthesized as
    the reflection of the target across the horizontal line y = clear_axis_y;
    the annotation is only drawn when the reflected region is clearly separated
    from the target, and never contains it.
    """

    id: str
    prior: tuple[float, float] = (2.0, 2.0)
    sketch_radius: float = 1.0
    center_error_std: float = 0.15
    p_enclose: float = 0.95
    cadence: int = 15
    phase: int = 0
    style: str = "enclose"
    clear_axis_y: float | None = None

    def __post_init__(self):
        if not self.id:
            raise ConfigError("operator id must be non-empty")
        a, b = self.prior
        if a <= 0 or b <= 0:
            raise ConfigError(f"operator {self.id}: prior must be positive")
        object.__setattr__(self, "prior", (float(a), float(b)))
        if self.sketch_radius <= 0:
            raise ConfigError(f"operator {self.id}: sketch_radius must be > 0")
        if self.center_error_std < 0:
            raise ConfigError(f"operator {self.id}: center_error_std must be >= 0")
        if not (0.0 <= self.p_enclose <= 1.0):
            raise ConfigError(f"operator {self.id}: p_enclose must be in [0, 1]")
        if self.cadence < 1:
            raise ConfigError(f"operator {self.id}: cadence must be >= 1")
        if self.phase < 0:
            raise ConfigError(f"operator {self.id}: phase must be >= 0")
        if self.style not in ("enclose", "clearing"):
            raise ConfigError(f"operator {self.id}: style must be 'enclose' or 'clearing'")
        if self.style == "clearing":
            if self.clear_axis_y is None:
                raise ConfigError(f"operator {self.id}: clearing style needs clear_axis_y")
            object.__setattr__(self, "clear_axis_y", float(self.clear_axis_y))


@dataclass(frozen=True)
class ScenarioConfig:
    """Complete description of a simulated tracking scenario."""

    bounds: tuple[float, float, float, float] = (0.0, 0.0, 10.0, 10.0)
    rows: int = 20
    cols: int = 20
    t_s: float = 0.1
    sigma_p: float = 0.5
    truth_sigma_p: float | None = None
    v0: tuple[float, float] = (1.0, 1.0)
    start: tuple[float, float] = (2.0, 2.0)
    horizon: int = 150
    seed: int = 0
    initial_belief: str = "point"
    velocity_mode: str = "fixed"
    variance_mode: str = "paper"
    sensors: tuple[SensorConfig, ...] = ()
    operators: tuple[OperatorConfig, ...] = ()
    weights: dict[str, float] | None = None
    modes: tuple[str, ...] = MODES

    def __post_init__(self):
        object.__setattr__(self, "bounds", tuple(float(b) for b in self.bounds))
        object.__setattr__(self, "v0", tuple(float(v) for v in self.v0))
        object.__setattr__(self, "start", tuple(float(s) for s in self.start))
        object.__setattr__(self, "sensors", tuple(
            s if isinstance(s, SensorConfig) else SensorConfig(**s) for s in self.sensors))
        object.__setattr__(self, "operators", tuple(
            o if isinstance(o, OperatorConfig) else OperatorConfig(**o) for o in self.operators))
        object.__setattr__(self, "modes", tuple(self.modes))
        if len(self.bounds) != 4:
            raise ConfigError("bounds must be (xmin, ymin, xmax, ymax)")
        if self.rows < 1 or self.cols < 1:
            raise ConfigError("rows and cols must be >= 1")
        if self.t_s <= 0:
            raise ConfigError("t_s must be > 0")
        if self.sigma_p < 0:
            raise ConfigError("sigma_p must be >= 0")
        if self.truth_sigma_p is not None:
            object.__setattr__(self, "truth_sigma_p", float(self.truth_sigma_p))
            if self.truth_sigma_p < 0:
                raise ConfigError("truth_sigma_p must be >= 0")
        if self.horizon < 1:
            raise ConfigError("horizon must be >= 1")
        if self.initial_belief not in ("point", "uniform"):
            raise ConfigError("initial_belief must be 'point' or 'uniform'")
        if self.velocity_mode not in ("fixed", "mmse-diff"):
            raise ConfigError("velocity_mode must be 'fixed' or 'mmse-diff'")
        if self.variance_mode not in ("paper", "exact"):
            raise ConfigError("variance_mode must be 'paper' or 'exact'")
        if not self.sensors:
            raise ConfigError("at least one sensor is required")
        ids = [s.id for s in self.sensors] + [o.id for o in self.operators]
        if len(ids) != len(set(ids)):
            raise ConfigError("sensor and operator ids must be pairwise distinct")
        for mode in self.modes:
            if mode not in MODES:
                raise ConfigError(f"unknown mode {mode!r}; valid modes: {MODES}")
        workspace = self.workspace()
        if not workspace.contains([self.start])[0]:
            raise ConfigError(f"start {self.start} outside bounds {self.bounds}")

    def workspace(self) -> Bounds:
        return Bounds(*self.bounds)

    def truth_noise(self) -> float:
        """Process noise driving the simulated target (defaults to sigma_p)."""
        return self.sigma_p if self.truth_sigma_p is None else self.truth_sigma_p

    def grid(self) -> ParticleGrid:
        return build_grid(self.workspace(), self.rows, self.cols)

    def station_of(self, sensor: SensorConfig) -> tuple[float, float]:
        if sensor.station is not None:
            return sensor.station
        ws = self.workspace()
        return ((ws.xmin + ws.xmax) / 2.0, (ws.ymin + ws.ymax) / 2.0)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["sensors"] = [asdict(s) for s in self.sensors]
        data["operators"] = [asdict(o) for o in self.operators]
        for key in ("bounds", "v0", "start", "modes"):
            data[key] = list(data[key])
        for s in data["sensors"]:
            if s["station"] is not None:
                s["station"] = list(s["station"])
        for o in data["operators"]:
            o["prior"] = list(o["prior"])
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        payload = dict(data)
        if "sensors" in payload:
            payload["sensors"] = tuple(
                SensorConfig(**{**s, "station": tuple(s["station"]) if s.get("station") else None})
                for s in payload["sensors"])
        if "operators" in payload:
            payload["operators"] = tuple(
                OperatorConfig(**{**o, "prior": tuple(o.get("prior", (2.0, 2.0)))})
                for o in payload["operators"])
        return cls(**payload)

    @classmethod
    def from_yaml(cls, path) -> "ScenarioConfig":
        with open(path) as fh:
            data = yaml.safe_load(fh)
        if not isinstance(data, dict):
            raise ConfigError(f"config file {path} must hold a mapping")
        return cls.from_dict(data)

    def to_yaml(self, path) -> None:
        with open(path, "w") as fh:
            yaml.safe_dump(self.to_dict(), fh, sort_keys=False)


# ---------------------------------------------------------------------------
# Synthetic processes
# ---------------------------------------------------------------------------

@dataclass
class TruthState:
    """Ground-truth target state between ticks."""

    position: np.ndarray
    velocity: np.ndarray


@dataclass(frozen=True)
class TruthTrace:
    """Truth positions and velocities for ticks 0..horizon."""

    positions: np.ndarray
    velocities: np.ndarray


def _reflect(value: float, lo: float, hi: float) -> tuple[float, int]:
    """Fold a coordinate back into [lo, hi]; returns (coord, sign flips)."""
    flips = 0
    span = hi - lo
    for _ in range(64):
        if value < lo:
            value = 2.0 * lo - value
            flips += 1
        elif value > hi:
            value = 2.0 * hi - value
            flips += 1
        else:
            return value, flips
        if span <= 0:
            break
    return min(max(value, lo), hi), flips


def step_truth(state: TruthState, bounds: Bounds, sigma_p: float, t_s: float,
               rng: np.random.Generator) -> TruthState:
    """Advance truth one tick: position with process noise, then velocity walk.

    The position uses the pre-step velocity (the same mean the filter kernel
    encodes); boundary reflection keeps the target inside the workspace and
    flips the reflected velocity component.
    """
    pos_std = np.sqrt(t_s ** 2 / 2.0) * sigma_p
    noise = rng.normal(0.0, pos_std, 2) if pos_std > 0 else np.zeros(2)
    raw = state.position + state.velocity * t_s + noise
    vel_std = np.sqrt(t_s) * sigma_p
    vel = state.velocity + (rng.normal(0.0, vel_std, 2) if vel_std > 0 else 0.0)

    x, fx = _reflect(float(raw[0]), bounds.xmin, bounds.xmax)
    y, fy = _reflect(float(raw[1]), bounds.ymin, bounds.ymax)
    if fx % 2:
        vel[0] = -vel[0]
    if fy % 2:
        vel[1] = -vel[1]
    return TruthState(position=np.array([x, y]), velocity=vel)


def simulate_truth(config: ScenarioConfig, rng: np.random.Generator) -> TruthTrace:
    bounds = config.workspace()
    state = TruthState(position=np.array(config.start, dtype=float),
                       velocity=np.array(config.v0, dtype=float))
    positions = [state.position.copy()]
    velocities = [state.velocity.copy()]
    for _ in range(config.horizon):
        state = step_truth(state, bounds, config.truth_noise(), config.t_s, rng)
        positions.append(state.position.copy())
        velocities.append(state.velocity.copy())
    return TruthTrace(positions=np.array(positions), velocities=np.array(velocities))


def sensor_pose(config: ScenarioConfig, sensor: SensorConfig) -> CameraPose:
    sx, sy = config.station_of(sensor)
    return CameraPose.nadir(sx, sy, sensor.altitude)


def synth_range(truth_pos: np.ndarray, sensor: SensorConfig, pose: CameraPose,
                rng: np.random.Generator, t: int) -> RangeObservation:
    """Noisy slant range gated by a Bernoulli detection draw."""
    detected = bool(rng.random() < sensor.p_d)
    diff = np.asarray(truth_pos, dtype=float) - pose.position[:2]
    true_range = float(np.sqrt(diff @ diff + pose.altitude ** 2))
    noise = float(rng.normal(0.0, sensor.sigma_d))
    return RangeObservation(
        sensor_id=sensor.id,
        range=true_range + noise if detected else 0.0,
        detected=detected,
        pose=pose,
        sigma_d=sensor.sigma_d,
        t=t,
    )


def disc_polygon(center: np.ndarray, radius: float,
                 n_vertices: int = SKETCH_POLYGON_VERTICES) -> Polygon:
    """Regular polygon approximating a drawn disc."""
    angles = 2.0 * np.pi * np.arange(n_vertices) / n_vertices
    verts = np.column_stack([center[0] + radius * np.cos(angles),
                             center[1] + radius * np.sin(angles)])
    return Polygon(vertices=verts, frame="world")


CLEARING_MARGIN = 0.75
MIN_CLEARING_MASS = 0.02


def synth_sketch(truth_pos: np.ndarray, op: OperatorConfig, grid: ParticleGrid,
                 rng: np.random.Generator, t: int) -> SketchObservation | None:
    """One enclose-style disc sketch around (or deliberately away from) the truth.

    With probability p_enclose the center offset is clipped to the polygon
    apothem so the target is guaranteed inside; otherwise the offset is
    resampled until the target falls outside (pushed outward after 32 tries so
    tight center errors cannot stall). Returns None when the disc encloses no
    particle (skipped, logged).
    """
    truth_pos = np.asarray(truth_pos, dtype=float)
    apothem = op.sketch_radius * np.cos(np.pi / SKETCH_POLYGON_VERTICES)
    if bool(rng.random() < op.p_enclose):
        offset = rng.normal(0.0, op.center_error_std, 2) if op.center_error_std > 0 else np.zeros(2)
        norm = float(np.hypot(*offset))
        cap = 0.9 * apothem
        if norm > cap:
            offset *= cap / norm
        polygon = disc_polygon(truth_pos + offset, op.sketch_radius)
    else:
        polygon = None
        for attempt in range(33):
            offset = rng.normal(0.0, max(op.center_error_std, 1e-6), 2)
            if attempt == 32:
                direction = offset / max(float(np.hypot(*offset)), 1e-12)
                offset = direction * (op.sketch_radius * 1.1 + op.center_error_std)
            candidate = disc_polygon(truth_pos + offset, op.sketch_radius)
            if not points_in_polygon(truth_pos[None, :], candidate)[0]:
                polygon = candidate
                break
        if polygon is None:
            return None
    try:
        return SketchObservation.from_polygon(grid, polygon, op.id, t)
    except EmptySketchError:
        logger.info("operator %s sketch at t=%d enclosed no particle: skipped", op.id, t)
        return None


def synth_clearing_sketch(truth_pos: np.ndarray, belief_weights: np.ndarray,
                          op: OperatorConfig, grid: ParticleGrid,
                          rng: np.random.Generator, t: int) -> SketchObservation | None:
    """One clearing annotation: circle the strongest believed region on the
    wrong side of the operator's context line.

    The operator can tell from outside context which side of y = clear_axis_y
    the target is on, sees the displayed belief, and circles the highest-mass
    particle on the opposite side. No sketch is drawn when that side carries
    negligible mass or the disc could not stay clear of the target.
    """
    truth_pos = np.asarray(truth_pos, dtype=float)
    side = float(truth_pos[1]) - op.clear_axis_y
    if abs(side) < 1e-9:
        return None
    opposite = (grid.positions[:, 1] - op.clear_axis_y) * side < 0
    if float(belief_weights[opposite].sum()) < MIN_CLEARING_MASS:
        return None
    candidates = np.where(opposite)[0]
    peak = grid.positions[candidates[int(np.argmax(belief_weights[candidates]))]]
    offset = rng.normal(0.0, op.center_error_std, 2) if op.center_error_std > 0 else np.zeros(2)
    norm = float(np.hypot(*offset))
    if norm > 0.5 * op.sketch_radius:
        offset *= 0.5 * op.sketch_radius / norm
    center = peak + offset
    if float(np.hypot(*(center - truth_pos))) < op.sketch_radius + CLEARING_MARGIN:
        return None
    polygon = disc_polygon(center, op.sketch_radius)
    if points_in_polygon(truth_pos[None, :], polygon)[0]:
        return None
    try:
        return SketchObservation.from_polygon(grid, polygon, op.id, t)
    except EmptySketchError:
        return None


def operator_fires(op: OperatorConfig, t: int) -> bool:
    return t >= 1 and t >= op.phase and (t - op.phase) % op.cadence == 0


# ---------------------------------------------------------------------------
# Scenario execution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StepRecord:
    """Per-tick trace entry for one mode."""

    t: int
    truth: np.ndarray
    mmse: np.ndarray
    map_point: np.ndarray
    error: float
    rmse_running: float
    reliabilities: dict[str, tuple[float, float]]
    q_s: dict[str, float]
    degenerate: bool


@dataclass(frozen=True)
class ModeTrace:
    """Full trace and summary metrics for one mode."""

    mode: str
    records: tuple[StepRecord, ...]
    rmse: float
    final_reliabilities: dict[str, ReliabilityState]
    q_s_events: tuple[tuple[int, str, float], ...]

    @property
    def errors(self) -> np.ndarray:
        return np.array([r.error for r in self.records])


@dataclass(frozen=True)
class ScenarioResult:
    config: ScenarioConfig
    truth: TruthTrace
    modes: dict[str, ModeTrace]


def _spawn_children(config: ScenarioConfig) -> tuple[np.random.SeedSequence, ...]:
    """One child seed per entity, in fixed order: truth, sensors, operators."""
    seq = np.random.SeedSequence(config.seed)
    return tuple(seq.spawn(1 + len(config.sensors) + len(config.operators)))


def _spawn_streams(config: ScenarioConfig) -> tuple[np.random.Generator, ...]:
    return tuple(np.random.default_rng(c) for c in _spawn_children(config))


def generate_observations(config: ScenarioConfig
                          ) -> tuple[TruthTrace, list[list[RangeObservation]],
                                     list[list[SketchObservation]]]:
    """Shared inputs for all modes: truth, per-tick ranges, enclose sketches.

    Clearing-style operators react to the displayed belief, so their sketches
    are synthesized inside the fused filtering loop instead of here.
    """
    children = _spawn_children(config)
    truth_rng = np.random.default_rng(children[0])
    sensor_rngs = [np.random.default_rng(c)
                   for c in children[1:1 + len(config.sensors)]]
    operator_rngs = [np.random.default_rng(c)
                     for c in children[1 + len(config.sensors):]]

    truth = simulate_truth(config, truth_rng)
    grid = config.grid()
    poses = [sensor_pose(config, s) for s in config.sensors]

    ranges: list[list[RangeObservation]] = []
    sketches: list[list[SketchObservation]] = []
    for t in range(1, config.horizon + 1):
        pos = truth.positions[t]
        ranges.append([synth_range(pos, s, pose, rng, t)
                       for s, pose, rng in zip(config.sensors, poses, sensor_rngs)])
        tick_sketches = []
        for op, rng in zip(config.operators, operator_rngs):
            if op.style == "enclose" and operator_fires(op, t):
                sketch = synth_sketch(pos, op, grid, rng, t)
                if sketch is not None:
                    tick_sketches.append(sketch)
        sketches.append(tick_sketches)
    return truth, ranges, sketches


def _mode_weights(config: ScenarioConfig, mode: str) -> FusionWeights:
    sensor_ids = [s.id for s in config.sensors]
    operator_ids = [o.id for o in config.operators] if mode == "fused" else []
    if mode == "fused" and config.weights:
        return FusionWeights(by_source=dict(config.weights))
    return assign_weights(sensor_ids, operator_ids)


def build_tracker(config: ScenarioConfig, mode: str) -> Tracker:
    grid = config.grid()
    if config.initial_belief == "uniform":
        belief = Belief.uniform(grid.n_particles)
    else:
        d2 = ((grid.positions - np.array(config.start)[None, :]) ** 2).sum(axis=1)
        belief = Belief.point_mass(int(np.argmin(d2)), grid.n_particles)
    reliabilities = {}
    if mode == "fused":
        for op in config.operators:
            reliabilities[op.id] = ReliabilityState(alpha=op.prior[0], beta=op.prior[1],
                                                    operator_id=op.id)
    return Tracker(
        grid=grid, weights=_mode_weights(config, mode), belief=belief,
        reliabilities=reliabilities, sigma_p=config.sigma_p, t_s=config.t_s,
        velocity=np.array(config.v0), velocity_mode=config.velocity_mode,
        variance_mode=config.variance_mode)


def run_mode(config: ScenarioConfig, mode: str, truth: TruthTrace,
             ranges: list[list[RangeObservation]],
             sketches: list[list[SketchObservation]]) -> ModeTrace:
    tracker = build_tracker(config, mode)
    children = _spawn_children(config)
    clearing_rngs = {
        op.id: np.random.default_rng(child)
        for op, child in zip(config.operators, children[1 + len(config.sensors):])
        if op.style == "clearing"}
    records: list[StepRecord] = []
    q_s_events: list[tuple[int, str, float]] = []
    sq_sum = 0.0
    for t in range(1, config.horizon + 1):
        tick_sketches = list(sketches[t - 1]) if mode == "fused" else []
        if mode == "fused":
            for op in config.operators:
                if op.style == "clearing" and operator_fires(op, t):
                    sketch = synth_clearing_sketch(
                        truth.positions[t], tracker.belief.weights, op,
                        tracker.grid, clearing_rngs[op.id], t)
                    if sketch is not None:
                        tick_sketches.append(sketch)
        bundle = ObservationBundle(
            t=t,
            ranges=tuple(ranges[t - 1]),
            sketches=tuple(tick_sketches),
        )
        result = tracker.step(bundle)
        err = float(np.linalg.norm(truth.positions[t] - result.mmse))
        sq_sum += err * err
        q_s_map = {}
        for upd in result.reliability_updates:
            q_s_map[upd.state.operator_id] = upd.q_s
            q_s_events.append((t, upd.state.operator_id, upd.q_s))
        records.append(StepRecord(
            t=t,
            truth=truth.positions[t].copy(),
            mmse=result.mmse,
            map_point=result.map_point,
            error=err,
            rmse_running=float(np.sqrt(sq_sum / t)),
            reliabilities={oid: (r.alpha, r.beta)
                           for oid, r in result.reliabilities.items()},
            q_s=q_s_map,
            degenerate=result.degenerate,
        ))
    rmse = float(np.sqrt(sq_sum / config.horizon))
    return ModeTrace(mode=mode, records=tuple(records), rmse=rmse,
                     final_reliabilities=dict(tracker.reliabilities),
                     q_s_events=tuple(q_s_events))


def run_scenario(config: ScenarioConfig) -> ScenarioResult:
    """Simulate once, filter once per configured mode on the shared inputs."""
    truth, ranges, sketches = generate_observations(config)
    modes = {mode: run_mode(config, mode, truth, ranges, sketches)
             for mode in config.modes}
    return ScenarioResult(config=config, truth=truth, modes=modes)


# ---------------------------------------------------------------------------
# Outputs
# ---------------------------------------------------------------------------

def trace_columns(config: ScenarioConfig) -> list[str]:
    cols = ["t", "truth_x", "truth_y", "mmse_x", "mmse_y", "map_x", "map_y",
            "rmse_running"]
    for op in config.operators:
        cols += [f"alpha_{op.id}", f"beta_{op.id}", f"q_s_{op.id}"]
    return cols


def write_trace_csv(path, config: ScenarioConfig, trace: ModeTrace) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(trace_columns(config))
        for rec in trace.records:
            row = [rec.t,
                   f"{rec.truth[0]:.6f}", f"{rec.truth[1]:.6f}",
                   f"{rec.mmse[0]:.6f}", f"{rec.mmse[1]:.6f}",
                   f"{rec.map_point[0]:.6f}", f"{rec.map_point[1]:.6f}",
                   f"{rec.rmse_running:.6f}"]
            for op in config.operators:
                ab = rec.reliabilities.get(op.id)
                row += ["" if ab is None else f"{ab[0]:.9f}",
                        "" if ab is None else f"{ab[1]:.9f}",
                        f"{rec.q_s[op.id]:.9f}" if op.id in rec.q_s else ""]
            writer.writerow(row)


def summarize(result: ScenarioResult) -> dict:
    """JSON-ready metrics per mode."""
    out: dict = {"seed": result.config.seed, "horizon": result.config.horizon, "modes": {}}
    for mode, trace in result.modes.items():
        q_vals = [q for (_, _, q) in trace.q_s_events]
        out["modes"][mode] = {
            "rmse": trace.rmse,
            "final_error": trace.records[-1].error if trace.records else None,
            "n_sketch_updates": len(trace.q_s_events),
            "median_q_s": float(np.median(q_vals)) if q_vals else None,
            "final_reliabilities": {
                oid: {"alpha": rel.alpha, "beta": rel.beta, "mean": rel.mean}
                for oid, rel in trace.final_reliabilities.items()},
            "n_degenerate": sum(1 for r in trace.records if r.degenerate),
        }
    if "autonomous" in result.modes and "fused" in result.modes:
        out["fused_improves"] = bool(result.modes["fused"].rmse
                                     < result.modes["autonomous"].rmse)
    return out


def write_outputs(result: ScenarioResult, out_dir) -> dict:
    """Write config echo, per-mode trace CSVs, and a metrics summary."""
    out_path = Path(out_dir)
    out_path.mkdir(parents=True, exist_ok=True)
    result.config.to_yaml(out_path / "config_echo.yaml")
    for mode, trace in result.modes.items():
        write_trace_csv(out_path / f"trace_{mode}.csv", result.config, trace)
    summary = summarize(result)
    with open(out_path / "metrics.yaml", "w") as fh:
        yaml.safe_dump(summary, fh, sort_keys=False)
    return summary


# ---------------------------------------------------------------------------
# Reference scenario
# ---------------------------------------------------------------------------

def reference_scenario(seed: int = 0, **overrides) -> ScenarioConfig:
    """Three-UAV, two-operator reference configuration.

    The UAVs fly a collinear east-west baseline along y = 5: slant ranges then
    depend only on distance to that line, so sensing alone cannot tell north
    from south and the autonomous posterior stays mirror-symmetric about the
    baseline. The operators watch the console with outside context and annotate
    the spurious mirror region as clear; the reliability learner turns those
    annotations into exclusion evidence that picks the true side.
    """
    defaults = dict(
        bounds=(0.0, 0.0, 10.0, 10.0),
        rows=20, cols=20,
        t_s=0.1, sigma_p=0.5,
        v0=(1.0, 1.0), start=(2.0, 1.0),
        horizon=40, seed=seed,
        initial_belief="uniform",
        sensors=(
            SensorConfig(id="u1", altitude=10.0, station=(3.5, 5.0)),
            SensorConfig(id="u2", altitude=9.0, station=(5.0, 5.0)),
            SensorConfig(id="u3", altitude=8.0, station=(6.5, 5.0)),
        ),
        operators=(
            OperatorConfig(id="h1", prior=(2.0, 2.0), sketch_radius=1.5,
                           center_error_std=0.2, cadence=2, phase=1,
                           style="clearing", clear_axis_y=5.0),
            OperatorConfig(id="h2", prior=(2.0, 2.0), sketch_radius=1.5,
                           center_error_std=0.2, cadence=3, phase=2,
                           style="clearing", clear_axis_y=5.0),
        ),
    )
    defaults.update(overrides)
    return ScenarioConfig(**defaults)


def static_watch_scenario(seed: int = 0, **overrides) -> ScenarioConfig:
    """Loitering-target configuration with spread stations and enclosing sketches.

    The UAV triangle gives unambiguous range geometry, the target hovers with
    only residual drift, and the operators circle it closely and accurately, so
    posterior mass concentrates inside their sketches and reliability climbs.
    """
    defaults = dict(
        bounds=(0.0, 0.0, 10.0, 10.0),
        rows=20, cols=20,
        t_s=0.1, sigma_p=0.5, truth_sigma_p=0.05,
        v0=(0.0, 0.0), start=(5.0, 5.0),
        horizon=60, seed=seed,
        initial_belief="uniform",
        sensors=(
            SensorConfig(id="u1", altitude=10.0, station=(2.0, 2.0)),
            SensorConfig(id="u2", altitude=9.0, station=(8.0, 2.5)),
            SensorConfig(id="u3", altitude=8.0, station=(5.0, 8.0)),
        ),
        operators=(
            OperatorConfig(id="h1", prior=(2.0, 2.0), sketch_radius=1.0,
                           center_error_std=0.1, p_enclose=1.0, cadence=4),
        ),
    )
    defaults.update(overrides)
    return ScenarioConfig(**defaults)
