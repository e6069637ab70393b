"""Live tracking service: a WebSocket endpoint around a simulated scenario.

The server owns one LiveSession. Each tick advances the synthetic truth,
gathers sensor ranges plus any queued operator sketches, filters, and pushes a
state frame to every connected client. Clients submit sketches (world or pixel
frame) and control messages (pause/resume/speed/step) as JSON; sketches are
acknowledged immediately with the enclosed-particle count and the tick they
will be applied at.

Wire format (one JSON object per message):
  client -> server:
    {"type": "sketch", "operator_id": str, "frame": "world"|"px",
     "vertices": [[x, y], ...], "t": int?,
     px only: "sensor_id": str (camera back-projection) or
              "transform": {"a": [[a00, a01], [a10, a11]], "b": [b0, b1]}
              (affine pixel-to-world resolution, world = a @ px + b)}
    {"type": "control", "action": "pause"|"resume"|"step"|"speed",
     "factor": float (speed only)}
  server -> client:
    {"type": "hello", ...}                         on connect
    {"type": "state", "t": int, "heat": [...], ...} every tick
      ("applied_sketches": [{"operator_id", "m", "vertices"}, ...] echoes the
       client sketches consumed this tick, vertices in world frame)
    {"type": "ack", "operator_id": str, "m": int, "t_applied": int,
     "vertices": [[x, y], ...] (resolved world frame)}
    {"type": "nack", "reason": str}
    {"type": "control", "running": bool, "speed": float}
"""

from __future__ import annotations

import asyncio
import contextlib
import dataclasses
import logging
import threading

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .errors import EmptySketchError, ProjectionError, SketchTrackError
from .grid import Polygon, project_polygon
from .human import ReliabilityState, SketchObservation
from .sim import (ScenarioConfig, TruthState, build_tracker, operator_fires,
                  sensor_pose, step_truth, synth_clearing_sketch, synth_range,
                  synth_sketch, _spawn_streams)
from .tracker import ObservationBundle, assign_weights

logger = logging.getLogger(__name__)

MAX_SKETCH_VERTICES = 256
CLIENT_QUEUE_SIZE = 8
DEFAULT_MAX_HEAT_CELLS = 4096


def resolve_affine(vertices: np.ndarray, spec) -> np.ndarray:
    """Map pixel vertices to world points via world = a @ px + b."""
    if not isinstance(spec, dict):
        raise ValueError("transform must be an object with 'a' and 'b'")
    a = np.asarray(spec.get("a"), dtype=float)
    b = np.asarray(spec.get("b"), dtype=float)
    if a.shape != (2, 2) or b.shape != (2,):
        raise ValueError("transform needs a 2x2 'a' matrix and a length-2 'b'")
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise ValueError("transform entries must be finite")
    return vertices @ a.T + b


def downsample_heat(weights: np.ndarray, rows: int, cols: int,
                    max_cells: int) -> tuple[np.ndarray, int, int]:
    """Block-sum a row-major belief so it fits max_cells, preserving mass."""
    if rows * cols <= max_cells:
        return weights, rows, cols
    factor = 2
    while (rows // factor + (rows % factor > 0)) * (cols // factor + (cols % factor > 0)) > max_cells:
        factor += 1
    grid2d = weights.reshape(rows, cols)
    out_rows = -(-rows // factor)
    out_cols = -(-cols // factor)
    padded = np.zeros((out_rows * factor, out_cols * factor))
    padded[:rows, :cols] = grid2d
    blocks = padded.reshape(out_rows, factor, out_cols, factor).sum(axis=(1, 3))
    return blocks.reshape(-1), out_rows, out_cols


class LiveSession:
    """Synchronous core of the live service; the socket layer is a thin shell."""

    def __init__(self, config: ScenarioConfig, speed: float = 1.0,
                 max_heat_cells: int = DEFAULT_MAX_HEAT_CELLS):
        self.config = config
        self.speed = float(speed)
        self.max_heat_cells = int(max_heat_cells)
        self.lock = threading.Lock()
        self.paused = False
        self.t = 0

        streams = _spawn_streams(config)
        self._truth_rng = streams[0]
        self._sensor_rngs = streams[1:1 + len(config.sensors)]
        self._operator_rngs = streams[1 + len(config.sensors):]
        self.truth = TruthState(position=np.array(config.start, dtype=float),
                                velocity=np.array(config.v0, dtype=float))
        self.tracker = build_tracker(config, "fused")
        self.grid = self.tracker.grid
        self.poses = {s.id: sensor_pose(config, s) for s in config.sensors}
        self._sensor_cfgs = {s.id: s for s in config.sensors}
        # operator_id -> (pending mask, world-frame echo vertices);
        # last drawing wins within a tick
        self._pending: dict[str, tuple[np.ndarray, list]] = {}
        self._auto_weights = config.weights is None
        self._clients: list[asyncio.Queue] = []
        self._sq_err_sum = 0.0

    # -- client bookkeeping ------------------------------------------------

    def add_client(self) -> asyncio.Queue:
        queue: asyncio.Queue = asyncio.Queue(maxsize=CLIENT_QUEUE_SIZE)
        with self.lock:
            self._clients.append(queue)
        return queue

    def remove_client(self, queue: asyncio.Queue) -> None:
        with self.lock:
            if queue in self._clients:
                self._clients.remove(queue)

    def broadcast(self, frame: dict) -> None:
        """Push a frame to every client; on backpressure drop the heat field."""
        with self.lock:
            clients = list(self._clients)
        for queue in clients:
            payload = frame
            while True:
                try:
                    queue.put_nowait(payload)
                    break
                except asyncio.QueueFull:
                    try:
                        stale = queue.get_nowait()
                    except asyncio.QueueEmpty:
                        break
                    if "heat" in payload:
                        payload = {k: v for k, v in frame.items() if k != "heat"}
                    logger.debug("client queue full: dropped frame t=%s",
                                 stale.get("t"))

    # -- message handling ----------------------------------------------------

    def hello(self) -> dict:
        ws = self.config.workspace()
        return {
            "type": "hello",
            "t": self.t,
            "t_s": self.config.t_s,
            "running": not self.paused,
            "speed": self.speed,
            "grid": {"rows": self.grid.rows, "cols": self.grid.cols,
                     "bounds": [ws.xmin, ws.ymin, ws.xmax, ws.ymax]},
            "sensors": [{"id": s.id, "altitude": s.altitude,
                         "station": list(self.config.station_of(s))}
                        for s in self.config.sensors],
            "operators": sorted(self.tracker.reliabilities),
        }

    def handle(self, msg: dict) -> dict:
        """Process one client message; returns the direct reply."""
        if not isinstance(msg, dict):
            return {"type": "nack", "reason": "message must be a JSON object"}
        kind = msg.get("type")
        if kind == "sketch":
            return self.ingest_sketch(msg)
        if kind == "control":
            return self.control(msg)
        return {"type": "nack", "reason": f"unknown message type {kind!r}"}

    def ingest_sketch(self, msg: dict) -> dict:
        operator_id = msg.get("operator_id")
        if not operator_id or not isinstance(operator_id, str):
            return {"type": "nack", "reason": "operator_id is required"}
        frame = msg.get("frame", "world")
        vertices = msg.get("vertices")
        if (not isinstance(vertices, list) or len(vertices) < 3
                or len(vertices) > MAX_SKETCH_VERTICES):
            return {"type": "nack",
                    "reason": f"vertices must list 3..{MAX_SKETCH_VERTICES} points"}
        drawn_t = msg.get("t")
        if drawn_t is not None and not isinstance(drawn_t, int):
            return {"type": "nack", "reason": "t must be an integer tick"}
        with self.lock:
            if drawn_t is not None and drawn_t < self.t - 1:
                return {"type": "nack",
                        "reason": f"stale sketch: drawn at t={drawn_t}, now t={self.t}"}
            try:
                points = np.asarray(vertices, dtype=float)
                if frame == "px":
                    if "sensor_id" in msg:
                        sensor_id = msg["sensor_id"]
                        if sensor_id not in self.poses:
                            return {"type": "nack",
                                    "reason": "px sketches need a known sensor_id"}
                        polygon = project_polygon(Polygon(vertices=points, frame="px"),
                                                  self.poses[sensor_id])
                    elif "transform" in msg:
                        polygon = Polygon(vertices=resolve_affine(points, msg["transform"]),
                                          frame="world")
                    else:
                        return {"type": "nack", "reason": "px sketches need a known "
                                "sensor_id or an affine transform"}
                else:
                    polygon = Polygon(vertices=points, frame=frame)
                observation = SketchObservation.from_polygon(
                    self.grid, polygon, operator_id, t=self.t + 1)
            except EmptySketchError:
                return {"type": "nack", "reason": "sketch encloses no particles"}
            except (ProjectionError, SketchTrackError, ValueError, TypeError) as exc:
                return {"type": "nack", "reason": str(exc)}
            if operator_id not in self.tracker.reliabilities:
                if not self._auto_weights:
                    return {"type": "nack",
                            "reason": f"operator {operator_id!r} not in configured weights"}
                self._register_operator(operator_id)
            echo = [[float(x), float(y)] for x, y in polygon.vertices]
            self._pending[operator_id] = (observation.mask, echo)
            return {"type": "ack", "operator_id": operator_id,
                    "m": observation.n_enclosed, "t_applied": self.t + 1,
                    "vertices": echo}

    def _register_operator(self, operator_id: str) -> None:
        self.tracker.reliabilities[operator_id] = ReliabilityState(
            alpha=2.0, beta=2.0, operator_id=operator_id)
        self.tracker.weights = assign_weights(
            [s.id for s in self.config.sensors],
            sorted(self.tracker.reliabilities))

    def control(self, msg: dict) -> dict:
        action = msg.get("action")
        with self.lock:
            if action == "pause":
                self.paused = True
            elif action == "resume":
                self.paused = False
            elif action == "speed":
                factor = msg.get("factor")
                if not isinstance(factor, (int, float)) or factor <= 0:
                    return {"type": "nack", "reason": "speed factor must be > 0"}
                self.speed = float(factor)
            elif action != "step":
                return {"type": "nack", "reason": f"unknown control action {action!r}"}
        if action == "step":
            frame = self.tick(force=True)
            self.broadcast(frame)
        with self.lock:
            return {"type": "control", "running": not self.paused,
                    "speed": self.speed}

    # -- simulation ----------------------------------------------------------

    def tick(self, force: bool = False) -> dict | None:
        """Advance one step and return the state frame (None when paused)."""
        with self.lock:
            if self.paused and not force:
                return None
            self.t += 1
            t = self.t
            self.truth = step_truth(self.truth, self.config.workspace(),
                                    self.config.truth_noise(), self.config.t_s,
                                    self._truth_rng)
            ranges = tuple(
                synth_range(self.truth.position, s, self.poses[s.id], rng, t)
                for s, rng in zip(self.config.sensors, self._sensor_rngs))
            sketches = []
            for op, rng in zip(self.config.operators, self._operator_rngs):
                if op.id in self._pending:
                    continue
                if operator_fires(op, t):
                    if op.style == "clearing":
                        sketch = synth_clearing_sketch(
                            self.truth.position, self.tracker.belief.weights,
                            op, self.grid, rng, t)
                    else:
                        sketch = synth_sketch(self.truth.position, op, self.grid, rng, t)
                    if sketch is not None:
                        sketches.append(sketch)
            applied = []
            for operator_id in sorted(self._pending):
                mask, echo = self._pending[operator_id]
                obs = SketchObservation(operator_id=operator_id, mask=mask, t=t)
                sketches.append(obs)
                applied.append({"operator_id": operator_id, "m": obs.n_enclosed,
                                "vertices": echo})
            self._pending.clear()

            bundle = ObservationBundle(t=t, ranges=ranges, sketches=tuple(sketches))
            result = self.tracker.step(bundle)
            err = float(np.linalg.norm(self.truth.position - result.mmse))
            self._sq_err_sum += err * err

            heat, heat_rows, heat_cols = downsample_heat(
                result.belief.weights, self.grid.rows, self.grid.cols,
                self.max_heat_cells)
            q_s_map = {u.state.operator_id: u.q_s for u in result.reliability_updates}
            frame = {
                "type": "state",
                "t": t,
                "heat": [float(v) for v in heat],
                "heat_rows": heat_rows,
                "heat_cols": heat_cols,
                "mmse": [float(result.mmse[0]), float(result.mmse[1])],
                "map": [float(result.map_point[0]), float(result.map_point[1])],
                "truth": [float(self.truth.position[0]), float(self.truth.position[1])],
                "rmse_running": float(np.sqrt(self._sq_err_sum / t)),
                "degenerate": result.degenerate,
                "applied_sketches": applied,
                "reliabilities": {
                    oid: {"alpha": rel.alpha, "beta": rel.beta, "mean": rel.mean,
                          **({"q_s": q_s_map[oid]} if oid in q_s_map else {})}
                    for oid, rel in result.reliabilities.items()},
            }
            return frame


def create_app(config: ScenarioConfig, speed: float = 1.0,
               max_heat_cells: int = DEFAULT_MAX_HEAT_CELLS) -> FastAPI:
    """Build the FastAPI app. speed <= 0 disables the auto ticker (tests)."""
    session = LiveSession(config, speed=max(speed, 0.0) or 1.0,
                          max_heat_cells=max_heat_cells)
    auto_tick = speed > 0

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        task = asyncio.create_task(_ticker(session)) if auto_tick else None
        yield
        if task is not None:
            task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await task

    app = FastAPI(lifespan=lifespan)
    app.state.session = session

    @app.get("/")
    async def root():
        with session.lock:
            return {"service": "sketchtrack", "t": session.t,
                    "running": not session.paused, "speed": session.speed,
                    "clients": len(session._clients)}

    @app.get("/config")
    async def config_echo():
        return session.config.to_dict()

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket):
        await websocket.accept()
        queue = session.add_client()
        await websocket.send_json(session.hello())

        async def pump():
            while True:
                frame = await queue.get()
                await websocket.send_json(frame)

        sender = asyncio.create_task(pump())
        try:
            while True:
                msg = await websocket.receive_json()
                await websocket.send_json(session.handle(msg))
        except WebSocketDisconnect:
            pass
        finally:
            sender.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await sender
            session.remove_client(queue)

    return app


async def _ticker(session: LiveSession) -> None:
    while True:
        await asyncio.sleep(session.config.t_s / session.speed)
        frame = session.tick()
        if frame is not None:
            session.broadcast(frame)
