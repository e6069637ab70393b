/** Console view-state: one place that turns server frames into a render
 *  model.
 *
 * Every displayed number originates from a server frame; local intents
 * (sketch strokes, control clicks) never touch the estimation state. The
 * only locally-owned pixels are the in-progress stroke overlay and notices.
 */

import { SessionControls } from "./controls.js";
import { countEnclosed } from "./geometry.js";
import { heatToModel, hotCellWorld, type HeatModel } from "./heatmap.js";
import { ReliabilityHistory, type FadedCurve } from "./panel.js";
import {
  parseFrame,
  type AckFrame,
  type ControlAction,
  type HelloFrame,
  type Point,
  type ServerFrame,
  type StateFrame,
} from "./protocol.js";
import { ViewTransform } from "./transform.js";
import { SketchCapture, type CaptureResult } from "./sketch.js";

export interface OperatorRow {
  id: string;
  alpha: number;
  beta: number;
  mean: number;
  q_s?: number;
  curves: FadedCurve[];
}

export interface EchoOverlay {
  operatorId: string;
  /** Acked world vertices re-projected onto the canvas. */
  px: Point[];
  m: number;
  tApplied: number;
  /** Max canvas distance between the echo and the stroke that was sent. */
  roundTripErrorPx: number | null;
}

export interface ConsoleModel {
  t: number | null;
  running: boolean | null;
  speed: number | null;
  heat: HeatModel | null;
  heatT: number | null;
  mmsePx: Point | null;
  mapPx: Point | null;
  truthPx: Point | null;
  hotCellPx: Point | null;
  rmse: number | null;
  degenerate: boolean;
  strokePx: Point[];
  echo: EchoOverlay | null;
  notice: string | null;
  operators: OperatorRow[];
  predictedM: number | null;
  interFrameMs: number[];
}

interface PendingSketch {
  operatorId: string;
  predictedM: number;
  strokePx: Point[];
  sentAtMs: number;
}

const INTER_FRAME_WINDOW = 64;

export class ConsoleClient {
  readonly controls = new SessionControls();
  readonly history = new ReliabilityHistory();
  readonly capture = new SketchCapture();

  private readonly send: (text: string) => void;
  private readonly now: () => number;

  private hello: HelloFrame | null = null;
  private state: StateFrame | null = null;
  private heatModel: HeatModel | null = null;
  private heatT: number | null = null;
  private view: ViewTransform | null = null;
  private canvasSize: [number, number] | null = null;

  private pending: PendingSketch | null = null;
  private echo: EchoOverlay | null = null;
  private notice: string | null = null;
  private lastPredictedM: number | null = null;

  private lastStateAtMs: number | null = null;
  private readonly interFrame: number[] = [];

  constructor(send: (text: string) => void,
              now: () => number = () => performance.now()) {
    this.send = send;
    this.now = now;
  }

  get transform(): ViewTransform | null {
    return this.view;
  }

  get currentT(): number | null {
    return this.state?.t ?? this.hello?.t ?? null;
  }

  setCanvasSize(width: number, height: number): void {
    this.canvasSize = [width, height];
    this.rebuildTransform();
  }

  private rebuildTransform(): void {
    if (this.hello === null || this.canvasSize === null) {
      return;
    }
    this.view = new ViewTransform(this.hello.grid.bounds, this.canvasSize[0],
                                  this.canvasSize[1]);
  }

  /** Parse, validate, and fold one raw socket message into the model. */
  handleText(text: string): ServerFrame {
    const frame = parseFrame(text);
    switch (frame.type) {
      case "hello":
        this.hello = frame;
        this.controls.seedFromHello(frame);
        this.rebuildTransform();
        break;
      case "state":
        this.foldState(frame);
        break;
      case "ack":
        this.foldAck(frame);
        break;
      case "nack":
        this.notice = `rejected: ${frame.reason}`;
        this.pending = null;
        break;
      case "control":
        this.controls.applyControlFrame(frame);
        break;
    }
    return frame;
  }

  private foldState(frame: StateFrame): void {
    this.state = frame;
    if (frame.heat !== undefined) {
      this.heatModel = heatToModel(frame.heat, frame.heat_rows, frame.heat_cols);
      this.heatT = frame.t;
    }
    for (const [id, rel] of Object.entries(frame.reliabilities)) {
      this.history.push(id, rel.alpha, rel.beta);
    }
    const at = this.now();
    if (this.lastStateAtMs !== null) {
      this.interFrame.push(at - this.lastStateAtMs);
      if (this.interFrame.length > INTER_FRAME_WINDOW) {
        this.interFrame.shift();
      }
    }
    this.lastStateAtMs = at;
  }

  private foldAck(frame: AckFrame): void {
    const view = this.view;
    const px = view === null ? [] : frame.vertices.map((v) => view.worldToPx(v));
    let roundTrip: number | null = null;
    if (this.pending !== null && this.pending.operatorId === frame.operator_id
        && px.length === this.pending.strokePx.length) {
      roundTrip = 0;
      for (let i = 0; i < px.length; i++) {
        const [eu, ev] = px[i]!;
        const [su, sv] = this.pending.strokePx[i]!;
        roundTrip = Math.max(roundTrip, Math.hypot(eu - su, ev - sv));
      }
    }
    this.echo = {
      operatorId: frame.operator_id,
      px,
      m: frame.m,
      tApplied: frame.t_applied,
      roundTripErrorPx: roundTrip,
    };
    this.notice = null;
    this.pending = null;
  }

  // -- sketch input --------------------------------------------------------

  beginStroke(u: number, v: number): void {
    this.capture.begin(u, v);
  }

  moveStroke(u: number, v: number): void {
    this.capture.move(u, v);
  }

  /** Finish the stroke: predict the enclosure count with the same transform
   *  the server will apply, send the message, and remember the prediction
   *  for comparison against the ack. */
  endStroke(operatorId: string): CaptureResult {
    if (this.view === null || this.hello === null) {
      this.capture.cancel();
      return { kind: "ignored", reason: "no session geometry yet" };
    }
    const t = this.currentT ?? undefined;
    const result = this.capture.end(operatorId, this.view, t);
    if (result.kind === "rejected") {
      this.notice = result.reason;
      return result;
    }
    if (result.kind === "ignored") {
      return result;
    }
    const grid = this.hello.grid;
    const world = result.message.vertices.map((v) => this.view!.pxToWorld(v));
    const predictedM = countEnclosed(grid.bounds, grid.rows, grid.cols, world);
    this.lastPredictedM = predictedM;
    this.pending = {
      operatorId,
      predictedM,
      strokePx: result.strokePx,
      sentAtMs: this.now(),
    };
    this.send(JSON.stringify(result.message));
    return result;
  }

  get pendingPrediction(): number | null {
    return this.pending?.predictedM ?? this.lastPredictedM;
  }

  // -- session controls ------------------------------------------------------

  sendControl(action: ControlAction, factor?: number): void {
    const message = action === "speed"
      ? this.controls.intentSpeed(factor ?? 1)
      : action === "pause" ? this.controls.intentPause()
      : action === "resume" ? this.controls.intentResume()
      : this.controls.intentStep();
    this.send(JSON.stringify(message));
  }

  // -- render model ----------------------------------------------------------

  renderModel(): ConsoleModel {
    const view = this.view;
    const state = this.state;
    const toPx = (p: [number, number] | undefined): Point | null =>
      view !== null && p !== undefined ? view.worldToPx(p) : null;
    const operators: OperatorRow[] = [];
    if (state !== null) {
      for (const id of Object.keys(state.reliabilities).sort()) {
        const rel = state.reliabilities[id]!;
        operators.push({
          id,
          alpha: rel.alpha,
          beta: rel.beta,
          mean: rel.mean,
          ...(rel.q_s === undefined ? {} : { q_s: rel.q_s }),
          curves: this.history.curves(id),
        });
      }
    }
    const hotPx = this.heatModel !== null && view !== null && this.hello !== null
      ? view.worldToPx(hotCellWorld(this.heatModel, this.hello.grid.bounds))
      : null;
    return {
      t: state?.t ?? this.hello?.t ?? null,
      running: this.controls.state?.running ?? null,
      speed: this.controls.state?.speed ?? null,
      heat: this.heatModel,
      heatT: this.heatT,
      mmsePx: toPx(state?.mmse),
      mapPx: toPx(state?.map),
      truthPx: toPx(state?.truth),
      hotCellPx: hotPx,
      rmse: state?.rmse_running ?? null,
      degenerate: state?.degenerate ?? false,
      strokePx: this.capture.points,
      echo: this.echo,
      notice: this.notice,
      operators,
      predictedM: this.pendingPrediction,
      interFrameMs: this.interFrame.slice(),
    };
  }
}
