/** Free-hand sketch capture.
 *
 * Pointer samples are simplified as they arrive (a sample is dropped when it
 * lands closer than minDist canvas pixels to the last kept vertex), the
 * stroke is closed by trimming trailing points near the start, decimated to
 * the vertex budget, and checked for self-intersection. A self-intersecting
 * stroke is rejected locally with a reason; no message leaves the console.
 */

import { closeStroke, decimate, selfIntersects, simplifyStroke } from "./geometry.js";
import type { Point, SketchMessage } from "./protocol.js";
import type { ViewTransform } from "./transform.js";

export const MIN_VERTEX_DIST_PX = 2;
export const MAX_VERTICES = 64;

export type CaptureResult =
  | { kind: "message"; message: SketchMessage; strokePx: Point[] }
  | { kind: "rejected"; reason: string; strokePx: Point[] }
  | { kind: "ignored"; reason: string };

export class SketchCapture {
  readonly minDist: number;
  readonly maxVertices: number;
  private stroke: Point[] = [];
  private drawing = false;

  constructor(minDist = MIN_VERTEX_DIST_PX, maxVertices = MAX_VERTICES) {
    this.minDist = minDist;
    this.maxVertices = maxVertices;
  }

  get active(): boolean {
    return this.drawing;
  }

  /** Kept vertices of the in-progress stroke (for live rendering). */
  get points(): Point[] {
    return this.stroke.slice();
  }

  begin(u: number, v: number): void {
    this.stroke = [[u, v]];
    this.drawing = true;
  }

  move(u: number, v: number): void {
    if (!this.drawing) {
      return;
    }
    const last = this.stroke[this.stroke.length - 1]!;
    if (Math.hypot(u - last[0], v - last[1]) >= this.minDist) {
      this.stroke.push([u, v]);
    }
  }

  cancel(): void {
    this.stroke = [];
    this.drawing = false;
  }

  /** Finish the stroke and build the sketch message, or reject locally. */
  end(operatorId: string, view: ViewTransform, t?: number): CaptureResult {
    if (!this.drawing) {
      return { kind: "ignored", reason: "no stroke in progress" };
    }
    this.drawing = false;
    const raw = this.stroke;
    this.stroke = [];
    // Re-running the simplification is a no-op for live-captured strokes but
    // makes end() total for replayed point lists.
    const closed = closeStroke(simplifyStroke(raw, this.minDist), this.minDist);
    if (closed.length < 3) {
      return { kind: "ignored", reason: "stroke too short to enclose anything" };
    }
    const vertices = decimate(closed, this.maxVertices);
    if (selfIntersects(vertices)) {
      return {
        kind: "rejected",
        reason: "stroke crosses itself; draw a simple loop",
        strokePx: vertices,
      };
    }
    const message: SketchMessage = {
      type: "sketch",
      operator_id: operatorId,
      frame: "px",
      vertices,
      transform: view.pxToWorldAffine(),
      ...(t === undefined ? {} : { t }),
    };
    return { kind: "message", message, strokePx: vertices };
  }
}
