/** World/canvas coordinate mapping.
 *
 * The canvas shows the workspace rectangle with a uniform scale, centered,
 * with the world y axis pointing up (canvas v axis points down). pxToWorld
 * applies the exact affine coefficients that are shipped to the server with
 * every sketch, so the server resolves vertices to the same world points the
 * console predicts with.
 */

import type { AffineTransform, Point } from "./protocol.js";

export type WorldBounds = [number, number, number, number];

export class ViewTransform {
  readonly bounds: WorldBounds;
  readonly canvasWidth: number;
  readonly canvasHeight: number;
  /** canvas pixels per world meter */
  readonly scale: number;
  /** canvas position of the world point (xmin, ymax) (top-left of the map) */
  readonly offsetX: number;
  readonly offsetY: number;
  private readonly affine: AffineTransform;

  constructor(bounds: WorldBounds, canvasWidth: number, canvasHeight: number,
              margin = 0) {
    const [xmin, ymin, xmax, ymax] = bounds;
    const width = xmax - xmin;
    const height = ymax - ymin;
    if (!(width > 0) || !(height > 0)) {
      throw new Error(`degenerate world bounds [${bounds.join(", ")}]`);
    }
    const innerW = canvasWidth - 2 * margin;
    const innerH = canvasHeight - 2 * margin;
    const scale = Math.min(innerW / width, innerH / height);
    if (!Number.isFinite(scale) || scale <= 0) {
      throw new Error(`canvas ${canvasWidth}x${canvasHeight} with margin ` +
        `${margin} leaves no room for the map`);
    }
    this.bounds = bounds;
    this.canvasWidth = canvasWidth;
    this.canvasHeight = canvasHeight;
    this.scale = scale;
    this.offsetX = (canvasWidth - scale * width) / 2;
    this.offsetY = (canvasHeight - scale * height) / 2;
    const inv = 1 / scale;
    this.affine = {
      a: [[inv, 0], [0, -inv]],
      b: [xmin - this.offsetX * inv, ymax + this.offsetY * inv],
    };
  }

  worldToPx([x, y]: Point): Point {
    const [xmin, , , ymax] = this.bounds;
    return [
      this.offsetX + this.scale * (x - xmin),
      this.offsetY + this.scale * (ymax - y),
    ];
  }

  /** Applies the same coefficients pxToWorldAffine() exports. */
  pxToWorld([u, v]: Point): Point {
    const { a, b } = this.affine;
    return [
      a[0][0] * u + a[0][1] * v + b[0],
      a[1][0] * u + a[1][1] * v + b[1],
    ];
  }

  /** The transform metadata attached to outgoing px-frame sketches. */
  pxToWorldAffine(): AffineTransform {
    return {
      a: [[this.affine.a[0][0], this.affine.a[0][1]],
          [this.affine.a[1][0], this.affine.a[1][1]]],
      b: [this.affine.b[0], this.affine.b[1]],
    };
  }
}
