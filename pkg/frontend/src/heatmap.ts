/** Belief heat field -> color model.
 *
 * The heat vector is row-major from the lower-left cell (world y up); image
 * buffers are row-major from the top-left, so cell row r lands in image row
 * rows - 1 - r. Colors scale by the maximum cell mass, which keeps a uniform
 * belief perfectly flat and a point mass a single hot cell.
 */

import type { Point } from "./protocol.js";
import { cellCenter } from "./geometry.js";
import type { WorldBounds } from "./transform.js";

/** Dark-to-hot ramp: deep blue through violet to yellow-white. */
export function rampColor(t: number): [number, number, number] {
  const x = Math.min(1, Math.max(0, t));
  if (x < 0.5) {
    const u = x / 0.5;
    return [Math.round(18 + u * (158 - 18)),
            Math.round(24 + u * (40 - 24)),
            Math.round(58 + u * (128 - 58))];
  }
  const u = (x - 0.5) / 0.5;
  return [Math.round(158 + u * (252 - 158)),
          Math.round(40 + u * (220 - 40)),
          Math.round(128 + u * (92 - 128))];
}

export interface HeatModel {
  rows: number;
  cols: number;
  /** RGBA, image row-major (top row first), one pixel per cell. */
  rgba: Uint8ClampedArray;
  maxIndex: number;
  maxValue: number;
  minValue: number;
  /** True when every cell carries the same mass (within float noise). */
  flat: boolean;
}

export function heatToModel(heat: number[], rows: number, cols: number): HeatModel {
  if (heat.length !== rows * cols) {
    throw new Error(`heat length ${heat.length} != ${rows}x${cols}`);
  }
  let maxValue = -Infinity;
  let minValue = Infinity;
  let maxIndex = 0;
  for (let i = 0; i < heat.length; i++) {
    const v = heat[i]!;
    if (v > maxValue) {
      maxValue = v;
      maxIndex = i;
    }
    if (v < minValue) {
      minValue = v;
    }
  }
  const spread = maxValue - minValue;
  const flat = spread <= 1e-15 * Math.max(1, Math.abs(maxValue));
  const rgba = new Uint8ClampedArray(rows * cols * 4);
  for (let r = 0; r < rows; r++) {
    for (let c = 0; c < cols; c++) {
      const cell = r * cols + c;
      const t = flat || maxValue <= 0 ? 0 : heat[cell]! / maxValue;
      const [red, green, blue] = rampColor(t);
      const px = ((rows - 1 - r) * cols + c) * 4;
      rgba[px] = red;
      rgba[px + 1] = green;
      rgba[px + 2] = blue;
      rgba[px + 3] = 255;
    }
  }
  return { rows, cols, rgba, maxIndex, maxValue, minValue, flat };
}

/** World position of the hottest cell's center. */
export function hotCellWorld(model: HeatModel, bounds: WorldBounds): Point {
  return cellCenter(bounds, model.rows, model.cols, model.maxIndex);
}
