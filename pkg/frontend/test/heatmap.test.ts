import { describe, expect, it } from "vitest";

import { cellCenter } from "../src/geometry.js";
import { heatToModel, hotCellWorld, rampColor } from "../src/heatmap.js";
import { ViewTransform, type WorldBounds } from "../src/transform.js";

const BOUNDS: WorldBounds = [0, 0, 10, 10];

describe("heatToModel", () => {
  it("marks a uniform belief as flat and paints every cell alike", () => {
    const heat = new Array(400).fill(1 / 400);
    const model = heatToModel(heat, 20, 20);
    expect(model.flat).toBe(true);
    const [r0, g0, b0, a0] = [
      model.rgba[0], model.rgba[1], model.rgba[2], model.rgba[3]];
    for (let i = 0; i < 400; i++) {
      expect(model.rgba[4 * i + 0]).toBe(r0);
      expect(model.rgba[4 * i + 1]).toBe(g0);
      expect(model.rgba[4 * i + 2]).toBe(b0);
      expect(model.rgba[4 * i + 3]).toBe(a0);
    }
    expect(a0).toBe(255);
  });

  it("lights exactly one cell for a point-mass belief", () => {
    const heat = new Array(400).fill(0);
    heat[137] = 1;
    const model = heatToModel(heat, 20, 20);
    expect(model.flat).toBe(false);
    expect(model.maxIndex).toBe(137);
    const hot = rampColor(1);
    const cold = rampColor(0);
    for (let cell = 0; cell < 400; cell++) {
      const r = Math.floor(cell / 20);
      const c = cell % 20;
      const px = ((19 - r) * 20 + c) * 4;
      const want = cell === 137 ? hot : cold;
      expect(model.rgba[px + 0]).toBe(want[0]);
      expect(model.rgba[px + 1]).toBe(want[1]);
      expect(model.rgba[px + 2]).toBe(want[2]);
    }
  });

  it("flips rows so low-index cells land at the bottom of the image", () => {
    const heat = new Array(6).fill(0);
    heat[0] = 1;
    const model = heatToModel(heat, 2, 3);
    // Cell 0 is the lower-left; the image stores top row first.
    const hot = rampColor(1);
    const topLeft = [model.rgba[0], model.rgba[1], model.rgba[2]];
    const bottomLeftPx = 4 * (1 * 3 + 0);
    const bottomLeft = [
      model.rgba[bottomLeftPx + 0],
      model.rgba[bottomLeftPx + 1],
      model.rgba[bottomLeftPx + 2],
    ];
    expect(bottomLeft).toEqual([hot[0], hot[1], hot[2]]);
    expect(topLeft).not.toEqual([hot[0], hot[1], hot[2]]);
  });

  it("rejects a heat array that disagrees with the grid shape", () => {
    expect(() => heatToModel([1, 2, 3], 2, 2)).toThrow(/length/);
  });
});

describe("hotCellWorld", () => {
  it("projects the hottest cell to the canvas position of its center", () => {
    const heat = new Array(400).fill(1e-6);
    heat[293] = 1;
    const model = heatToModel(heat, 20, 20);
    const world = hotCellWorld(model, BOUNDS);
    expect(world).toEqual(cellCenter(BOUNDS, 20, 20, 293));
    const view = new ViewTransform(BOUNDS, 800, 800);
    const px = view.worldToPx(world);
    const direct = view.worldToPx(cellCenter(BOUNDS, 20, 20, 293));
    expect(px[0]).toBe(direct[0]);
    expect(px[1]).toBe(direct[1]);
  });
});

describe("rampColor", () => {
  it("clamps and stays monotone in perceived intensity", () => {
    expect(rampColor(-0.5)).toEqual(rampColor(0));
    expect(rampColor(1.5)).toEqual(rampColor(1));
    const lum = (rgb: readonly [number, number, number]): number =>
      0.2126 * rgb[0] + 0.7152 * rgb[1] + 0.0722 * rgb[2];
    let prev = -1;
    for (let i = 0; i <= 10; i++) {
      const cur = lum(rampColor(i / 10));
      expect(cur).toBeGreaterThan(prev);
      prev = cur;
    }
  });
});
