import { describe, expect, it } from "vitest";

import {
  cellCenter,
  closeStroke,
  countEnclosed,
  decimate,
  pointInPolygon,
  pointsInPolygon,
  selfIntersects,
  simplifyStroke,
} from "../src/geometry.js";
import type { Point } from "../src/protocol.js";
import type { WorldBounds } from "../src/transform.js";

const SQUARE: Point[] = [[0, 0], [4, 0], [4, 4], [0, 4]];

describe("pointsInPolygon", () => {
  it("classifies interior, exterior, and boundary (inclusive)", () => {
    const pts: Point[] = [[2, 2], [5, 2], [4, 2], [0, 0], [2, 4], [-0.001, 2]];
    expect(pointsInPolygon(pts, SQUARE)).toEqual(
      [true, false, true, true, true, false]);
  });

  it("is invariant to vertex order reversal", () => {
    const reversed = SQUARE.slice().reverse();
    const pts: Point[] = [[2, 2], [5, 5], [4, 4], [1e-9, 2]];
    expect(pointsInPolygon(pts, reversed)).toEqual(pointsInPolygon(pts, SQUARE));
  });

  it("handles a concave L-shape", () => {
    const ell: Point[] = [[0, 0], [4, 0], [4, 2], [2, 2], [2, 4], [0, 4]];
    expect(pointInPolygon([1, 3], ell)).toBe(true);
    expect(pointInPolygon([3, 3], ell)).toBe(false);
    expect(pointInPolygon([3, 1], ell)).toBe(true);
    expect(pointInPolygon([2, 3], ell)).toBe(true);
  });

  it("rejects degenerate vertex lists", () => {
    expect(() => pointsInPolygon([[0, 0]], [[0, 0], [1, 1]])).toThrow(/3 vertices/);
  });
});

describe("selfIntersects", () => {
  it("flags a bowtie", () => {
    expect(selfIntersects([[0, 0], [2, 2], [2, 0], [0, 2]])).toBe(true);
  });

  it("accepts convex and concave simple polygons", () => {
    expect(selfIntersects(SQUARE)).toBe(false);
    expect(selfIntersects([[0, 0], [4, 0], [4, 2], [2, 2], [2, 4], [0, 4]]))
      .toBe(false);
  });

  it("allows non-adjacent edges to touch without a proper crossing", () => {
    // Vertex of one edge lies on another edge: touching, not crossing.
    expect(selfIntersects([[0, 0], [4, 0], [4, 4], [2, 0]])).toBe(false);
  });
});

describe("stroke processing", () => {
  it("simplifyStroke drops points closer than the threshold to the last kept", () => {
    const raw: Point[] = [[0, 0], [0.5, 0], [1.9, 0], [2.1, 0], [3, 0], [5.5, 0]];
    expect(simplifyStroke(raw, 2)).toEqual([[0, 0], [2.1, 0], [5.5, 0]]);
  });

  it("simplifyStroke keeps every vertex at least the threshold apart", () => {
    const raw: Point[] = [];
    for (let i = 0; i < 500; i++) {
      const a = (i / 500) * 2 * Math.PI;
      raw.push([200 + 100 * Math.cos(a), 200 + 100 * Math.sin(a)]);
    }
    const kept = simplifyStroke(raw, 2);
    for (let i = 1; i < kept.length; i++) {
      const [ux, uy] = kept[i - 1]!;
      const [vx, vy] = kept[i]!;
      expect(Math.hypot(vx - ux, vy - uy)).toBeGreaterThanOrEqual(2);
    }
    expect(kept[0]).toEqual(raw[0]);
  });

  it("closeStroke trims trailing points that crowd the start", () => {
    const stroke: Point[] = [[0, 0], [10, 0], [10, 10], [0, 10], [0.5, 1.0], [0.2, 0.3]];
    expect(closeStroke(stroke, 2)).toEqual([[0, 0], [10, 0], [10, 10], [0, 10]]);
  });

  it("decimate enforces the vertex budget and keeps the endpoints", () => {
    const raw: Point[] = [];
    for (let i = 0; i < 500; i++) {
      raw.push([i, i * i]);
    }
    const out = decimate(raw, 64);
    expect(out.length).toBe(64);
    expect(out[0]).toEqual([0, 0]);
    expect(out[out.length - 1]).toEqual(raw[raw.length - 1]);
    expect(decimate(raw.slice(0, 10), 64).length).toBe(10);
  });
});

describe("grid mirroring", () => {
  const BOUNDS: WorldBounds = [0, 0, 10, 10];

  it("cellCenter walks row-major from the lower-left", () => {
    expect(cellCenter([0, 0, 4, 2], 2, 4, 0)).toEqual([0.5, 0.5]);
    expect(cellCenter([0, 0, 4, 2], 2, 4, 7)).toEqual([3.5, 1.5]);
  });

  it("countEnclosed matches hand counts on the reference grid", () => {
    // [4.5, 5.5]^2 holds the 0.5 m cell centers at 4.75 and 5.25 per axis.
    const square: Point[] = [[4.5, 4.5], [5.5, 4.5], [5.5, 5.5], [4.5, 5.5]];
    expect(countEnclosed(BOUNDS, 20, 20, square)).toBe(4);
    const all: Point[] = [[-1, -1], [11, -1], [11, 11], [-1, 11]];
    expect(countEnclosed(BOUNDS, 20, 20, all)).toBe(400);
    const sliver: Point[] = [[4.9, 4.9], [5.1, 4.9], [5.1, 5.1], [4.9, 5.1]];
    expect(countEnclosed(BOUNDS, 20, 20, sliver)).toBe(0);
  });

  it("counts boundary cell centers as enclosed", () => {
    const onCenters: Point[] = [[4.75, 4.75], [5.25, 4.75], [5.25, 5.25], [4.75, 5.25]];
    expect(countEnclosed(BOUNDS, 20, 20, onCenters)).toBe(4);
  });
});
