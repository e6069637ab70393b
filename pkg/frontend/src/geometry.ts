/** Polygon and stroke geometry.
 *
 * pointsInPolygon and selfIntersects mirror the service's particle-masking
 * rules operation for operation (same epsilon, same crossing test, same
 * boundary-inclusive semantics), so the console's predicted enclosure count
 * matches the server ack for the same resolved vertices.
 */

import type { Point } from "./protocol.js";
import type { WorldBounds } from "./transform.js";

const EDGE_EPS = 1e-12;

/** Boundary-inclusive membership of each point in a simple polygon. */
export function pointsInPolygon(points: Point[], verts: Point[]): boolean[] {
  const n = verts.length;
  if (n < 3) {
    throw new Error(`polygon needs >= 3 vertices, got ${n}`);
  }
  let scale = 1.0;
  for (const [vx, vy] of verts) {
    scale = Math.max(scale, Math.abs(vx), Math.abs(vy));
  }
  const eps = EDGE_EPS * scale;

  return points.map(([x, y]) => {
    let inside = false;
    let onEdge = false;
    for (let i = 0; i < n; i++) {
      const [x1, y1] = verts[i]!;
      const [x2, y2] = verts[(i + 1) % n]!;
      const cross = (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1);
      const collinear =
        Math.abs(cross) <= eps * Math.max(1.0, Math.hypot(x2 - x1, y2 - y1));
      const inBox = x >= Math.min(x1, x2) - eps && x <= Math.max(x1, x2) + eps
        && y >= Math.min(y1, y2) - eps && y <= Math.max(y1, y2) + eps;
      onEdge = onEdge || (collinear && inBox);
      // Half-open in y so a shared vertex counts once.
      if ((y1 > y) !== (y2 > y)) {
        const xInt = x1 + (y - y1) * (x2 - x1) / (y2 - y1);
        if (x < xInt) {
          inside = !inside;
        }
      }
    }
    return inside || onEdge;
  });
}

export function pointInPolygon(point: Point, verts: Point[]): boolean {
  return pointsInPolygon([point], verts)[0]!;
}

/** Proper crossing between non-adjacent edges; shared endpoints allowed. */
export function selfIntersects(verts: Point[]): boolean {
  const n = verts.length;
  const orient = (a: Point, b: Point, c: Point): number =>
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
  for (let i = 0; i < n; i++) {
    for (let j = i + 1; j < n; j++) {
      if (j - i === 1 || (i === 0 && j === n - 1)) {
        continue;
      }
      const a = verts[i]!;
      const b = verts[(i + 1) % n]!;
      const c = verts[j]!;
      const d = verts[(j + 1) % n]!;
      const d1 = orient(a, b, c);
      const d2 = orient(a, b, d);
      const d3 = orient(c, d, a);
      const d4 = orient(c, d, b);
      if ((d1 > 0) !== (d2 > 0) && (d3 > 0) !== (d4 > 0) && d1 !== 0 && d2 !== 0) {
        return true;
      }
    }
  }
  return false;
}

/** Drop points closer than minDist to the running simplification. */
export function simplifyStroke(points: Point[], minDist = 2): Point[] {
  const kept: Point[] = [];
  for (const p of points) {
    const last = kept[kept.length - 1];
    if (last === undefined || Math.hypot(p[0] - last[0], p[1] - last[1]) >= minDist) {
      kept.push(p);
    }
  }
  return kept;
}

/** Remove trailing vertices that sit within minDist of the first vertex.
 *
 * The polygon's closing edge is implicit, so a stroke that returns to its
 * start must not keep a duplicate of the start point.
 */
export function closeStroke(points: Point[], minDist = 2): Point[] {
  const out = points.slice();
  const first = out[0];
  if (first === undefined) {
    return out;
  }
  while (out.length > 1) {
    const last = out[out.length - 1]!;
    if (Math.hypot(last[0] - first[0], last[1] - first[1]) >= minDist) {
      break;
    }
    out.pop();
  }
  return out;
}

/** Uniform decimation to at most maxN vertices, keeping the endpoints. */
export function decimate(points: Point[], maxN: number): Point[] {
  if (points.length <= maxN) {
    return points.slice();
  }
  const out: Point[] = [];
  const step = (points.length - 1) / (maxN - 1);
  for (let i = 0; i < maxN; i++) {
    out.push(points[Math.round(i * step)]!);
  }
  return out;
}

/** World position of a grid cell center; row-major from the lower-left. */
export function cellCenter(bounds: WorldBounds, rows: number, cols: number,
                           index: number): Point {
  const [xmin, ymin, xmax, ymax] = bounds;
  const dx = (xmax - xmin) / cols;
  const dy = (ymax - ymin) / rows;
  const r = Math.floor(index / cols);
  const c = index % cols;
  return [xmin + (c + 0.5) * dx, ymin + (r + 0.5) * dy];
}

/** Client-side mirror of the server's enclosure count for a world polygon. */
export function countEnclosed(bounds: WorldBounds, rows: number, cols: number,
                              worldVerts: Point[]): number {
  const centers: Point[] = [];
  for (let i = 0; i < rows * cols; i++) {
    centers.push(cellCenter(bounds, rows, cols, i));
  }
  let m = 0;
  for (const hit of pointsInPolygon(centers, worldVerts)) {
    if (hit) {
      m++;
    }
  }
  return m;
}
