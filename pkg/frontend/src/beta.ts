/** Beta density evaluation for the reliability panel. */

// Lanczos approximation, g = 7, nine coefficients. Relative error below
// 1e-13 over the positive reals, far tighter than the panel needs.
const LANCZOS = [
  0.99999999999980993,
  676.5203681218851,
  -1259.1392167224028,
  771.32342877765313,
  -176.61502916214059,
  12.507343278686905,
  -0.13857109526572012,
  9.9843695780195716e-6,
  1.5056327351493116e-7,
];

export function logGamma(x: number): number {
  if (!(x > 0)) {
    throw new Error(`logGamma needs x > 0, got ${x}`);
  }
  if (x < 0.5) {
    // Reflection keeps the series in its accurate range.
    return Math.log(Math.PI / Math.sin(Math.PI * x)) - logGamma(1 - x);
  }
  const z = x - 1;
  let sum = LANCZOS[0]!;
  for (let i = 1; i < LANCZOS.length; i++) {
    sum += LANCZOS[i]! / (z + i);
  }
  const t = z + 7.5;
  return 0.5 * Math.log(2 * Math.PI) + (z + 0.5) * Math.log(t) - t + Math.log(sum);
}

export function logBeta(a: number, b: number): number {
  return logGamma(a) + logGamma(b) - logGamma(a + b);
}

/** Beta(a, b) density at x in (0, 1); 0 and 1 return the density limit. */
export function betaPdf(x: number, a: number, b: number): number {
  if (!(a > 0) || !(b > 0)) {
    throw new Error(`shape parameters must be positive, got (${a}, ${b})`);
  }
  if (x < 0 || x > 1) {
    return 0;
  }
  if (x === 0) {
    return a < 1 ? Infinity : a === 1 ? b : 0;
  }
  if (x === 1) {
    return b < 1 ? Infinity : b === 1 ? a : 0;
  }
  return Math.exp((a - 1) * Math.log(x) + (b - 1) * Math.log(1 - x) - logBeta(a, b));
}

/** Interior mode (a - 1) / (a + b - 2); null when the density has no
 *  interior peak (either shape parameter at or below 1). */
export function betaMode(a: number, b: number): number | null {
  if (a > 1 && b > 1) {
    return (a - 1) / (a + b - 2);
  }
  return null;
}

export interface DensityCurve {
  xs: number[];
  ys: number[];
  peakX: number;
  peakY: number;
}

/** Density sampled at n interior points (i + 0.5) / n. */
export function densityCurve(a: number, b: number, n = 128): DensityCurve {
  const xs: number[] = [];
  const ys: number[] = [];
  let peakX = 0;
  let peakY = -Infinity;
  for (let i = 0; i < n; i++) {
    const x = (i + 0.5) / n;
    const y = betaPdf(x, a, b);
    xs.push(x);
    ys.push(y);
    if (y > peakY) {
      peakY = y;
      peakX = x;
    }
  }
  return { xs, ys, peakX, peakY };
}
