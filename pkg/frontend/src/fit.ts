/** Least-squares slope fitting on log-log points. */

export interface SlopeFit {
  slope: number;
  intercept: number;
  /** number of points actually used (positive x and y only) */
  used: number;
}

/**
 * Ordinary least squares of log(y) against log(x).  Points with
 * non-positive or non-finite coordinates carry no log-log information and
 * are skipped; fitting needs at least two usable points.
 */
export function logLogSlope(xs: number[], ys: number[]): SlopeFit {
  if (xs.length !== ys.length) {
    throw new Error(`length mismatch: ${xs.length} vs ${ys.length}`);
  }
  const lx: number[] = [];
  const ly: number[] = [];
  for (let i = 0; i < xs.length; i++) {
    const x = xs[i] ?? NaN;
    const y = ys[i] ?? NaN;
    if (x > 0 && y > 0 && Number.isFinite(x) && Number.isFinite(y)) {
      lx.push(Math.log(x));
      ly.push(Math.log(y));
    }
  }
  const n = lx.length;
  if (n < 2) {
    throw new Error(`need at least two positive points, got ${n}`);
  }
  const mx = lx.reduce((a, b) => a + b, 0) / n;
  const my = ly.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < n; i++) {
    const dx = (lx[i] ?? 0) - mx;
    sxx += dx * dx;
    sxy += dx * ((ly[i] ?? 0) - my);
  }
  if (sxx === 0) {
    throw new Error("all x values identical; slope undefined");
  }
  const slope = sxy / sxx;
  return { slope, intercept: my - slope * mx, used: n };
}
