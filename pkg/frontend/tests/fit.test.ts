import { describe, expect, it } from "vitest";

import { logLogSlope } from "../src/fit.js";

describe("logLogSlope", () => {
  it("recovers an exact power law", () => {
    const xs = [1e-2, 1e-3, 1e-4];
    const ys = xs.map((x) => 3.7 * x ** 1.5);
    const fit = logLogSlope(xs, ys);
    expect(fit.slope).toBeCloseTo(1.5, 10);
    expect(fit.intercept).toBeCloseTo(Math.log(3.7), 10);
    expect(fit.used).toBe(3);
  });

  it("recovers slope 1 when y equals x", () => {
    const xs = [1e-2, 1e-3, 1e-4];
    const fit = logLogSlope(xs, xs.slice());
    expect(fit.slope).toBeCloseTo(1.0, 12);
  });

  it("skips nonpositive points", () => {
    const fit = logLogSlope([1e-2, 1e-3, 1e-4, 1e-5], [1e-2, 1e-3, 0, -1]);
    expect(fit.used).toBe(2);
    expect(fit.slope).toBeCloseTo(1.0, 10);
  });

  it("rejects degenerate inputs", () => {
    expect(() => logLogSlope([1, 2], [1])).toThrow(/length/);
    expect(() => logLogSlope([1, 0], [1, 1])).toThrow(/two positive points/);
    expect(() => logLogSlope([2, 2], [1, 3])).toThrow(/identical/);
  });
});
