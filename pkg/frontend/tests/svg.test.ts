import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { main } from "../src/cli.js";
import { CSV_COLUMNS, parseReport } from "../src/csv.js";
import { renderFigure } from "../src/svg.js";

/** Synthetic clt report with mean_sq_err exactly equal to epsilon. */
function syntheticCltCsv(): string {
  const eps = [1e-2, 1e-3, 1e-4];
  const lines = [
    "# fluctuon-csv v1",
    "# kind=clt seed=0 config_hash=0123456789ab",
    CSV_COLUMNS.join(","),
  ];
  for (const e of eps) {
    const err = e;
    lines.push(
      [e, 1, 3.0, 26.3, err, err * 0.9, err * 1.1, err * 2, 0.5].join(","),
    );
  }
  return lines.join("\n") + "\n";
}

describe("renderFigure", () => {
  it("draws one point and one whisker per row plus the bound overlay", () => {
    const report = parseReport(syntheticCltCsv());
    const { svg } = renderFigure(report);
    expect(svg.startsWith("<svg")).toBe(true);
    expect((svg.match(/class="point"/g) ?? []).length).toBe(3);
    expect((svg.match(/class="whisker"/g) ?? []).length).toBe(3);
    expect((svg.match(/class="bound"/g) ?? []).length).toBe(1);
    expect(svg).toContain("epsilon");
  });

  it("prints slope 1.00 +- 0.05 for err = epsilon exactly", () => {
    const report = parseReport(syntheticCltCsv());
    const { slope, svg } = renderFigure(report);
    expect(slope).toBeDefined();
    expect(Math.abs((slope as number) - 1.0)).toBeLessThanOrEqual(0.05);
    expect(svg).toContain("fitted log-log slope=1.000");
  });

  it("is a pure function of the CSV text", () => {
    const a = renderFigure(parseReport(syntheticCltCsv()));
    const b = renderFigure(parseReport(syntheticCltCsv()));
    expect(a.svg).toBe(b.svg);
    expect(a.slope).toBe(b.slope);
  });

  it("handles zero-probability rows on the log axis by omission", () => {
    const lines = [
      "# fluctuon-csv v1",
      "# kind=moser seed=0 config_hash=ab",
      CSV_COLUMNS.join(","),
      [1e-2, 1, 3.0, 26.3, 0.5, 0.4, 0.6, 1.0, 0.5].join(","),
      [1e-3, 2, 5.0, 394.8, 0.0, 0.0, 0.05, 0.9, 0.0].join(","),
    ];
    const { svg } = renderFigure(parseReport(lines.join("\n")));
    expect((svg.match(/class="point"/g) ?? []).length).toBe(1);
  });

  it("renders a linear-axis ratio plot for moments without a slope", () => {
    const lines = [
      "# fluctuon-csv v1",
      "# kind=moments seed=0 config_hash=ab",
      CSV_COLUMNS.join(","),
      [1e-2, 1, 3.0, 26.3, 12.0, 11.0, 13.0, 140.0, 8.5e-2].join(","),
      [1e-3, 2, 5.0, 394.8, 30.0, 29.0, 31.0, 400.0, 7.5e-2].join(","),
    ];
    const result = renderFigure(parseReport(lines.join("\n")));
    expect(result.slope).toBeUndefined();
    expect(result.svg).not.toContain("fitted log-log slope");
  });
});

describe("cli", () => {
  it("writes the figure and prints the fitted slope", () => {
    const dir = mkdtempSync(join(tmpdir(), "figures-"));
    const csvPath = join(dir, "clt_s0_0123456789ab.csv");
    writeFileSync(csvPath, syntheticCltCsv());
    const outPath = join(dir, "fig.svg");

    const logs: string[] = [];
    const orig = console.log;
    console.log = (msg: unknown) => logs.push(String(msg));
    try {
      const rc = main([csvPath, "--out", outPath]);
      expect(rc).toBe(0);
    } finally {
      console.log = orig;
    }
    expect(readFileSync(outPath, "utf-8")).toContain("<svg");
    const slopeLine = logs.find((l) => l.startsWith("fitted log-log slope"));
    expect(slopeLine).toBeDefined();
    const slope = Number((slopeLine as string).split("=")[1]);
    expect(Math.abs(slope - 1.0)).toBeLessThanOrEqual(0.05);
  });

  it("refuses a schema mismatch with a nonzero exit code", () => {
    const dir = mkdtempSync(join(tmpdir(), "figures-"));
    const csvPath = join(dir, "bad.csv");
    writeFileSync(csvPath, syntheticCltCsv().replace("v1", "v2"));

    const errors: string[] = [];
    const orig = console.error;
    console.error = (msg: unknown) => errors.push(String(msg));
    try {
      const rc = main([csvPath]);
      expect(rc).toBe(3);
    } finally {
      console.error = orig;
    }
    expect(errors.join("\n")).toMatch(/unsupported schema/);
  });

  it("rejects bad usage", () => {
    const orig = console.error;
    console.error = () => undefined;
    try {
      expect(main([])).toBe(2);
      expect(main(["a.csv", "--out"])).toBe(2);
    } finally {
      console.error = orig;
    }
  });
});
