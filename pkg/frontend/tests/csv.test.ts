import { describe, expect, it } from "vitest";

import { CSV_COLUMNS, CsvFormatError, parseReport } from "../src/csv.js";

const HEADER = CSV_COLUMNS.join(",");

function makeCsv(rows: string[], opts: { schema?: string; meta?: string; header?: string } = {}): string {
  return [
    opts.schema ?? "# fluctuon-csv v1",
    opts.meta ?? "# kind=clt seed=0 config_hash=abc123def456",
    opts.header ?? HEADER,
    ...rows,
  ].join("\n");
}

const ROW1 = "0.01,1,3.0,26.31894506957162,0.0032,0.003,0.0034,0.004,0.8";
const ROW2 = "0.001,2,5.0,394.7841760435743,0.0016,0.0015,0.0017,0.002,0.8";

describe("parseReport", () => {
  it("parses a well-formed report", () => {
    const report = parseReport(makeCsv([ROW1, ROW2]));
    expect(report.kind).toBe("clt");
    expect(report.seed).toBe("0");
    expect(report.configHash).toBe("abc123def456");
    expect(report.rows).toHaveLength(2);
    expect(report.rows[0]!.epsilon).toBe(0.01);
    expect(report.rows[1]!.M).toBe(2);
    expect(report.rows[1]!.mean_sq_err).toBeCloseTo(0.0016, 12);
  });

  it("refuses a future schema version", () => {
    expect(() => parseReport(makeCsv([ROW1], { schema: "# fluctuon-csv v2" }))).toThrow(
      CsvFormatError,
    );
    expect(() => parseReport(makeCsv([ROW1], { schema: "# fluctuon-csv v2" }))).toThrow(
      /unsupported schema/,
    );
  });

  it("refuses input without the schema comment", () => {
    expect(() => parseReport([HEADER, ROW1].join("\n"))).toThrow(/unsupported schema/);
  });

  it("refuses missing or reordered columns", () => {
    const missing = CSV_COLUMNS.slice(0, -1).join(",");
    expect(() => parseReport(makeCsv([ROW1], { header: missing }))).toThrow(/column header/);
    const reordered = [...CSV_COLUMNS].reverse().join(",");
    expect(() => parseReport(makeCsv([ROW1], { header: reordered }))).toThrow(/column header/);
  });

  it("refuses an empty table", () => {
    expect(() => parseReport(makeCsv([]))).toThrow(/no data rows/);
  });

  it("refuses non-numeric cells", () => {
    const bad = "0.01,1,3.0,26.3,oops,0.003,0.0034,0.004,0.8";
    expect(() => parseReport(makeCsv([bad]))).toThrow(/non-numeric/);
  });

  it("refuses rows with the wrong cell count", () => {
    expect(() => parseReport(makeCsv(["0.01,1,3.0"]))).toThrow(/cells/);
  });

  it("refuses unknown kinds", () => {
    expect(() => parseReport(makeCsv([ROW1], { meta: "# kind=magic seed=0 config_hash=x" }))).toThrow(
      /kind/,
    );
  });

  it("refuses nonpositive epsilon", () => {
    const bad = "-0.01,1,3.0,26.3,0.0032,0.003,0.0034,0.004,0.8";
    expect(() => parseReport(makeCsv([bad]))).toThrow(/epsilon/);
  });

  it("accepts nan and inf spelled as python emits them", () => {
    const row = "0.01,1,3.0,26.3,0.0032,0.003,0.0034,inf,nan";
    const report = parseReport(makeCsv([row]));
    expect(report.rows[0]!.bound).toBe(Infinity);
    expect(Number.isNaN(report.rows[0]!.ratio)).toBe(true);
  });

  it("parses moser and moments kinds", () => {
    for (const kind of ["moser", "moments"] as const) {
      const report = parseReport(makeCsv([ROW1], { meta: `# kind=${kind} seed=3 config_hash=ff` }));
      expect(report.kind).toBe(kind);
    }
  });
});
