/**
 * Strict reader for the versioned report CSV written by the simulation CLI.
 *
 * Layout:
 *   # fluctuon-csv v1
 *   # kind=<clt|moments|moser> seed=<int> config_hash=<hex>
 *   epsilon,M,F1,F3,mean_sq_err,ci_lo,ci_hi,bound,ratio
 *   <one numeric row per epsilon>
 *
 * Anything else — wrong schema line, unknown kind, missing or reordered
 * columns, non-numeric cells, empty table — is refused with a precise
 * error rather than rendered from guesswork.
 */

export const CSV_SCHEMA = "fluctuon-csv v1";

export const CSV_COLUMNS = [
  "epsilon",
  "M",
  "F1",
  "F3",
  "mean_sq_err",
  "ci_lo",
  "ci_hi",
  "bound",
  "ratio",
] as const;

export type ColumnName = (typeof CSV_COLUMNS)[number];

export type ReportKind = "clt" | "moments" | "moser";

export interface ReportRow {
  epsilon: number;
  M: number;
  F1: number;
  F3: number;
  mean_sq_err: number;
  ci_lo: number;
  ci_hi: number;
  bound: number;
  ratio: number;
}

export interface Report {
  kind: ReportKind;
  seed: string;
  configHash: string;
  rows: ReportRow[];
}

export class CsvFormatError extends Error {}

const KINDS: ReadonlySet<string> = new Set(["clt", "moments", "moser"]);

function parseMetaLine(line: string): { kind: ReportKind; seed: string; configHash: string } {
  const body = line.replace(/^#\s*/, "");
  const fields = new Map<string, string>();
  for (const token of body.split(/\s+/)) {
    if (token === "") continue;
    const eq = token.indexOf("=");
    if (eq <= 0) {
      throw new CsvFormatError(`malformed metadata token ${JSON.stringify(token)}`);
    }
    fields.set(token.slice(0, eq), token.slice(eq + 1));
  }
  const kind = fields.get("kind");
  if (kind === undefined || !KINDS.has(kind)) {
    throw new CsvFormatError(`metadata kind missing or unknown: ${JSON.stringify(kind)}`);
  }
  return {
    kind: kind as ReportKind,
    seed: fields.get("seed") ?? "",
    configHash: fields.get("config_hash") ?? "",
  };
}

export function parseReport(text: string): Report {
  const lines = text.split(/\r?\n/).filter((l) => l.trim() !== "");
  if (lines.length === 0) {
    throw new CsvFormatError("empty input");
  }

  const schemaLine = (lines[0] ?? "").replace(/^#\s*/, "").trim();
  if (!lines[0]?.startsWith("#") || schemaLine !== CSV_SCHEMA) {
    throw new CsvFormatError(
      `unsupported schema: expected "${CSV_SCHEMA}", got ${JSON.stringify(schemaLine)}`,
    );
  }

  if (lines.length < 2 || !lines[1]?.startsWith("#")) {
    throw new CsvFormatError("missing metadata line (# kind=... seed=... config_hash=...)");
  }
  const meta = parseMetaLine(lines[1]);

  if (lines.length < 3) {
    throw new CsvFormatError("missing column header line");
  }
  const header = (lines[2] ?? "").split(",").map((h) => h.trim());
  if (header.length !== CSV_COLUMNS.length || header.some((h, i) => h !== CSV_COLUMNS[i])) {
    throw new CsvFormatError(
      `column header mismatch: expected [${CSV_COLUMNS.join(",")}], got [${header.join(",")}]`,
    );
  }

  const rows: ReportRow[] = [];
  for (let i = 3; i < lines.length; i++) {
    const line = lines[i] ?? "";
    if (line.startsWith("#")) continue;
    const cells = line.split(",");
    if (cells.length !== CSV_COLUMNS.length) {
      throw new CsvFormatError(`row ${i - 2}: expected ${CSV_COLUMNS.length} cells, got ${cells.length}`);
    }
    const row = {} as Record<ColumnName, number>;
    for (let j = 0; j < CSV_COLUMNS.length; j++) {
      const raw = (cells[j] ?? "").trim();
      const value = raw === "inf" ? Infinity : raw === "nan" ? NaN : Number(raw);
      if (raw === "" || (Number.isNaN(value) && raw !== "nan")) {
        throw new CsvFormatError(
          `row ${i - 2}, column ${CSV_COLUMNS[j]}: non-numeric cell ${JSON.stringify(raw)}`,
        );
      }
      row[CSV_COLUMNS[j] as ColumnName] = value;
    }
    rows.push(row as unknown as ReportRow);
  }

  if (rows.length === 0) {
    throw new CsvFormatError("table has no data rows");
  }
  for (const row of rows) {
    if (!(row.epsilon > 0)) {
      throw new CsvFormatError(`epsilon must be positive, got ${row.epsilon}`);
    }
  }
  return { kind: meta.kind, seed: meta.seed, configHash: meta.configHash, rows };
}
