/**
 * SVG rendering of convergence reports.
 *
 * clt / moser: log-log axes — headline statistic vs epsilon, 95% CI
 * whiskers from the ci_lo/ci_hi columns, dashed overlay of the bound
 * column, and a caption carrying the fitted log-log slope.
 * moments: log-x, linear-y plot of the bound ratio (no slope caption; the
 * criterion there is boundedness, not a rate).
 *
 * Rendering is a pure function of the parsed report: same input text,
 * same output bytes.
 */

import type { Report, ReportRow } from "./csv.js";
import { logLogSlope } from "./fit.js";

export interface RenderResult {
  svg: string;
  /** fitted log-log slope of the statistic vs epsilon, when defined */
  slope?: number;
}

const WIDTH = 640;
const HEIGHT = 440;
const MARGIN = { left: 70, right: 24, top: 44, bottom: 86 };

const PLOT_W = WIDTH - MARGIN.left - MARGIN.right;
const PLOT_H = HEIGHT - MARGIN.top - MARGIN.bottom;

const POINT_COLOR = "#1f5fbf";
const BOUND_COLOR = "#c23b22";
const AXIS_COLOR = "#333333";
const GRID_COLOR = "#dddddd";

function fmt(v: number): string {
  return Number(v.toPrecision(6)).toString();
}

function fmtTick(v: number): string {
  const e = Math.log10(v);
  if (Number.isInteger(e)) return `1e${e}`;
  return v.toPrecision(2);
}

interface Scale {
  (v: number): number;
  ticks: number[];
}

function logScale(min: number, max: number, rangeLo: number, rangeHi: number): Scale {
  const lmin = Math.log10(min);
  const lmax = Math.log10(max);
  const span = lmax - lmin || 1;
  const fn = ((v: number) =>
    rangeLo + ((Math.log10(v) - lmin) / span) * (rangeHi - rangeLo)) as Scale;
  const ticks: number[] = [];
  for (let e = Math.ceil(lmin); e <= Math.floor(lmax); e++) ticks.push(10 ** e);
  if (ticks.length === 0) ticks.push(min, max);
  fn.ticks = ticks;
  return fn;
}

function linScale(min: number, max: number, rangeLo: number, rangeHi: number): Scale {
  const span = max - min || 1;
  const fn = ((v: number) => rangeLo + ((v - min) / span) * (rangeHi - rangeLo)) as Scale;
  const n = 5;
  fn.ticks = Array.from({ length: n + 1 }, (_, i) => min + (i * span) / n);
  return fn;
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

const TITLES: Record<Report["kind"], { title: string; yLabel: string }> = {
  clt: { title: "Coupling error vs noise strength", yLabel: "mean squared coupling error" },
  moser: { title: "Lower-tail probability vs noise strength", yLabel: "dip probability" },
  moments: { title: "Moment-to-bound ratio vs noise strength", yLabel: "moment / bound" },
};

function positives(values: number[]): number[] {
  return values.filter((v) => v > 0 && Number.isFinite(v));
}

export function renderFigure(report: Report): RenderResult {
  const { kind, rows } = report;
  const meta = TITLES[kind];
  const logY = kind !== "moments";
  const yOf = (r: ReportRow) => (kind === "moments" ? r.ratio : r.mean_sq_err);

  const xs = rows.map((r) => r.epsilon);
  const ys = rows.map(yOf);

  const xAll = positives(xs);
  const xScale = logScale(
    Math.min(...xAll) / 1.5,
    Math.max(...xAll) * 1.5,
    MARGIN.left,
    MARGIN.left + PLOT_W,
  );

  const yCandidates = logY
    ? positives([...ys, ...rows.map((r) => r.ci_lo), ...rows.map((r) => r.ci_hi), ...rows.map((r) => r.bound)])
    : [...ys, ...rows.map((r) => r.ci_lo), ...rows.map((r) => r.ci_hi), ...rows.map((r) => r.bound)].filter(Number.isFinite);
  if (yCandidates.length === 0) {
    throw new Error("no plottable values in the report");
  }
  const yMinRaw = Math.min(...yCandidates);
  const yMaxRaw = Math.max(...yCandidates);
  const yScale = logY
    ? logScale(yMinRaw / 2, yMaxRaw * 2, MARGIN.top + PLOT_H, MARGIN.top)
    : linScale(Math.min(0, yMinRaw), yMaxRaw * 1.1, MARGIN.top + PLOT_H, MARGIN.top);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
    `<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-size="16">${escapeXml(meta.title)}</text>`,
  );

  // gridlines + ticks
  for (const t of xScale.ticks) {
    const x = xScale(t);
    parts.push(
      `<line x1="${fmt(x)}" y1="${MARGIN.top}" x2="${fmt(x)}" y2="${MARGIN.top + PLOT_H}" stroke="${GRID_COLOR}"/>`,
      `<text x="${fmt(x)}" y="${MARGIN.top + PLOT_H + 18}" text-anchor="middle" font-size="11" fill="${AXIS_COLOR}">${fmtTick(t)}</text>`,
    );
  }
  for (const t of yScale.ticks) {
    const y = yScale(t);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${fmt(y)}" x2="${MARGIN.left + PLOT_W}" y2="${fmt(y)}" stroke="${GRID_COLOR}"/>`,
      `<text x="${MARGIN.left - 8}" y="${fmt(y + 4)}" text-anchor="end" font-size="11" fill="${AXIS_COLOR}">${logY ? fmtTick(t) : Number(t.toPrecision(3))}</text>`,
    );
  }

  // axes
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${PLOT_W}" height="${PLOT_H}" fill="none" stroke="${AXIS_COLOR}"/>`,
    `<text x="${MARGIN.left + PLOT_W / 2}" y="${MARGIN.top + PLOT_H + 40}" text-anchor="middle" font-size="13" fill="${AXIS_COLOR}">epsilon</text>`,
    `<text x="20" y="${MARGIN.top + PLOT_H / 2}" text-anchor="middle" font-size="13" fill="${AXIS_COLOR}" transform="rotate(-90 20 ${MARGIN.top + PLOT_H / 2})">${escapeXml(meta.yLabel)}</text>`,
  );

  // bound overlay (dashed), skipping values a log axis cannot show
  const boundPts = rows
    .filter((r) => Number.isFinite(r.bound) && (!logY ? true : r.bound > 0))
    .map((r) => `${fmt(xScale(r.epsilon))},${fmt(yScale(r.bound))}`);
  if (boundPts.length >= 2) {
    parts.push(
      `<polyline points="${boundPts.join(" ")}" fill="none" stroke="${BOUND_COLOR}" stroke-width="1.5" stroke-dasharray="6,4" class="bound"/>`,
    );
  }

  // CI whiskers and data points
  for (const r of rows) {
    const x = xScale(r.epsilon);
    const lo = r.ci_lo;
    const hi = r.ci_hi;
    if (Number.isFinite(lo) && Number.isFinite(hi) && (!logY || (lo > 0 && hi > 0))) {
      const yLo = yScale(lo);
      const yHi = yScale(hi);
      parts.push(
        `<line x1="${fmt(x)}" y1="${fmt(yLo)}" x2="${fmt(x)}" y2="${fmt(yHi)}" stroke="${POINT_COLOR}" class="whisker"/>`,
        `<line x1="${fmt(x - 4)}" y1="${fmt(yLo)}" x2="${fmt(x + 4)}" y2="${fmt(yLo)}" stroke="${POINT_COLOR}"/>`,
        `<line x1="${fmt(x - 4)}" y1="${fmt(yHi)}" x2="${fmt(x + 4)}" y2="${fmt(yHi)}" stroke="${POINT_COLOR}"/>`,
      );
    }
    const y = yOf(r);
    if (!logY || y > 0) {
      parts.push(
        `<circle cx="${fmt(x)}" cy="${fmt(yScale(y))}" r="4" fill="${POINT_COLOR}" class="point"/>`,
      );
    }
  }

  // legend
  const legendY = MARGIN.top + 10;
  parts.push(
    `<circle cx="${MARGIN.left + 14}" cy="${legendY}" r="4" fill="${POINT_COLOR}"/>`,
    `<text x="${MARGIN.left + 24}" y="${legendY + 4}" font-size="11" fill="${AXIS_COLOR}">measured (95% CI)</text>`,
    `<line x1="${MARGIN.left + 150}" y1="${legendY}" x2="${MARGIN.left + 180}" y2="${legendY}" stroke="${BOUND_COLOR}" stroke-dasharray="6,4"/>`,
    `<text x="${MARGIN.left + 188}" y="${legendY + 4}" font-size="11" fill="${AXIS_COLOR}">fitted bound</text>`,
  );

  // caption with fitted slope (positive points only)
  let slope: number | undefined;
  if (logY) {
    const px: number[] = [];
    const py: number[] = [];
    for (const r of rows) {
      const y = yOf(r);
      if (y > 0 && r.epsilon > 0) {
        px.push(r.epsilon);
        py.push(y);
      }
    }
    if (px.length >= 2) {
      slope = logLogSlope(px, py).slope;
    }
  }
  const captionBits = [
    `kind=${kind}`,
    `rows=${rows.length}`,
    report.configHash ? `config=${report.configHash}` : "",
    slope !== undefined ? `fitted log-log slope=${slope.toFixed(3)}` : "",
  ].filter((s) => s !== "");
  parts.push(
    `<text x="${MARGIN.left}" y="${HEIGHT - 16}" font-size="12" fill="${AXIS_COLOR}" class="caption">${escapeXml(captionBits.join("   "))}</text>`,
    `</svg>`,
  );

  return { svg: parts.join("\n"), slope };
}
