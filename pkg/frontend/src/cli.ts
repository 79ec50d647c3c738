#!/usr/bin/env node
/**
 * Render an SVG figure from a simulation report CSV.
 *
 * Usage:
 *   fluctuon-figures <report.csv> [--out figure.svg]
 *
 * The plot kind (clt / moments / moser) is taken from the CSV's own
 * metadata line.  Prints the fitted log-log slope for the rate plots so
 * convergence-order checks can be scripted against stdout.
 */

import { readFileSync, writeFileSync } from "node:fs";

import { CsvFormatError, parseReport } from "./csv.js";
import { renderFigure } from "./svg.js";

export function main(argv: string[]): number {
  const args = [...argv];
  let out: string | undefined;
  const positional: string[] = [];
  while (args.length > 0) {
    const a = args.shift() as string;
    if (a === "--out") {
      out = args.shift();
      if (out === undefined) {
        console.error("--out needs a path");
        return 2;
      }
    } else if (a === "--help" || a === "-h") {
      console.log("usage: fluctuon-figures <report.csv> [--out figure.svg]");
      return 0;
    } else {
      positional.push(a);
    }
  }
  if (positional.length !== 1) {
    console.error("usage: fluctuon-figures <report.csv> [--out figure.svg]");
    return 2;
  }
  const csvPath = positional[0] as string;

  let text: string;
  try {
    text = readFileSync(csvPath, "utf-8");
  } catch (err) {
    console.error(`cannot read ${csvPath}: ${(err as Error).message}`);
    return 2;
  }

  try {
    const report = parseReport(text);
    const { svg, slope } = renderFigure(report);
    const dest = out ?? csvPath.replace(/\.csv$/, "") + ".svg";
    writeFileSync(dest, svg);
    console.log(`figure written to ${dest}`);
    if (slope !== undefined) {
      console.log(`fitted log-log slope = ${slope.toFixed(3)}`);
    }
    return 0;
  } catch (err) {
    if (err instanceof CsvFormatError) {
      console.error(`refusing ${csvPath}: ${err.message}`);
      return 3;
    }
    throw err;
  }
}

if (process.argv[1] && /cli\.(ts|js)$/.test(process.argv[1])) {
  process.exit(main(process.argv.slice(2)));
}
