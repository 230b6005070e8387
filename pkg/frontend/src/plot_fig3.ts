/** Regenerate the standard response panels from a trajectory CSV:
 *  front position vs setpoint, held input staircase, wall temperature vs
 *  melting, and (two-phase runs) the solid squared norm.
 *
 *    node dist/plot_fig3.js --csv out/trajectory.csv \
 *        [--summary out/summary.json] --out plots/
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { parseArgs } from "node:util";

import { readSummary, readTable, Summary } from "./csv.js";
import { fig3Panels } from "./panels.js";
import { renderChart } from "./svg.js";

export function run(argv: string[]): string[] {
  const { values } = parseArgs({
    args: argv,
    options: {
      csv: { type: "string" },
      summary: { type: "string" },
      out: { type: "string" },
    },
  });
  if (!values.csv || !values.out) {
    throw new Error("usage: plot_fig3 --csv <trajectory.csv> [--summary <summary.json>] --out <dir>");
  }
  const traj = readTable(values.csv);
  let summary: Summary | undefined;
  if (values.summary) {
    summary = readSummary(values.summary);
  }
  mkdirSync(values.out, { recursive: true });
  const written: string[] = [];
  for (const [name, spec] of fig3Panels(traj, summary)) {
    const path = join(values.out, name);
    writeFileSync(path, renderChart(spec));
    written.push(path);
  }
  return written;
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url.endsWith(process.argv[1].split("/").pop()!);
if (invokedDirectly) {
  try {
    for (const f of run(process.argv.slice(2))) {
      console.log(f);
    }
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    process.exitCode = 1;
  }
}
