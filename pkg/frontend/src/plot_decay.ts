/** Squared-norm decay plot with the guaranteed exponential envelope.
 *
 *    node dist/plot_decay.js --csv out/trajectory.csv \
 *        --summary out/summary.json --out plots/
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { parseArgs } from "node:util";

import { readSummary, readTable } from "./csv.js";
import { decayPanel } from "./panels.js";
import { renderChart } from "./svg.js";

export function run(argv: string[]): string {
  const { values } = parseArgs({
    args: argv,
    options: {
      csv: { type: "string" },
      summary: { type: "string" },
      out: { type: "string" },
    },
  });
  if (!values.csv || !values.summary || !values.out) {
    throw new Error("usage: plot_decay --csv <trajectory.csv> --summary <summary.json> --out <dir>");
  }
  const traj = readTable(values.csv);
  const summary = readSummary(values.summary);
  mkdirSync(values.out, { recursive: true });
  const path = join(values.out, "decay.svg");
  writeFileSync(path, renderChart(decayPanel(traj, summary)));
  return path;
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url.endsWith(process.argv[1].split("/").pop()!);
if (invokedDirectly) {
  try {
    console.log(run(process.argv.slice(2)));
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    process.exitCode = 1;
  }
}
