/** End-to-end: the standalone scripts regenerate the panel files from real
 * run outputs and fail descriptively on broken inputs. */

import { describe, expect, it } from "vitest";
import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, dirname } from "node:path";
import { fileURLToPath } from "node:url";

import { run as runFig3 } from "../src/plot_fig3.js";
import { run as runDecay } from "../src/plot_decay.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

function tmp(): string {
  return mkdtempSync(join(tmpdir(), "stefan-plots-"));
}

describe("plot_fig3 script", () => {
  it("writes the three panels for a one-phase run", () => {
    const out = tmp();
    const files = runFig3([
      "--csv", join(FIXTURES, "one_phase_trajectory.csv"),
      "--summary", join(FIXTURES, "one_phase_summary.json"),
      "--out", out,
    ]);
    expect(files.map((f) => f.split("/").pop())).toEqual([
      "front.svg", "input.svg", "boundary_temperature.svg",
    ]);
    for (const f of files) {
      expect(existsSync(f)).toBe(true);
      expect(readFileSync(f, "utf8")).toContain("</svg>");
    }
  });

  it("adds the solid panel for a two-phase run", () => {
    const out = tmp();
    const files = runFig3([
      "--csv", join(FIXTURES, "two_phase_trajectory.csv"),
      "--summary", join(FIXTURES, "two_phase_summary.json"),
      "--out", out,
    ]);
    expect(files.some((f) => f.endsWith("solid_norm.svg"))).toBe(true);
  });

  it("fails on an empty CSV", () => {
    const out = tmp();
    const bad = join(out, "empty.csv");
    writeFileSync(bad, "");
    expect(() => runFig3(["--csv", bad, "--out", out])).toThrow(/empty/);
  });

  it("fails descriptively when a column is missing", () => {
    const out = tmp();
    const bad = join(out, "bad.csv");
    writeFileSync(bad, "t[s],s[m]\n0,0.001\n600,0.002\n");
    expect(() => runFig3(["--csv", bad, "--out", out])).toThrow(/missing column "q_c"/);
  });

  it("requires the csv and out flags", () => {
    expect(() => runFig3([])).toThrow(/usage/);
  });
});

describe("plot_decay script", () => {
  it("writes the decay panel", () => {
    const out = tmp();
    const file = runDecay([
      "--csv", join(FIXTURES, "one_phase_trajectory.csv"),
      "--summary", join(FIXTURES, "one_phase_summary.json"),
      "--out", out,
    ]);
    expect(file.endsWith("decay.svg")).toBe(true);
    const svg = readFileSync(file, "utf8");
    expect(svg).toContain("stroke-dasharray");  // the envelope reference
    expect(svg).toContain("exp(-b t)");
  });

  it("fails on a corrupted summary", () => {
    const out = tmp();
    const bad = join(out, "broken.json");
    writeFileSync(bad, "[1, 2, 3]");
    expect(() =>
      runDecay([
        "--csv", join(FIXTURES, "one_phase_trajectory.csv"),
        "--summary", bad,
        "--out", out,
      ]),
    ).toThrow(/object/);
  });

  it("fails when the summary lacks the decay block", () => {
    const out = tmp();
    const bad = join(out, "nodecay.json");
    writeFileSync(bad, JSON.stringify({ setpoint: 0.02 }));
    expect(() =>
      runDecay([
        "--csv", join(FIXTURES, "one_phase_trajectory.csv"),
        "--summary", bad,
        "--out", out,
      ]),
    ).toThrow(/decay/);
  });
});
