/** Panel builders: from parsed trajectory/samples tables and the run
 * summary to chart specs. */

import { Table, Summary, column, hasColumn } from "./csv.js";
import { ChartSpec } from "./svg.js";

const HOUR = 3600;

export function frontPanel(traj: Table, summary?: Summary): ChartSpec {
  const t = column(traj, "t").map((v) => v / HOUR);
  const s = column(traj, "s").map((v) => v * 100); // cm reads better at desk scale
  const refs = [];
  if (summary?.setpoint !== undefined) {
    refs.push({
      axis: "y" as const,
      value: summary.setpoint * 100,
      color: "#c0392b",
      label: "setpoint",
    });
  }
  return {
    title: "Melt-front position",
    xLabel: "time [h]",
    yLabel: "s(t) [cm]",
    series: [{ x: t, y: s, kind: "line", color: "#2c5aa0" }],
    refs,
  };
}

export function inputPanel(traj: Table): ChartSpec {
  const t = column(traj, "t").map((v) => v / HOUR);
  const q = column(traj, "q_c");
  return {
    title: "Held boundary heat flux",
    xLabel: "time [h]",
    yLabel: "q_c(t) [W/m^2]",
    // zero-order hold: drawn as a staircase, never interpolated
    series: [{ x: t, y: q, kind: "step", color: "#1e8449" }],
    refs: [{ axis: "y", value: 0, color: "#999" }],
  };
}

export function boundaryTempPanel(traj: Table, Tm?: number): ChartSpec {
  const t = column(traj, "t").map((v) => v / HOUR);
  const T = column(traj, "T_boundary");
  const refs = [];
  if (Tm !== undefined) {
    refs.push({ axis: "y" as const, value: Tm, color: "#c0392b", label: "melting temp" });
  }
  return {
    title: "Wall temperature",
    xLabel: "time [h]",
    yLabel: "T(0,t) [degC]",
    series: [{ x: t, y: T, kind: "line", color: "#8e44ad" }],
    refs,
  };
}

export function solidNormPanel(traj: Table): ChartSpec {
  const t = column(traj, "t").map((v) => v / HOUR);
  const v2 = column(traj, "V2");
  return {
    title: "Solid-phase squared norm",
    xLabel: "time [h]",
    yLabel: "V2(t) [K^2 m]",
    series: [{ x: t, y: v2, kind: "line", color: "#b9770e" }],
  };
}

/**
 * Squared-norm decay on a log axis with the guaranteed envelope
 * M * Psi(0) * exp(-b t) from the summary.  Zero/denormal values are
 * clamped to a floor relative to the series peak so an
 * already-converged run draws as a flat floor line instead of failing.
 */
export function decayPanel(traj: Table, summary: Summary): ChartSpec {
  const t = column(traj, "t");
  const psi = column(traj, "Psi");
  if (!summary.decay || typeof summary.decay.b !== "number") {
    throw new Error("summary JSON is missing the decay block (need decay.b)");
  }
  const peak = Math.max(...psi);
  const floor = peak > 0 ? peak * 1e-16 : 1e-30;
  const clamped = psi.map((v) => Math.max(v, floor));
  const b = summary.decay.b;
  const M = summary.decay.M_hat ?? 1;
  const psi0 = Math.max(psi[0], floor);
  const env = t.map((tv) => Math.max(M * psi0 * Math.exp(-b * tv), floor));
  return {
    title: "Squared-norm decay and guaranteed envelope",
    xLabel: "time [s]",
    yLabel: "Psi(t)",
    yLog: true,
    series: [{ x: t, y: clamped, kind: "line", color: "#2c5aa0", label: "Psi" }],
    refCurves: [
      { x: t, y: env, color: "#c0392b", label: `M Psi(0) exp(-b t), b=${b.toExponential(2)}` },
    ],
  };
}

export interface Fig3Result {
  files: string[];
  specs: ChartSpec[];
}

/** The three standard panels (front, held input, wall temperature), plus the
 * solid-norm panel when the CSV carries a solid phase. */
export function fig3Panels(traj: Table, summary?: Summary): Map<string, ChartSpec> {
  const out = new Map<string, ChartSpec>();
  out.set("front.svg", frontPanel(traj, summary));
  out.set("input.svg", inputPanel(traj));
  const Tm = inferMeltingTemp(traj, summary);
  out.set("boundary_temperature.svg", boundaryTempPanel(traj, Tm));
  if (hasColumn(traj, "V2")) {
    out.set("solid_norm.svg", solidNormPanel(traj));
  }
  return out;
}

function inferMeltingTemp(traj: Table, summary?: Summary): number | undefined {
  const cfgTm = (summary as any)?.config?.material?.Tm;
  if (typeof cfgTm === "number") return cfgTm;
  // the wall temperature relaxes to the melting temperature as the input
  // dies out, so the final row is a serviceable reference when the summary
  // does not carry one
  const T = column(traj, "T_boundary");
  return T[T.length - 1];
}
