/** Dependency-free SVG chart rendering for time-series panels. */

export interface Series {
  x: number[];
  y: number[];
  kind: "line" | "step";
  color: string;
  label?: string;
  width?: number;
}

export interface RefLine {
  axis: "x" | "y";
  value: number;
  color: string;
  label?: string;
}

/** Arbitrary reference curve (e.g. a decay envelope), drawn dashed. */
export interface RefCurve {
  x: number[];
  y: number[];
  color: string;
  label?: string;
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  refs?: RefLine[];
  refCurves?: RefCurve[];
  yLog?: boolean;
  width?: number;
  height?: number;
}

const MARGIN = { top: 34, right: 18, bottom: 44, left: 72 };

interface Scale {
  lo: number;
  hi: number;
  r0: number;
  r1: number;
}

function makeScale(lo: number, hi: number, r0: number, r1: number): Scale {
  if (hi <= lo) {
    hi = lo + (lo === 0 ? 1 : Math.abs(lo) * 1e-6);
  }
  return { lo, hi, r0, r1 };
}

function apply(s: Scale, v: number): number {
  return s.r0 + ((v - s.lo) / (s.hi - s.lo)) * (s.r1 - s.r0);
}

/** Round tick positions covering [lo, hi]. */
export function ticks(lo: number, hi: number, n = 5): number[] {
  if (hi <= lo) return [lo];
  const span = hi - lo;
  const step0 = span / n;
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  const norm = step0 / mag;
  const step = (norm >= 5 ? 5 : norm >= 2 ? 2 : 1) * mag;
  const out: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-12 * span; v += step) {
    out.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return out;
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1).replace("e", "e");
  return String(Number(v.toPrecision(4)));
}

/**
 * Right-continuous staircase path: the value at sample i holds until the
 * next sample, so jumps are vertical segments exactly at the x of the row
 * where the value changed.
 */
export function stepPath(
  x: number[],
  y: number[],
  sx: (v: number) => number,
  sy: (v: number) => number,
): string {
  if (x.length === 0) return "";
  let d = `M${sx(x[0]).toFixed(2)},${sy(y[0]).toFixed(2)}`;
  for (let i = 1; i < x.length; i++) {
    d += `H${sx(x[i]).toFixed(2)}`;
    if (y[i] !== y[i - 1]) {
      d += `V${sy(y[i]).toFixed(2)}`;
    }
  }
  return d;
}

function linePath(
  x: number[],
  y: number[],
  sx: (v: number) => number,
  sy: (v: number) => number,
): string {
  return x
    .map((v, i) => `${i === 0 ? "M" : "L"}${sx(v).toFixed(2)},${sy(y[i]).toFixed(2)}`)
    .join("");
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderChart(spec: ChartSpec): string {
  const W = spec.width ?? 640;
  const H = spec.height ?? 360;
  const x0 = MARGIN.left;
  const x1 = W - MARGIN.right;
  const y0 = H - MARGIN.bottom;
  const y1 = MARGIN.top;

  const allX: number[] = [];
  const allY: number[] = [];
  for (const s of spec.series) {
    allX.push(...s.x);
    allY.push(...s.y);
  }
  for (const rc of spec.refCurves ?? []) {
    allX.push(...rc.x);
    allY.push(...rc.y);
  }
  for (const r of spec.refs ?? []) {
    (r.axis === "x" ? allX : allY).push(r.value);
  }
  if (allX.length === 0) {
    throw new Error(`chart "${spec.title}": no data to plot`);
  }

  const tx = (v: number) => v;
  const ty = spec.yLog ? (v: number) => Math.log10(v) : (v: number) => v;
  const xsRaw = allX.map(tx);
  const ysRaw = allY.map(ty).filter((v) => Number.isFinite(v));
  if (ysRaw.length === 0) {
    throw new Error(`chart "${spec.title}": no finite y values`);
  }
  const padY = 0.06 * (Math.max(...ysRaw) - Math.min(...ysRaw) || 1);
  const sxScale = makeScale(Math.min(...xsRaw), Math.max(...xsRaw), x0, x1);
  const syScale = makeScale(Math.min(...ysRaw) - padY, Math.max(...ysRaw) + padY, y0, y1);
  const sx = (v: number) => apply(sxScale, tx(v));
  const sy = (v: number) => apply(syScale, ty(v));

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" viewBox="0 0 ${W} ${H}" font-family="Helvetica,Arial,sans-serif">`,
    `<rect width="${W}" height="${H}" fill="white"/>`,
    `<text x="${(x0 + x1) / 2}" y="20" text-anchor="middle" font-size="14">${esc(spec.title)}</text>`,
  );

  // axes and ticks
  const xticks = ticks(sxScale.lo, sxScale.hi);
  const yticksV = spec.yLog
    ? logTicks(syScale.lo, syScale.hi)
    : ticks(syScale.lo, syScale.hi);
  for (const v of xticks) {
    const px = apply(sxScale, v);
    parts.push(
      `<line x1="${px}" y1="${y0}" x2="${px}" y2="${y1}" stroke="#eee"/>`,
      `<line x1="${px}" y1="${y0}" x2="${px}" y2="${y0 + 4}" stroke="#444"/>`,
      `<text x="${px}" y="${y0 + 17}" text-anchor="middle" font-size="11">${fmt(v)}</text>`,
    );
  }
  for (const v of yticksV) {
    const py = apply(syScale, v);
    const label = spec.yLog ? `1e${fmt(v)}` : fmt(v);
    parts.push(
      `<line x1="${x0}" y1="${py}" x2="${x1}" y2="${py}" stroke="#eee"/>`,
      `<line x1="${x0 - 4}" y1="${py}" x2="${x0}" y2="${py}" stroke="#444"/>`,
      `<text x="${x0 - 7}" y="${py + 4}" text-anchor="end" font-size="11">${label}</text>`,
    );
  }
  parts.push(
    `<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="#444"/>`,
    `<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="#444"/>`,
    `<text x="${(x0 + x1) / 2}" y="${H - 8}" text-anchor="middle" font-size="12">${esc(spec.xLabel)}</text>`,
    `<text x="16" y="${(y0 + y1) / 2}" text-anchor="middle" font-size="12" transform="rotate(-90 16 ${(y0 + y1) / 2})">${esc(spec.yLabel)}</text>`,
  );

  // reference lines / curves behind the data
  for (const r of spec.refs ?? []) {
    if (r.axis === "y") {
      const py = sy(r.value);
      parts.push(
        `<line x1="${x0}" y1="${py}" x2="${x1}" y2="${py}" stroke="${r.color}" stroke-dasharray="6 4"/>`,
      );
      if (r.label) {
        parts.push(
          `<text x="${x1 - 4}" y="${py - 5}" text-anchor="end" font-size="11" fill="${r.color}">${esc(r.label)}</text>`,
        );
      }
    } else {
      const px = sx(r.value);
      parts.push(
        `<line x1="${px}" y1="${y0}" x2="${px}" y2="${y1}" stroke="${r.color}" stroke-dasharray="6 4"/>`,
      );
    }
  }
  for (const rc of spec.refCurves ?? []) {
    parts.push(
      `<path d="${linePath(rc.x, rc.y, sx, sy)}" fill="none" stroke="${rc.color}" stroke-dasharray="6 4" stroke-width="1.4"/>`,
    );
    if (rc.label) {
      parts.push(
        `<text x="${x1 - 4}" y="${y1 + 14}" text-anchor="end" font-size="11" fill="${rc.color}">${esc(rc.label)}</text>`,
      );
    }
  }

  for (const s of spec.series) {
    const d = s.kind === "step" ? stepPath(s.x, s.y, sx, sy) : linePath(s.x, s.y, sx, sy);
    parts.push(
      `<path d="${d}" fill="none" stroke="${s.color}" stroke-width="${s.width ?? 1.8}"${
        s.kind === "step" ? ' data-kind="step"' : ""
      }/>`,
    );
    if (s.label) {
      parts.push(
        `<text x="${x0 + 8}" y="${y1 + 14}" font-size="11" fill="${s.color}">${esc(s.label)}</text>`,
      );
    }
  }
  parts.push("</svg>");
  return parts.join("\n");
}

function logTicks(lo: number, hi: number): number[] {
  const out: number[] = [];
  const step = Math.max(1, Math.ceil((hi - lo) / 6));
  for (let e = Math.ceil(lo); e <= Math.floor(hi); e += step) {
    out.push(e);
  }
  return out.length > 0 ? out : [Math.floor(lo)];
}
