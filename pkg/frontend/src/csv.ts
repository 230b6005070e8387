import { readFileSync } from "node:fs";

export interface Table {
  /** column names with bracketed units stripped, e.g. "t[s]" -> "t" */
  columns: string[];
  units: string[];
  rows: number[][];
  path: string;
}

export function stripUnits(header: string): string {
  const i = header.indexOf("[");
  return i < 0 ? header : header.slice(0, i);
}

function unitOf(header: string): string {
  const m = header.match(/\[(.*)\]/);
  return m ? m[1] : "";
}

export function parseCsv(text: string, path = "<string>"): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.trim().length > 0);
  if (lines.length === 0) {
    throw new Error(`${path}: empty CSV (no header row)`);
  }
  const headers = lines[0].split(",");
  const columns = headers.map(stripUnits);
  const units = headers.map(unitOf);
  if (lines.length === 1) {
    throw new Error(`${path}: CSV has a header but no data rows`);
  }
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== columns.length) {
      throw new Error(
        `${path}: row ${i} has ${parts.length} fields, header has ${columns.length}`,
      );
    }
    rows.push(parts.map(Number));
  }
  return { columns, units, rows, path };
}

export function readTable(path: string): Table {
  return parseCsv(readFileSync(path, "utf8"), path);
}

export function column(table: Table, name: string): number[] {
  const i = table.columns.indexOf(name);
  if (i < 0) {
    throw new Error(
      `${table.path}: missing column "${name}" (have: ${table.columns.join(", ")})`,
    );
  }
  return table.rows.map((r) => r[i]);
}

export function hasColumn(table: Table, name: string): boolean {
  return table.columns.includes(name);
}

export interface Summary {
  setpoint?: number;
  gain?: number;
  decay?: { b: number; M_hat: number; tail_slope: number };
  phase?: string;
  [key: string]: unknown;
}

export function readSummary(path: string): Summary {
  const parsed = JSON.parse(readFileSync(path, "utf8"));
  if (typeof parsed !== "object" || parsed === null || Array.isArray(parsed)) {
    throw new Error(`${path}: summary JSON must be an object`);
  }
  return parsed as Summary;
}
