/**
 * Strict parsing of the simulator's CSV outputs.
 *
 * All files are header + plain numeric columns, LF line endings, no quoting.
 * Parsers validate the documented schema and throw SchemaError on mismatch;
 * the renderer never writes back to its inputs.
 */

import { readFileSync } from "node:fs";

export class SchemaError extends Error {}

export interface Table {
  columns: string[];
  rows: number[][];
}

export function readTable(path: string): Table {
  const text = readFileSync(path, "utf8");
  const lines = text.split("\n").filter((l) => l.length > 0);
  if (lines.length < 2) throw new SchemaError(`${path}: need a header and at least one row`);
  const columns = lines[0].split(",").map((s) => s.trim());
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== columns.length) {
      throw new SchemaError(`${path}:${i + 1}: expected ${columns.length} fields, got ${parts.length}`);
    }
    rows.push(parts.map((s) => (s.trim() === "" ? NaN : Number(s))));
  }
  return { columns, rows };
}

export function column(table: Table, name: string, path = "<table>"): number[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) throw new SchemaError(`${path}: missing required column '${name}' (have: ${table.columns.join(", ")})`);
  return table.rows.map((r) => r[idx]);
}

export function requireFinite(values: number[], what: string): number[] {
  for (const v of values) {
    if (!Number.isFinite(v)) throw new SchemaError(`${what}: non-finite value ${v}`);
  }
  return values;
}

/** Norm series: column "t" first, then named norms. */
export function readNormSeries(path: string): Table {
  const t = readTable(path);
  if (t.columns[0] !== "t") throw new SchemaError(`${path}: first column must be 't'`);
  return t;
}

/** Growth report series: t, A, B, D, R_sup, fhat_sup (B may be NaN past the horizon). */
export function readGrowthSeries(path: string): Table {
  const t = readTable(path);
  const expected = ["t", "A", "B", "D", "R_sup", "fhat_sup"];
  for (const c of expected) {
    if (!t.columns.includes(c)) throw new SchemaError(`${path}: missing column '${c}'`);
  }
  return t;
}

/** Resonance scan summary: xi1, xi2, xi3, value. */
export function readResonanceScan(path: string): Table {
  const t = readTable(path);
  const expected = ["xi1", "xi2", "xi3", "value"];
  if (t.columns.join(",") !== expected.join(",")) {
    throw new SchemaError(`${path}: expected columns ${expected.join(",")}, got ${t.columns.join(",")}`);
  }
  return t;
}

/** Sweep result: eps, crossing_time, a0, termination (termination ignored numerically). */
export function readSweep(path: string): { eps: number[]; crossing: number[] } {
  const text = readFileSync(path, "utf8");
  const lines = text.split("\n").filter((l) => l.length > 0);
  if (lines.length < 2) throw new SchemaError(`${path}: empty sweep`);
  const cols = lines[0].split(",");
  const iEps = cols.indexOf("eps");
  const iCross = cols.indexOf("crossing_time");
  if (iEps < 0 || iCross < 0) throw new SchemaError(`${path}: need 'eps' and 'crossing_time' columns`);
  const eps: number[] = [];
  const crossing: number[] = [];
  const parseField = (s: string) => (s.trim() === "" ? NaN : Number(s)); // Number("") is 0
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    const e = parseField(parts[iEps]);
    const c = parseField(parts[iCross]);
    if (Number.isFinite(e) && Number.isFinite(c)) {
      eps.push(e);
      crossing.push(c);
    }
  }
  if (eps.length < 2) throw new SchemaError(`${path}: need at least two complete (eps, crossing) pairs`);
  return { eps, crossing };
}
