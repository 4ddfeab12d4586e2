/**
 * Readers for the artifact schemas emitted by the reluflow CLI:
 *
 *   trajectory:  t,w1,...,wd,loss,pattern
 *   hidden path: t,u1,u2,u3,v,loss
 *   sweep:       epsilon,u1,u2,u3,final_loss,iters
 *
 * All errors name the offending file and row.
 */

import { readFileSync } from "node:fs";
import { basename } from "node:path";

export class CsvError extends Error {
  constructor(file: string, row: number | null, detail: string) {
    super(row === null ? `${file}: ${detail}` : `${file}, row ${row}: ${detail}`);
    this.name = "CsvError";
  }
}

export interface Table {
  file: string;
  header: string[];
  rows: number[][]; // numeric columns only; trailing text columns dropped
  text: string[][]; // the non-numeric trailing cells, per row
}

export function readCsv(path: string, numericCols: number): Table {
  let raw: string;
  try {
    raw = readFileSync(path, "utf8");
  } catch (e) {
    throw new CsvError(path, null, `cannot read file (${(e as Error).message})`);
  }
  const lines = raw.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length < 1) throw new CsvError(path, null, "empty file");
  const header = lines[0].split(",");
  if (header.length < numericCols)
    throw new CsvError(path, 1, `expected at least ${numericCols} columns, got ${header.length}`);
  const rows: number[][] = [];
  const text: string[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== header.length)
      throw new CsvError(path, i + 1, `expected ${header.length} cells, got ${cells.length}`);
    const nums = cells.slice(0, numericCols).map((c, j) => {
      const v = Number(c);
      if (!Number.isFinite(v))
        throw new CsvError(path, i + 1, `column ${header[j]}: not a finite number (${c})`);
      return v;
    });
    rows.push(nums);
    text.push(cells.slice(numericCols));
  }
  if (rows.length === 0) throw new CsvError(path, null, "no data rows");
  return { file: path, header, rows, text };
}

export interface Curve3d {
  file: string;
  gamma: number | null;
  points: [number, number, number][]; // the three state coordinates
}

/** Reads either a single-neuron trajectory (t,w1,w2,w3,...) or a
 *  hidden-neuron path (t,u1,u2,u3,...); both carry the 3-d state in
 *  columns 1..3. */
export function readTrajectory(path: string): Curve3d {
  const table = readCsv(path, 5);
  const name1 = table.header[1];
  if (name1 !== "w1" && name1 !== "u1")
    throw new CsvError(path, 1, `expected w1 or u1 in column 2, got ${name1}`);
  return {
    file: path,
    gamma: gammaFromName(path),
    points: table.rows.map((r) => [r[1], r[2], r[3]]),
  };
}

export interface Sweep {
  file: string;
  gamma: number | null;
  epsilon: number[];
  u3: number[];
}

export function readSweep(path: string): Sweep {
  const table = readCsv(path, 6);
  const want = "epsilon,u1,u2,u3,final_loss,iters";
  if (table.header.join(",") !== want)
    throw new CsvError(path, 1, `expected header "${want}", got "${table.header.join(",")}"`);
  return {
    file: path,
    gamma: gammaFromName(path),
    epsilon: table.rows.map((r) => r[0]),
    u3: table.rows.map((r) => r[3]),
  };
}

/** Parses the gamma tag out of artifact filenames like sweep_gamma5.csv. */
export function gammaFromName(path: string): number | null {
  const m = basename(path).match(/gamma([0-9]+(?:\.[0-9]+)?)/);
  return m ? Number(m[1]) : null;
}
