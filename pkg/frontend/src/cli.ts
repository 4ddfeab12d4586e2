#!/usr/bin/env node
/**
 * figure-kit <kind> --out FILE input.csv [input.csv ...]
 *
 * Kinds:
 *   trajectories3d   projected 3-d state paths (trajectory / hidden-path CSVs)
 *   epsilon-limit    sweep limits against epsilon (sweep CSVs)
 *
 * Exit codes: 0 success, 1 bad arguments or unreadable/malformed input.
 */

import { writeFileSync } from "node:fs";
import { parseArgs } from "node:util";

import { CsvError } from "./csv.js";
import { renderEpsilonLimit, renderTrajectories3d } from "./figures.js";

const KINDS: Record<string, (inputs: string[]) => string> = {
  trajectories3d: (inputs) => renderTrajectories3d(inputs),
  "epsilon-limit": (inputs) => renderEpsilonLimit(inputs),
};

export function run(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: { out: { type: "string" } },
    });
  } catch (e) {
    process.stderr.write(`figure-kit: ${(e as Error).message}\n`);
    return 1;
  }
  const [kind, ...inputs] = parsed.positionals;
  if (!kind || !(kind in KINDS)) {
    process.stderr.write(
      `figure-kit: expected a figure kind (${Object.keys(KINDS).join(", ")})\n`,
    );
    return 1;
  }
  if (!parsed.values.out) {
    process.stderr.write("figure-kit: --out FILE is required\n");
    return 1;
  }
  if (inputs.length === 0) {
    process.stderr.write("figure-kit: at least one input CSV is required\n");
    return 1;
  }
  let svg: string;
  try {
    svg = KINDS[kind](inputs);
  } catch (e) {
    if (e instanceof CsvError || e instanceof Error) {
      process.stderr.write(`figure-kit: ${e.message}\n`);
      return 1;
    }
    throw e;
  }
  writeFileSync(parsed.values.out, svg);
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url.endsWith(process.argv[1].split("/").pop()!);
if (invokedDirectly) {
  process.exit(run(process.argv.slice(2)));
}
