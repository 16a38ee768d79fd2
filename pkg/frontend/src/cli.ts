#!/usr/bin/env node
/**
 * plot <fiber|sweep> --in data.csv --out figure.svg
 *
 * Reads one CSV produced by the solver CLI and writes the figure in
 * both formats (the --out path plus a sibling with the other
 * extension).  Nothing is written unless rendering succeeded.
 */

import { readFileSync, writeFileSync } from "node:fs";

import { parseFiberCsv, parseSweepCsv } from "./csv.js";
import { renderFiber, renderSweep } from "./render.js";

const USAGE = "usage: plot <fiber|sweep> --in data.csv --out figure.svg";

interface Args {
  kind: "fiber" | "sweep";
  input: string;
  output: string;
}

function parseArgs(argv: string[]): Args {
  const positional: string[] = [];
  let input: string | undefined;
  let output: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i]!;
    if (a === "--in") {
      input = argv[++i];
    } else if (a === "--out") {
      output = argv[++i];
    } else if (a.startsWith("-")) {
      throw new Error(`unknown option ${a}\n${USAGE}`);
    } else {
      positional.push(a);
    }
  }
  const kind = positional[0];
  if (positional.length !== 1 || (kind !== "fiber" && kind !== "sweep")) {
    throw new Error(USAGE);
  }
  if (input === undefined || output === undefined) {
    throw new Error(USAGE);
  }
  return { kind, input, output };
}

function main(): number {
  let args: Args;
  try {
    args = parseArgs(process.argv.slice(2));
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
  try {
    const text = readFileSync(args.input, "utf8");
    const rendered = args.kind === "fiber"
      ? renderFiber(parseFiberCsv(text))
      : renderSweep(parseSweepCsv(text));
    const base = args.output.replace(/\.(svg|png)$/i, "");
    writeFileSync(`${base}.svg`, rendered.svg);
    writeFileSync(`${base}.png`, rendered.png);
    const tail = "fiberCase" in rendered ? ` case=${rendered.fiberCase}` : "";
    process.stdout.write(`wrote ${base}.svg and ${base}.png markers=${rendered.markerCount}${tail}\n`);
    return 0;
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
}

process.exit(main());
