#!/usr/bin/env node
/**
 * figure-kit CLI.
 *
 *   figure-kit quench  --out fig.svg run1.csv [run2.csv ...]
 *   figure-kit scaling --out fig.svg tstar_table.csv
 *
 * Reads the simulator's CSV/JSON outputs and writes an SVG; exits 1 on any
 * schema or I/O problem.
 */

import * as fs from "fs";

import { SchemaError, loadSeries, parseScalingCsv } from "./csv";
import { renderQuenchFigure } from "./quench";
import { renderScalingFigure } from "./scaling";

function usage(): never {
  process.stderr.write(
    "usage: figure-kit quench --out FIG.svg SERIES.csv [SERIES.csv ...]\n" +
    "       figure-kit scaling --out FIG.svg TSTAR_TABLE.csv\n",
  );
  process.exit(1);
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  if (!command || !["quench", "scaling"].includes(command)) usage();
  let out = "";
  let title = "";
  const inputs: string[] = [];
  for (let i = 0; i < rest.length; i++) {
    if (rest[i] === "--out") out = rest[++i];
    else if (rest[i] === "--title") title = rest[++i];
    else inputs.push(rest[i]);
  }
  if (!out || inputs.length === 0) usage();

  try {
    let svg: string;
    if (command === "quench") {
      const series = inputs.map((path) => loadSeries(path));
      svg = renderQuenchFigure(series, { title });
    } else {
      if (inputs.length !== 1) usage();
      const rows = parseScalingCsv(fs.readFileSync(inputs[0], "utf8"));
      svg = renderScalingFigure(rows, { title });
    }
    fs.writeFileSync(out, svg + "\n");
    process.stderr.write(`wrote ${out}\n`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError || (err as NodeJS.ErrnoException).code === "ENOENT") {
      process.stderr.write(`error: ${(err as Error).message}\n`);
      return 1;
    }
    throw err;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
