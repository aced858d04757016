#!/usr/bin/env node
/**
 * berplot --in ber.csv --by decoder --out fig1.svg
 *
 * Reads one or more simulator CSV files, filters rows, groups them into
 * series and writes a log-scale BER chart as SVG.  Exits nonzero on
 * malformed CSV, an empty selection or bad arguments.
 */

import { readFileSync, writeFileSync } from "node:fs";

import { BerRow, CsvError, parseBerCsv } from "./csv.js";
import { ChartError, PlotSpec, renderSvg } from "./chart.js";

export interface CliOptions {
  inputs: string[];
  out: string;
  by: ("code" | "decoder")[];
  title?: string;
  yFloor: number;
  codeFilter?: Set<string>;
  decoderFilter?: Set<string>;
}

export function parseArgs(argv: string[]): CliOptions {
  const opts: CliOptions = { inputs: [], out: "", by: ["decoder"], yFloor: 1e-6 };
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    const next = () => {
      i += 1;
      if (i >= argv.length) throw new Error(`missing value for ${arg}`);
      return argv[i];
    };
    switch (arg) {
      case "--in":
        opts.inputs.push(next());
        break;
      case "--out":
        opts.out = next();
        break;
      case "--by": {
        const keys = next().split(",").map((k) => k.trim());
        for (const k of keys) {
          if (k !== "code" && k !== "decoder") throw new Error(`--by accepts code and/or decoder, got ${k}`);
        }
        opts.by = keys as ("code" | "decoder")[];
        break;
      }
      case "--title":
        opts.title = next();
        break;
      case "--floor": {
        const f = Number(next());
        if (!Number.isFinite(f) || f <= 0) throw new Error("--floor must be a positive number");
        opts.yFloor = f;
        break;
      }
      case "--code":
        opts.codeFilter = new Set(next().split(",").map((s) => s.trim()));
        break;
      case "--decoder":
        opts.decoderFilter = new Set(next().split(",").map((s) => s.trim()));
        break;
      default:
        throw new Error(`unknown argument ${arg}`);
    }
  }
  if (opts.inputs.length === 0) throw new Error("at least one --in file is required");
  if (!opts.out) throw new Error("--out is required");
  return opts;
}

export function run(argv: string[]): number {
  let opts: CliOptions;
  try {
    opts = parseArgs(argv);
  } catch (e) {
    console.error(`usage error: ${(e as Error).message}`);
    return 2;
  }
  try {
    const rows: BerRow[] = [];
    for (const path of opts.inputs) {
      rows.push(...parseBerCsv(readFileSync(path, "utf-8")));
    }
    const selected = rows.filter(
      (r) =>
        (!opts.codeFilter || opts.codeFilter.has(r.code)) &&
        (!opts.decoderFilter || opts.decoderFilter.has(r.decoder)),
    );
    const spec: PlotSpec = {
      rows: selected,
      groupBy: opts.by,
      title: opts.title,
      yFloor: opts.yFloor,
    };
    writeFileSync(opts.out, renderSvg(spec));
    console.log(`${opts.out}: ${selected.length} rows`);
    return 0;
  } catch (e) {
    if (e instanceof CsvError) {
      console.error(`malformed CSV: ${e.message}`);
      return 1;
    }
    if (e instanceof ChartError) {
      console.error(`nothing to plot: ${e.message}`);
      return 1;
    }
    console.error(`error: ${(e as Error).message}`);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  process.exit(run(process.argv.slice(2)));
}
