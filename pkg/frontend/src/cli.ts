/**
 * Usage:
 *   slabrt-plot plot profiles --out flux.svg [--title T] out/a.csv:full out/b.csv:dlra
 *   slabrt-plot plot energy   --out e.svg    [--title T] out/a.csv:full
 *
 * Inputs are `path:label` pairs (label defaults to the file name).
 * Exit codes: 0 success, 1 bad arguments or unreadable/garbled input.
 */

import { FigureSpec, plotEnergy, plotProfiles } from "./figures.js";

interface ParsedArgs {
  kind: "profiles" | "energy";
  out: string;
  title?: string;
  inputs: Array<{ path: string; label: string }>;
}

export function parseArgs(argv: string[]): ParsedArgs {
  if (argv[0] !== "plot") {
    throw new Error(`expected 'plot' subcommand, got '${argv[0] ?? ""}'`);
  }
  const kind = argv[1];
  if (kind !== "profiles" && kind !== "energy") {
    throw new Error(`expected 'profiles' or 'energy', got '${kind ?? ""}'`);
  }
  let out: string | undefined;
  let title: string | undefined;
  const inputs: ParsedArgs["inputs"] = [];
  for (let i = 2; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "--out") {
      out = argv[++i];
    } else if (arg === "--title") {
      title = argv[++i];
    } else if (arg.startsWith("--")) {
      throw new Error(`unknown option '${arg}'`);
    } else {
      const colon = arg.lastIndexOf(":");
      if (colon > 0 && colon < arg.length - 1 && !arg.slice(colon + 1).includes("/")) {
        inputs.push({ path: arg.slice(0, colon), label: arg.slice(colon + 1) });
      } else {
        inputs.push({ path: arg, label: arg.replace(/^.*\//, "") });
      }
    }
  }
  if (!out) {
    throw new Error("--out <path> is required");
  }
  if (inputs.length === 0) {
    throw new Error("at least one input csv is required");
  }
  return { kind, out, title, inputs };
}

export function main(argv: string[]): number {
  let parsed: ParsedArgs;
  try {
    parsed = parseArgs(argv);
  } catch (err) {
    console.error(`usage error: ${(err as Error).message}`);
    return 1;
  }
  const spec: FigureSpec = {
    inputs: parsed.inputs,
    outputPath: parsed.out,
    title: parsed.title,
  };
  try {
    const path = parsed.kind === "profiles" ? plotProfiles(spec) : plotEnergy(spec);
    console.log(`wrote ${path}`);
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

