#!/usr/bin/env node
/**
 * physbench-adapter --data <dir> --out <dir> --predictor zoh|constvel|module:<path>
 *                   [--condition-steps N] [--rollout-steps N] [--overwrite]
 */

import { resolvePredictor, runAdapter } from "./adapter";

function parseArgs(argv: string[]): Record<string, string | boolean> {
  const out: Record<string, string | boolean> = {};
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (!arg.startsWith("--")) {
      throw new Error(`unexpected argument '${arg}'`);
    }
    const key = arg.slice(2);
    if (key === "overwrite") {
      out[key] = true;
    } else {
      const value = argv[++i];
      if (value === undefined) {
        throw new Error(`missing value for --${key}`);
      }
      out[key] = value;
    }
  }
  return out;
}

function main(): number {
  let args: Record<string, string | boolean>;
  try {
    args = parseArgs(process.argv.slice(2));
    for (const required of ["data", "out", "predictor"]) {
      if (!(required in args)) {
        throw new Error(`--${required} is required`);
      }
    }
  } catch (err) {
    console.error(`usage error: ${(err as Error).message}`);
    return 1;
  }
  try {
    const { fn, name } = resolvePredictor(args.predictor as string);
    const count = runAdapter({
      dataDir: args.data as string,
      outDir: args.out as string,
      predictor: fn,
      predictorName: name,
      conditionSteps: args["condition-steps"]
        ? parseInt(args["condition-steps"] as string, 10)
        : undefined,
      rolloutSteps: args["rollout-steps"]
        ? parseInt(args["rollout-steps"] as string, 10)
        : undefined,
      overwrite: Boolean(args.overwrite),
    });
    console.log(`wrote ${count} prediction files -> ${args.out}`);
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }
}

process.exit(main());
