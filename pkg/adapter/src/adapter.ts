/**
 * Dataset runner: read episodes via the manifest, apply a predictor to
 * each conditioning window, write one prediction record per episode.
 */

import * as fs from "fs";
import * as path from "path";

import {
  FormatError,
  PredictionRecord,
  ShapeError,
  readEpisode,
  readManifest,
  writePrediction,
} from "./format";
import {
  AdapterPredictor,
  constantVelocity,
  makeWindow,
  zeroOrderHold,
} from "./predictors";

export interface RunOptions {
  dataDir: string;
  outDir: string;
  predictor: AdapterPredictor;
  predictorName: string;
  conditionSteps?: number;
  rolloutSteps?: number;
  overwrite?: boolean;
}

export function resolvePredictor(spec: string): { fn: AdapterPredictor; name: string } {
  if (spec === "zoh") {
    return { fn: zeroOrderHold, name: "zoh" };
  }
  if (spec === "constvel") {
    return { fn: constantVelocity, name: "constvel" };
  }
  if (spec.startsWith("module:")) {
    const modPath = path.resolve(spec.slice("module:".length));
    // eslint-disable-next-line @typescript-eslint/no-var-requires
    const mod = require(modPath);
    const fn = (mod.default ?? mod.predictor ?? mod) as AdapterPredictor;
    if (typeof fn !== "function") {
      throw new FormatError(`${modPath} does not export a predictor function`);
    }
    const name =
      (typeof mod.predictorName === "string" && mod.predictorName) ||
      path.basename(modPath, path.extname(modPath));
    return { fn, name };
  }
  throw new FormatError(`unknown predictor '${spec}'; use zoh, constvel, or module:<path>`);
}

export function runAdapter(options: RunOptions): number {
  const conditionSteps = options.conditionSteps ?? 10;
  const manifest = readManifest(options.dataDir);
  fs.mkdirSync(options.outDir, { recursive: true });
  let written = 0;
  for (const entry of manifest.episodes) {
    const episode = readEpisode(path.join(options.dataDir, entry.file));
    if (episode.episodeId !== entry.episode_id) {
      throw new FormatError(
        `episode id mismatch in ${entry.file}: ${episode.episodeId} vs manifest ${entry.episode_id}`
      );
    }
    const window = makeWindow(episode, conditionSteps, options.rolloutSteps);
    const predicted = options.predictor(window);
    const expectedRows = window.futureActions.length;
    const d = episode.layout.length;
    if (
      !Array.isArray(predicted) ||
      predicted.length !== expectedRows ||
      predicted.some((row) => !Array.isArray(row) || row.length !== d)
    ) {
      const gotRows = Array.isArray(predicted) ? predicted.length : "non-array";
      const gotCols = Array.isArray(predicted) && predicted[0] ? predicted[0].length : "?";
      throw new ShapeError(
        `predictor returned grid (${gotRows} x ${gotCols}), expected (${expectedRows} x ${d}) ` +
          `for episode ${episode.episodeId}`
      );
    }
    const record: PredictionRecord = {
      episodeId: episode.episodeId,
      predictor: options.predictorName,
      conditionSteps,
      states: predicted,
    };
    const fileName = `pred_${String(entry.index).padStart(5, "0")}_${episode.episodeId.slice(0, 12)}.json`;
    const filePath = path.join(options.outDir, fileName);
    if (fs.existsSync(filePath) && !options.overwrite) {
      throw new FormatError(`${filePath} exists; pass --overwrite to replace it`);
    }
    writePrediction(record, filePath);
    written += 1;
  }
  return written;
}
