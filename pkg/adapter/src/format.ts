/**
 * Episode dataset reading and prediction-record writing.
 *
 * Episodes are one JSON file each, listed by a manifest; prediction
 * records mirror the episode layout with an episode_id join key.  All
 * reals are written as shortest round-trip decimals in CPython's repr
 * formatting so both sides of the file boundary parse identical bits.
 */

import * as fs from "fs";
import * as path from "path";

import { pyFloatRepr } from "./pyfloat";

export const FORMAT_VERSION = 1;

export class FormatError extends Error {}
export class ShapeError extends Error {}

export interface LayoutDim {
  name: string;
  unit: string;
  role: string;
  vel?: string;
  group?: number;
}

export interface Episode {
  episodeId: string;
  taskId: string;
  dt: number;
  params: Record<string, number>;
  layout: LayoutDim[];
  actionLayout: string[];
  states: number[][];
  actions: number[][];
}

export interface ManifestEntry {
  index: number;
  episode_id: string;
  file: string;
}

export interface Manifest {
  taskId: string;
  count: number;
  episodes: ManifestEntry[];
}

export interface PredictionRecord {
  episodeId: string;
  predictor: string;
  conditionSteps: number;
  states: number[][];
}

function requireField(obj: Record<string, unknown>, field: string, from: string): unknown {
  if (!(field in obj) || obj[field] === undefined) {
    throw new FormatError(`${from} is missing field '${field}'`);
  }
  return obj[field];
}

export function readEpisode(filePath: string): Episode {
  let data: any;
  try {
    data = JSON.parse(fs.readFileSync(filePath, "ascii"));
  } catch (err) {
    throw new FormatError(`cannot parse episode file ${filePath}: ${err}`);
  }
  if (data.format_version !== FORMAT_VERSION) {
    throw new FormatError(
      `unsupported format_version ${data.format_version} in ${filePath}, expected ${FORMAT_VERSION}`
    );
  }
  const layout = requireField(data, "state_layout", filePath) as LayoutDim[];
  const states = requireField(data, "states", filePath) as number[][];
  const actions = requireField(data, "actions", filePath) as number[][];
  const task = requireField(data, "task", filePath) as { task_id: string };
  const d = layout.length;
  if (!Array.isArray(states) || states.length < 2 || states.some((row) => row.length !== d)) {
    throw new FormatError(`states grid in ${filePath} does not match layout size ${d}`);
  }
  const horizon = states.length - 1;
  const actionLayout = (data.action_layout ?? []) as string[];
  if (actions.length !== horizon || actions.some((row) => row.length !== actionLayout.length)) {
    throw new FormatError(
      `actions grid in ${filePath} does not match (T=${horizon}, A=${actionLayout.length})`
    );
  }
  for (const grid of [states, actions]) {
    for (const row of grid) {
      for (const v of row) {
        if (typeof v !== "number" || !Number.isFinite(v)) {
          throw new FormatError(`non-finite value in ${filePath}`);
        }
      }
    }
  }
  return {
    episodeId: requireField(data, "episode_id", filePath) as string,
    taskId: task.task_id,
    dt: requireField(data, "dt", filePath) as number,
    params: data.params as Record<string, number>,
    layout,
    actionLayout,
    states,
    actions,
  };
}

export function readManifest(datasetDir: string): Manifest {
  const manifestPath = path.join(datasetDir, "manifest.json");
  let data: any;
  try {
    data = JSON.parse(fs.readFileSync(manifestPath, "ascii"));
  } catch (err) {
    throw new FormatError(`cannot parse manifest ${manifestPath}: ${err}`);
  }
  if (data.format_version !== FORMAT_VERSION) {
    throw new FormatError(`unsupported manifest format_version ${data.format_version}`);
  }
  return {
    taskId: data.task_id,
    count: data.count,
    episodes: data.episodes as ManifestEntry[],
  };
}

function gridToJson(grid: number[][], indent: string): string {
  if (grid.length === 0) {
    return "[]";
  }
  const rows = grid.map(
    (row) => indent + "  [" + row.map((v) => pyFloatRepr(v)).join(", ") + "]"
  );
  return "[\n" + rows.join(",\n") + "\n" + indent + "]";
}

export function predictionToJson(record: PredictionRecord): string {
  // mirrors the dataset writer's layout: two-space indent, trailing newline
  const lines = [
    "{",
    `  "format_version": ${FORMAT_VERSION},`,
    `  "episode_id": ${JSON.stringify(record.episodeId)},`,
    `  "predictor": ${JSON.stringify(record.predictor)},`,
    `  "condition_steps": ${record.conditionSteps},`,
    `  "states": ${gridToJson(record.states, "  ")}`,
    "}",
  ];
  return lines.join("\n") + "\n";
}

export function writePrediction(record: PredictionRecord, filePath: string): void {
  for (const row of record.states) {
    for (const v of row) {
      if (!Number.isFinite(v)) {
        throw new FormatError(`prediction for ${record.episodeId} contains non-finite values`);
      }
    }
  }
  fs.writeFileSync(filePath, predictionToJson(record), "ascii");
}
