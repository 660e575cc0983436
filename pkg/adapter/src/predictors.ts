/**
 * Predictor contract and the bundled reference baselines.
 *
 * A predictor sees only the conditioning window plus the future action
 * sequence and returns the imagined state grid; ground truth beyond the
 * window never enters this interface.
 */

import { Episode, LayoutDim } from "./format";

export interface ConditioningWindow {
  /** ground-truth states handed over as warm-up, shape (C, D) */
  condStates: number[][];
  /** actions between the conditioning states, shape (C-1, A) */
  condActions: number[][];
  /** actions driving the imagined rollout, shape (R, A) */
  futureActions: number[][];
  dt: number;
  layout: LayoutDim[];
  taskId: string;
}

export type AdapterPredictor = (window: ConditioningWindow) => number[][];

export function velPairs(layout: LayoutDim[]): Array<[number, number]> {
  const index = new Map(layout.map((d, i) => [d.name, i] as [string, number]));
  const pairs: Array<[number, number]> = [];
  layout.forEach((dim, i) => {
    if (dim.role === "pos" && dim.vel !== undefined) {
      const v = index.get(dim.vel);
      if (v !== undefined) {
        pairs.push([i, v]);
      }
    }
  });
  return pairs;
}

/** Predicts the last conditioned state forever. */
export const zeroOrderHold: AdapterPredictor = (window) => {
  const last = window.condStates[window.condStates.length - 1];
  return window.futureActions.map(() => last.slice());
};

/**
 * Integrates the declared velocity dims, everything else held: positions
 * advance as p + (h * dt) * v, the exact expression the dataset side
 * uses, so scores agree bit for bit.
 */
export const constantVelocity: AdapterPredictor = (window) => {
  const last = window.condStates[window.condStates.length - 1];
  const pairs = velPairs(window.layout);
  const rollout = window.futureActions.length;
  const out: number[][] = [];
  for (let h = 1; h <= rollout; h++) {
    const row = last.slice();
    for (const [p, v] of pairs) {
      row[p] = last[p] + h * window.dt * last[v];
    }
    out.push(row);
  }
  return out;
};

export function makeWindow(
  episode: Episode,
  conditionSteps: number,
  rolloutSteps?: number
): ConditioningWindow {
  const total = episode.states.length;
  const rollout = rolloutSteps ?? total - 1 - conditionSteps;
  if (conditionSteps < 1 || rollout < 1 || conditionSteps + rollout > total) {
    throw new Error(
      `episode ${episode.episodeId} has ${total} states; cannot condition on ` +
        `${conditionSteps} and roll out ${rollout}`
    );
  }
  return {
    condStates: episode.states.slice(0, conditionSteps).map((r) => r.slice()),
    condActions: episode.actions.slice(0, conditionSteps - 1).map((r) => r.slice()),
    futureActions: episode.actions
      .slice(conditionSteps - 1, conditionSteps - 1 + rollout)
      .map((r) => r.slice()),
    dt: episode.dt,
    layout: episode.layout,
    taskId: episode.taskId,
  };
}
