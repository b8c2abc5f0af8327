/** Dashboard run state as a pure fold over the event stream.
 *
 * The server's event log is the only source of truth: replaying all events
 * from cursor -1 reconstructs exactly the state built incrementally, which
 * is what makes page reloads safe.
 */

import type { RunEventDoc } from "./api.js";

export interface ChartPoint {
  sampleIndex: number;
  best: number | null; // best-so-far after this sample's evaluation
}

export interface RunViewState {
  cursor: number; // seq of the last applied event
  points: ChartPoint[];
  sampleCount: number;
  bestFitness: number[] | null;
  bestCode: string | null;
  generation: number;
  archiveSize: number | null;
  ended: boolean;
  endReason: string | null;
  runningBest: number | null; // internal: running min of objective 0
}

export function initialState(): RunViewState {
  return {
    cursor: -1,
    points: [],
    sampleCount: 0,
    bestFitness: null,
    bestCode: null,
    generation: 0,
    archiveSize: null,
    ended: false,
    endReason: null,
    runningBest: null,
  };
}

function fitnessOf(payload: Record<string, unknown>): number[] | null {
  const fitness = payload["fitness"];
  if (Array.isArray(fitness) && fitness.every((v) => typeof v === "number")) {
    return fitness as number[];
  }
  return null;
}

/** Apply events with seq > cursor, in order; stale or replayed events are skipped. */
export function applyEvents(state: RunViewState, events: RunEventDoc[]): RunViewState {
  const next: RunViewState = {
    ...state,
    points: state.points.slice(),
  };
  for (const event of events) {
    if (event.seq <= next.cursor) {
      continue;
    }
    next.cursor = event.seq;
    const payload = event.payload ?? {};
    switch (event.kind) {
      case "sample_drawn": {
        next.sampleCount += 1;
        next.points.push({
          sampleIndex: payload["sample_index"] as number,
          best: next.runningBest,
        });
        break;
      }
      case "eval_finished": {
        const fitness = fitnessOf(payload);
        const sampleIndex = payload["sample_index"] as number;
        if (fitness !== null) {
          if (next.runningBest === null || fitness[0] < next.runningBest) {
            next.runningBest = fitness[0];
          }
        }
        if (sampleIndex >= 0) {
          const point = next.points[next.points.length - 1];
          if (point && point.sampleIndex === sampleIndex) {
            next.points[next.points.length - 1] = {
              sampleIndex,
              best: next.runningBest,
            };
          }
        }
        break;
      }
      case "new_best": {
        next.bestFitness = fitnessOf(payload);
        next.bestCode = typeof payload["code"] === "string" ? (payload["code"] as string) : null;
        if (typeof payload["archive_size"] === "number") {
          next.archiveSize = payload["archive_size"] as number;
        }
        break;
      }
      case "generation_end": {
        next.generation = ((payload["generation"] as number) ?? 0) + 1;
        break;
      }
      case "run_end": {
        next.ended = true;
        next.endReason = (payload["reason"] as string) ?? null;
        break;
      }
      default:
        break;
    }
  }
  return next;
}

/** The chart series: defined best-so-far values in sample order. */
export function chartSeries(state: RunViewState): ChartPoint[] {
  return state.points;
}
