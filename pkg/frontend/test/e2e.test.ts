/** End-to-end against a live engine: start the HTTP service, drive a
 * 20-sample mock run through the dashboard's own API client and state fold,
 * and check the chart/stop/reload contracts.
 */

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { applyEvents, initialState } from "../src/state.js";

const PORT = 8741 + (process.pid % 200);
const BASE = `http://127.0.0.1:${PORT}`;

const MOCK_RESPONSE = "{Linear}\n```\ndef g(n, s):\n    return 0.4 * n\n```";

function runConfig(maxSamples: number) {
  return {
    llm: { type: "mock", script: [MOCK_RESPONSE] },
    method: { method: "eoh", pop_size: 4, rng_seed: 0 },
    task: { id: "sr_growth" },
    budget: { max_samples: maxSamples },
  };
}

let server: ChildProcess;
const api = new ApiClient(BASE);

async function waitForServer(timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      await api.tasks();
      return;
    } catch {
      await new Promise((resolve) => setTimeout(resolve, 150));
    }
  }
  throw new Error("engine did not come up");
}

async function waitForState(runId: string, states: string[], timeoutMs = 30_000): Promise<string> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    const handle = await api.status(runId);
    if (states.includes(handle.state)) {
      return handle.state;
    }
    await new Promise((resolve) => setTimeout(resolve, 50));
  }
  throw new Error(`run ${runId} did not reach ${states.join("/")}`);
}

beforeAll(async () => {
  const logRoot = mkdtempSync(join(tmpdir(), "dash-e2e-"));
  server = spawn(
    "python3",
    ["-m", "algosmith.service.cli", "serve", "--port", String(PORT), "--log-root", logRoot],
    { stdio: "ignore" },
  );
  await waitForServer();
}, 40_000);

afterAll(() => {
  server?.kill();
});

describe("dashboard against a live engine", () => {
  it("registries feed the config panel", async () => {
    const tasks = await api.tasks();
    expect(tasks.map((t) => t.id).sort()).toEqual(["obp", "sr_growth", "tsp_construct"]);
    const methods = await api.methods();
    const eoh = methods.find((m) => m.id === "eoh");
    expect(eoh?.params["pop_size"]).toBe(10);
    const funsearch = methods.find((m) => m.id === "funsearch");
    expect(funsearch?.params["num_islands"]).toBe(10);
    expect(funsearch?.params["samples_per_prompt"]).toBe(4);
  });

  it("a 20-sample run yields a chart point per sample drawn, and reload reconstructs it", async () => {
    const handle = await api.startRun(runConfig(20));
    await waitForState(handle.run_id, ["finished"]);

    // incremental polling, the way the page consumes events
    let incremental = initialState();
    for (;;) {
      const chunk = await api.events(handle.run_id, incremental.cursor);
      if (chunk.length === 0) {
        break;
      }
      incremental = applyEvents(incremental, chunk.slice(0, 7)); // partial batches on purpose
      incremental = applyEvents(incremental, chunk.slice(7));
    }
    const drawn = (await api.events(handle.run_id, -1)).filter((e) => e.kind === "sample_drawn");
    expect(drawn).toHaveLength(20);
    expect(incremental.points).toHaveLength(20);
    expect(incremental.ended).toBe(true);

    // reload: one replay from cursor -1 rebuilds the identical chart
    const replay = applyEvents(initialState(), await api.events(handle.run_id, -1));
    expect(replay.points).toEqual(incremental.points);
    expect(replay.bestCode).toEqual(incremental.bestCode);
    expect(replay.bestFitness).toEqual(incremental.bestFitness);
  }, 40_000);

  it("stop drives a running experiment to the stopped state", async () => {
    const handle = await api.startRun(runConfig(500_000));
    await waitForState(handle.run_id, ["running"]);
    await api.stop(handle.run_id);
    const state = await waitForState(handle.run_id, ["stopped"]);
    expect(state).toBe("stopped");
    const replay = applyEvents(initialState(), await api.events(handle.run_id, -1));
    expect(replay.endReason).toBe("stopped");
  }, 40_000);
});
