/** Configuration form model, validation, and mapping to a run-config document. */

import type { MethodInfo } from "./api.js";

export interface FormModel {
  llmType: "http" | "mock";
  host: string;
  apiKey: string;
  model: string;
  mockScript: string; // response blocks separated by a line of ---
  taskId: string;
  methodId: string;
  methodParams: Record<string, number>;
  maxSamples: number;
  evalTimeoutS: number | null;
  instanceCount: number | null;
  logDir: string;
}

export function emptyForm(): FormModel {
  return {
    llmType: "http",
    host: "",
    apiKey: "",
    model: "",
    mockScript: "",
    taskId: "",
    methodId: "",
    methodParams: {},
    maxSamples: 20,
    evalTimeoutS: null,
    instanceCount: null,
    logDir: "",
  };
}

/** Parameter defaults the form shows when a method is selected. */
export function defaultsFor(method: MethodInfo): Record<string, number> {
  const out: Record<string, number> = {};
  for (const [name, value] of Object.entries(method.params)) {
    if (typeof value === "number") {
      out[name] = value;
    }
  }
  return out;
}

/** Problems that keep the Run button disabled; empty means ready. */
export function validate(form: FormModel): string[] {
  const problems: string[] = [];
  if (!form.taskId) {
    problems.push("choose a task");
  }
  if (!form.methodId) {
    problems.push("choose a search method");
  }
  if (!Number.isFinite(form.maxSamples) || form.maxSamples < 1) {
    problems.push("max samples must be at least 1");
  }
  if (form.llmType === "http") {
    if (!form.host.trim()) {
      problems.push("API host is required");
    }
    if (!form.apiKey.trim()) {
      problems.push("API key is required");
    }
  } else if (!form.mockScript.trim()) {
    problems.push("mock script must have at least one response");
  }
  for (const [name, value] of Object.entries(form.methodParams)) {
    if (!Number.isFinite(value)) {
      problems.push(`${name} must be a number`);
    }
  }
  if (form.evalTimeoutS !== null && form.evalTimeoutS <= 0) {
    problems.push("evaluation timeout must be positive");
  }
  if (form.instanceCount !== null && form.instanceCount < 1) {
    problems.push("instance count must be at least 1");
  }
  return problems;
}

export function splitScript(text: string): string[] {
  return text
    .split(/\n---\n/)
    .map((block) => block.trim())
    .filter((block) => block.length > 0);
}

/** Build the config document POST /runs expects; never logs the key. */
export function toRunConfig(form: FormModel): object {
  const llm: Record<string, unknown> =
    form.llmType === "mock"
      ? { type: "mock", script: splitScript(form.mockScript) }
      : {
          type: "http",
          host: form.host.trim(),
          api_key: form.apiKey,
          model: form.model.trim(),
        };
  const task: Record<string, unknown> = { id: form.taskId };
  if (form.evalTimeoutS !== null) {
    task["timeout_s"] = form.evalTimeoutS;
  }
  if (form.instanceCount !== null) {
    task["instance_count"] = form.instanceCount;
  }
  const doc: Record<string, unknown> = {
    llm,
    method: { method: form.methodId, ...form.methodParams },
    task,
    budget: { max_samples: form.maxSamples },
  };
  if (form.logDir.trim()) {
    doc["profiler"] = { log_dir: form.logDir.trim() };
  }
  return doc;
}
