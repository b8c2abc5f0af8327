/** DOM wiring: config panel, run controls, live chart, best-algorithm pane.
 *
 * The page holds no truth of its own. Every render is a function of the
 * polled event stream, so reloading (or reopening #run=<id>) rebuilds the
 * identical view from cursor -1. The API key lives only in the password
 * input and the POST body; it is never rendered, logged, or put in a URL.
 */

import { ApiClient, ApiError, type MethodInfo, type RunEventDoc, type TaskInfo } from "./api.js";
import { chartSvg } from "./chart.js";
import { defaultsFor, emptyForm, toRunConfig, validate, type FormModel } from "./form.js";
import { applyEvents, initialState, type RunViewState } from "./state.js";

const POLL_MS = 1000;
const POLL_MAX_MS = 10_000;

const api = new ApiClient("");

interface AppState {
  tasks: TaskInfo[];
  methods: MethodInfo[];
  form: FormModel;
  runId: string | null;
  runState: string;
  logDir: string | null;
  view: RunViewState;
  events: RunEventDoc[];
  banner: { kind: "info" | "error"; text: string } | null;
  pollDelay: number;
}

const app: AppState = {
  tasks: [],
  methods: [],
  form: emptyForm(),
  runId: null,
  runState: "",
  logDir: null,
  view: initialState(),
  events: [],
  banner: null,
  pollDelay: POLL_MS,
};

let pollTimer: number | null = null;

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) {
    throw new Error(`missing element #${id}`);
  }
  return el as T;
}

function setBanner(kind: "info" | "error" | null, text = ""): void {
  app.banner = kind ? { kind, text } : null;
  const el = byId<HTMLDivElement>("banner");
  if (!app.banner) {
    el.hidden = true;
    return;
  }
  el.hidden = false;
  el.textContent = app.banner.text;
  el.className = `banner ${app.banner.kind}`;
}

// ---------------- config panel ----------------

function methodInfo(): MethodInfo | undefined {
  return app.methods.find((m) => m.id === app.form.methodId);
}

function renderParamFields(): void {
  const holder = byId<HTMLDivElement>("method-params");
  holder.innerHTML = "";
  const method = methodInfo();
  if (!method) {
    return;
  }
  for (const [name, value] of Object.entries(app.form.methodParams)) {
    const label = document.createElement("label");
    label.textContent = name;
    const input = document.createElement("input");
    input.type = "number";
    input.step = "any";
    input.value = String(value);
    input.addEventListener("input", () => {
      app.form.methodParams[name] = Number(input.value);
      renderRunButton();
    });
    label.appendChild(input);
    holder.appendChild(label);
  }
}

function renderRunButton(): void {
  const problems = validate(app.form);
  const button = byId<HTMLButtonElement>("run-btn");
  const busy = app.runId !== null && !app.view.ended && app.runState !== "failed";
  button.disabled = problems.length > 0 || busy;
  byId<HTMLDivElement>("form-problems").textContent = problems.join("; ");
  byId<HTMLButtonElement>("stop-btn").disabled = !busy;
}

function buildConfigPanel(): void {
  const taskSelect = byId<HTMLSelectElement>("task-select");
  taskSelect.innerHTML = "<option value=''>choose...</option>";
  for (const task of app.tasks) {
    const option = document.createElement("option");
    option.value = task.id;
    option.textContent = task.id;
    taskSelect.appendChild(option);
  }
  taskSelect.addEventListener("change", () => {
    app.form.taskId = taskSelect.value;
    const task = app.tasks.find((t) => t.id === taskSelect.value);
    byId<HTMLDivElement>("task-desc").textContent = task ? task.description : "";
    renderRunButton();
  });

  const methodSelect = byId<HTMLSelectElement>("method-select");
  methodSelect.innerHTML = "<option value=''>choose...</option>";
  for (const method of app.methods) {
    const option = document.createElement("option");
    option.value = method.id;
    option.textContent = method.multi_objective ? `${method.id} (2 objectives)` : method.id;
    methodSelect.appendChild(option);
  }
  methodSelect.addEventListener("change", () => {
    app.form.methodId = methodSelect.value;
    const method = methodInfo();
    app.form.methodParams = method ? defaultsFor(method) : {};
    renderParamFields();
    renderRunButton();
  });

  const llmType = byId<HTMLSelectElement>("llm-type");
  llmType.addEventListener("change", () => {
    app.form.llmType = llmType.value as "http" | "mock";
    byId<HTMLDivElement>("http-fields").hidden = app.form.llmType !== "http";
    byId<HTMLDivElement>("mock-fields").hidden = app.form.llmType !== "mock";
    renderRunButton();
  });

  const bind = (id: string, set: (value: string) => void) => {
    const input = byId<HTMLInputElement | HTMLTextAreaElement>(id);
    input.addEventListener("input", () => {
      set(input.value);
      renderRunButton();
    });
  };
  bind("llm-host", (v) => (app.form.host = v));
  bind("llm-key", (v) => (app.form.apiKey = v));
  bind("llm-model", (v) => (app.form.model = v));
  bind("mock-script", (v) => (app.form.mockScript = v));
  bind("max-samples", (v) => (app.form.maxSamples = Number(v)));
  bind("log-dir", (v) => (app.form.logDir = v));

  byId<HTMLButtonElement>("run-btn").addEventListener("click", () => void startRun());
  byId<HTMLButtonElement>("stop-btn").addEventListener("click", () => void stopRun());
  renderRunButton();
}

// ---------------- run lifecycle ----------------

async function loadRegistries(): Promise<void> {
  try {
    [app.tasks, app.methods] = await Promise.all([api.tasks(), api.methods()]);
  } catch (err) {
    setBanner("error", `could not load task/method registries: ${String(err)}`);
    const retry = byId<HTMLButtonElement>("retry-btn");
    retry.hidden = false;
    byId<HTMLFieldSetElement>("config-fields").disabled = true;
    return;
  }
  byId<HTMLButtonElement>("retry-btn").hidden = true;
  byId<HTMLFieldSetElement>("config-fields").disabled = false;
  setBanner(null);
  buildConfigPanel();
}

function attachToRun(runId: string): void {
  app.runId = runId;
  app.view = initialState();
  app.events = [];
  app.pollDelay = POLL_MS;
  window.location.hash = `run=${runId}`;
  schedulePoll(0);
}

async function startRun(): Promise<void> {
  try {
    const handle = await api.startRun(toRunConfig(app.form));
    setBanner("info", `run ${handle.run_id} started`);
    attachToRun(handle.run_id);
  } catch (err) {
    if (err instanceof ApiError) {
      setBanner("error", `${err.code}: ${err.message}`);
    } else {
      setBanner("error", String(err));
    }
  }
  renderRunButton();
}

async function stopRun(): Promise<void> {
  if (!app.runId) {
    return;
  }
  try {
    await api.stop(app.runId);
    setBanner("info", "stop requested");
  } catch (err) {
    setBanner("error", String(err));
  }
}

function schedulePoll(delay: number): void {
  if (pollTimer !== null) {
    window.clearTimeout(pollTimer);
  }
  pollTimer = window.setTimeout(() => void poll(), delay);
}

async function poll(): Promise<void> {
  if (!app.runId) {
    return;
  }
  try {
    const [events, handle] = await Promise.all([
      api.events(app.runId, app.view.cursor),
      api.status(app.runId),
    ]);
    app.view = applyEvents(app.view, events);
    app.events.push(...events);
    app.runState = handle.state;
    app.logDir = handle.log_dir;
    app.pollDelay = POLL_MS;
    if (app.banner?.text === "connection lost; retrying") {
      setBanner(null);
    }
    render(handle.samples_used, handle.max_samples, handle.error);
    if (handle.state === "pending" || handle.state === "running") {
      schedulePoll(app.pollDelay);
    }
  } catch {
    // keep the cursor; back off and retry
    setBanner("error", "connection lost; retrying");
    app.pollDelay = Math.min(app.pollDelay * 2, POLL_MAX_MS);
    schedulePoll(app.pollDelay);
  }
}

// ---------------- rendering ----------------

function render(samplesUsed: number, maxSamples: number, error: string | null): void {
  byId<HTMLSpanElement>("run-id").textContent = app.runId ?? "-";
  byId<HTMLSpanElement>("run-state").textContent = app.runState + (error ? ` (${error})` : "");
  byId<HTMLSpanElement>("run-progress").textContent = `${samplesUsed} / ${maxSamples} samples`;
  byId<HTMLSpanElement>("run-generation").textContent = String(app.view.generation);
  byId<HTMLSpanElement>("log-dir").textContent = app.logDir ?? "-";

  const best = byId<HTMLPreElement>("best-code");
  best.textContent = app.view.bestCode ?? "(no valid candidate yet)";
  const fitness = app.view.bestFitness;
  byId<HTMLSpanElement>("best-fitness").textContent = fitness
    ? fitness.map((v) => v.toPrecision(6)).join(", ") +
      (app.view.archiveSize !== null ? ` (archive ${app.view.archiveSize})` : "")
    : "-";

  byId<HTMLDivElement>("chart").innerHTML = chartSvg(app.view.points, {
    width: 640,
    height: 320,
  });

  const logPane = byId<HTMLPreElement>("event-log");
  logPane.textContent = app.events
    .slice(-40)
    .map((e) => `${e.seq}\t${e.kind}\t${JSON.stringify(e.payload)}`)
    .join("\n");
  renderRunButton();
}

// ---------------- boot ----------------

function resumeFromHash(): void {
  const match = window.location.hash.match(/run=([A-Za-z0-9]+)/);
  if (match) {
    attachToRun(match[1]!);
  }
}

export function boot(): void {
  byId<HTMLButtonElement>("retry-btn").addEventListener("click", () => void loadRegistries());
  void loadRegistries().then(resumeFromHash);
}

boot();
