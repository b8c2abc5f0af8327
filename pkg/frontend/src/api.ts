/** Typed client for the engine's run-control HTTP API. */

export interface TaskInfo {
  id: string;
  description: string;
  objective_count: number;
  signature: string;
  default_timeout_s: number;
  instance_count: number;
}

export interface MethodInfo {
  id: string;
  multi_objective: boolean;
  params: Record<string, number | boolean>;
}

export interface RunEventDoc {
  seq: number;
  ts: number;
  kind: string;
  payload: Record<string, unknown>;
}

export interface BestEntry {
  fitness: number[] | null;
  code: string | null;
  candidate_id: number | null;
}

export interface RunHandle {
  run_id: string;
  state: string;
  task: string;
  method: string;
  samples_used: number;
  max_samples: number;
  best: BestEntry | null;
  log_dir: string | null;
  error: string | null;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function asJson<T>(response: Response): Promise<T> {
  let body: unknown = null;
  try {
    body = await response.json();
  } catch {
    // fall through to the status check
  }
  if (!response.ok) {
    const doc = (body ?? {}) as { code?: string; message?: string };
    throw new ApiError(
      response.status,
      doc.code ?? "http_error",
      doc.message ?? `request failed with status ${response.status}`,
    );
  }
  return body as T;
}

export class ApiClient {
  constructor(private readonly base: string = "") {}

  private url(path: string): string {
    return `${this.base}${path}`;
  }

  async tasks(): Promise<TaskInfo[]> {
    const doc = await asJson<{ tasks: TaskInfo[] }>(await fetch(this.url("/tasks")));
    return doc.tasks;
  }

  async methods(): Promise<MethodInfo[]> {
    const doc = await asJson<{ methods: MethodInfo[] }>(await fetch(this.url("/methods")));
    return doc.methods;
  }

  async startRun(config: object): Promise<RunHandle> {
    return asJson<RunHandle>(
      await fetch(this.url("/runs"), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(config),
      }),
    );
  }

  async status(runId: string): Promise<RunHandle> {
    return asJson<RunHandle>(await fetch(this.url(`/runs/${runId}`)));
  }

  async stop(runId: string): Promise<RunHandle> {
    return asJson<RunHandle>(
      await fetch(this.url(`/runs/${runId}/stop`), { method: "POST" }),
    );
  }

  async events(runId: string, since: number): Promise<RunEventDoc[]> {
    const doc = await asJson<{ events: RunEventDoc[] }>(
      await fetch(this.url(`/runs/${runId}/events?since=${since}`)),
    );
    return doc.events;
  }
}
