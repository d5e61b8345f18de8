// Typed client for the session service. Every state transition the UI makes
// goes through this class and is recorded in `log`, which the E2E test uses
// to prove the UI never touches results by any other route.

export interface SessionHandle {
  id: string;
  state: "annotating" | "tracking" | "done" | "failed";
  progress: { done: number; total: number };
  error: { code: string; message: string; frame?: number | null } | null;
}

export interface StagedWire {
  index: number;
  mask: number[];
  provenance: string;
}

export interface PromptWire {
  type: "point" | "box" | "text";
  x?: number;
  y?: number;
  polarity?: "positive" | "negative";
  box?: { x_min: number; y_min: number; x_max: number; y_max: number };
  phrase?: string;
  score_threshold?: number;
}

export interface SessionConfigWire {
  mode: "interactive" | "automatic" | "fusion";
  n: number;
  t: number;
  min_area?: number;
  keyframe_source?: string;
  text_prompts?: { phrase: string; score_threshold?: number }[];
  backend: string;
}

export interface ResultFrame {
  frame: number;
  png: string;
  objects: { id: number; mask: number[] }[];
}

export interface ManifestWire {
  config: Record<string, unknown>;
  frames: number;
  status: string;
  error: unknown;
  registry: Record<string, { birth_frame: number; provenance: string; active: boolean }>;
  cmr_log: { frame: number; admitted: [number, number][]; rejected: [number, number][] }[];
  palette: string;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

export interface RequestLogEntry {
  method: string;
  path: string;
  status: number;
}

export class ApiClient {
  readonly log: RequestLogEntry[] = [];

  constructor(
    private baseUrl: string,
    private fetchImpl: typeof fetch = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: body !== undefined ? { "content-type": "application/json" } : undefined,
      body: body !== undefined ? JSON.stringify(body) : undefined,
    });
    this.log.push({ method, path, status: resp.status });
    const text = await resp.text();
    const doc = text ? JSON.parse(text) : {};
    if (!resp.ok) {
      throw new ApiError(resp.status, doc.code ?? "error", doc.message ?? resp.statusText);
    }
    return doc as T;
  }

  createSession(config: SessionConfigWire): Promise<SessionHandle> {
    return this.request("POST", "/sessions", config);
  }

  attachVideo(
    id: string,
    body: Record<string, unknown> = {},
  ): Promise<{ frames: number; preview: string }> {
    return this.request("POST", `/sessions/${id}/video`, body);
  }

  addPrompt(id: string, prompt: PromptWire): Promise<{ staged: StagedWire[]; staged_count: number }> {
    return this.request("POST", `/sessions/${id}/prompts`, prompt);
  }

  revokePrompt(id: string, k: number): Promise<{ staged_count: number }> {
    return this.request("DELETE", `/sessions/${id}/prompts/${k}`);
  }

  commit(id: string): Promise<{ frame: number; objects: { id: number; area: number }[] }> {
    return this.request("POST", `/sessions/${id}/commit`);
  }

  track(id: string): Promise<{ id: string; state: string }> {
    return this.request("POST", `/sessions/${id}/track`);
  }

  handle(id: string): Promise<SessionHandle> {
    return this.request("GET", `/sessions/${id}`);
  }

  result(id: string, frame: number): Promise<ResultFrame> {
    return this.request("GET", `/sessions/${id}/results/${frame}`);
  }

  manifest(id: string): Promise<ManifestWire> {
    return this.request("GET", `/sessions/${id}/manifest`);
  }

  cancel(id: string): Promise<SessionHandle> {
    return this.request("DELETE", `/sessions/${id}`);
  }

  eventsUrl(id: string): string {
    return `${this.baseUrl}/sessions/${id}/events`;
  }
}
