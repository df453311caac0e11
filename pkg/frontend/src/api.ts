/** Typed client for the inference service. Every number shown in the UI
 * originates from one of these responses; the client never computes
 * physics or importances itself. */

export interface CommandBody {
  d_r: number;
  d_t: number;
}

export interface ModelInfo {
  model_id: string;
  family: string;
  env: string;
  seed: number;
  state_dim: number;
  action_count: number;
  max_steps: number;
  feature_names: string[];
  default_command: CommandBody;
  supports_importance: boolean;
}

export interface SessionState {
  session_id: string;
  model_id: string;
  env: string;
  state: number[];
  command: CommandBody;
  step_count: number;
  total_return: number;
  terminal: boolean;
  truncated: boolean;
}

export interface StepResult {
  next_state: number[];
  reward: number;
  terminal: boolean;
  truncated: boolean;
}

export interface StepResponse {
  action: number;
  action_probabilities: number[];
  result: StepResult;
  session: SessionState;
}

export interface ImportanceResponse {
  kind: string;
  scores: number[];
  feature_names: string[];
}

export interface EvalResponse {
  mean: number;
  std: number;
  per_episode_returns: number[];
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(response.status, detail);
    }
    if (response.status === 204) return undefined as T;
    return (await response.json()) as T;
  }

  listModels(): Promise<ModelInfo[]> {
    return this.request<ModelInfo[]>("/models");
  }

  createSession(modelId: string, command: CommandBody, seed: number): Promise<SessionState> {
    return this.request<SessionState>("/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ model_id: modelId, d_r: command.d_r, d_t: command.d_t, seed }),
    });
  }

  step(sessionId: string, overrideCommand?: CommandBody): Promise<StepResponse> {
    const body = overrideCommand ? { override_command: overrideCommand } : {};
    return this.request<StepResponse>(`/sessions/${sessionId}/step`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  importance(sessionId: string, kind: "local" | "global"): Promise<ImportanceResponse> {
    return this.request<ImportanceResponse>(`/sessions/${sessionId}/importance?kind=${kind}`);
  }

  evaluate(modelId: string, command: CommandBody, n: number, seed = 0): Promise<EvalResponse> {
    return this.request<EvalResponse>("/eval", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ model_id: modelId, d_r: command.d_r, d_t: command.d_t, n, seed }),
    });
  }

  deleteSession(sessionId: string): Promise<void> {
    return this.request<void>(`/sessions/${sessionId}`, { method: "DELETE" });
  }
}
