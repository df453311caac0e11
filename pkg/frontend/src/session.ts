/** Session controller: owns the active rollout, serializes step requests,
 * queues command edits for the next step, and drives auto-play. */

import { ApiClient, CommandBody, SessionState, StepResponse } from "./api.js";

export interface TraceEntry {
  step: number;
  action: number;
  reward: number;
  totalReturn: number;
  probabilities: number[];
}

export type SessionListener = () => void;

export function validCommand(command: CommandBody): boolean {
  return Number.isFinite(command.d_r) && Number.isInteger(command.d_t) && command.d_t >= 1;
}

export class SessionController {
  session: SessionState | null = null;
  trace: TraceEntry[] = [];
  pendingEdit: CommandBody | null = null;
  playing = false;
  lastError: string | null = null;

  private startArgs: { modelId: string; command: CommandBody; seed: number } | null = null;
  private queue: Promise<unknown> = Promise.resolve();
  private timer: ReturnType<typeof setInterval> | null = null;
  private listeners: SessionListener[] = [];

  constructor(private readonly api: ApiClient) {}

  onChange(listener: SessionListener): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  /** Serialize API work: each operation starts after the previous settles. */
  private enqueue<T>(work: () => Promise<T>): Promise<T> {
    const next = this.queue.then(work);
    this.queue = next.catch(() => undefined);
    return next;
  }

  get ended(): boolean {
    return this.session !== null && (this.session.terminal || this.session.truncated);
  }

  async start(modelId: string, command: CommandBody, seed: number): Promise<void> {
    if (!validCommand(command)) {
      throw new Error("desired horizon must be an integer of at least 1");
    }
    this.startArgs = { modelId, command: { ...command }, seed };
    await this.enqueue(async () => {
      this.pause();
      this.session = await this.api.createSession(modelId, command, seed);
      this.trace = [];
      this.pendingEdit = null;
      this.lastError = null;
      this.notify();
    });
  }

  /** Restart with the arguments of the previous start (offered on 409). */
  async restart(): Promise<void> {
    if (!this.startArgs) throw new Error("nothing to restart");
    const { modelId, command, seed } = this.startArgs;
    await this.start(modelId, command, seed);
  }

  /** Queue a command edit; it rides along as override_command on the next
   * step. Mirrors the server rule, so a valid form never yields a 400. */
  editCommand(command: CommandBody): void {
    if (!validCommand(command)) {
      throw new Error("desired horizon must be an integer of at least 1");
    }
    this.pendingEdit = { ...command };
    this.notify();
  }

  async step(): Promise<StepResponse | null> {
    return this.enqueue(async () => {
      if (!this.session || this.ended) return null;
      const override = this.pendingEdit;
      this.pendingEdit = null;
      try {
        const response = await this.api.step(this.session.session_id, override ?? undefined);
        this.session = response.session;
        this.trace.push({
          step: response.session.step_count,
          action: response.action,
          reward: response.result.reward,
          totalReturn: response.session.total_return,
          probabilities: response.action_probabilities,
        });
        this.lastError = null;
        if (this.ended) this.pause();
        this.notify();
        return response;
      } catch (error) {
        this.lastError = error instanceof Error ? error.message : String(error);
        this.pause();
        this.notify();
        throw error;
      }
    });
  }

  play(stepsPerSecond = 25): void {
    if (this.timer !== null || !this.session) return;
    this.playing = true;
    this.timer = setInterval(() => {
      if (this.ended) {
        this.pause();
        return;
      }
      void this.step().catch(() => undefined);
    }, 1000 / stepsPerSecond);
    this.notify();
  }

  pause(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
    this.playing = false;
  }
}
