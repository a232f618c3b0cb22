/** Thin client for the experiment service endpoints. */

import type {
  NextTrialResponse,
  ResponseAck,
  SessionSummary,
} from "./types.js";

export interface CreateSessionOptions {
  subjectId: string;
  experiment?: string;
  seed?: number;
  mode?: "timed" | "untimed_groundtruth";
  maxTrials?: number;
}

export class ServiceError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

async function expectOk(response: Response): Promise<any> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = await response.json();
      if (body && body.detail) detail = String(body.detail);
    } catch {
      /* not json */
    }
    throw new ServiceError(detail, response.status);
  }
  return response.json();
}

export class ServiceClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  async createSession(opts: CreateSessionOptions): Promise<SessionSummary> {
    const response = await this.fetchFn(this.url("/sessions"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({
        subject_id: opts.subjectId,
        experiment: opts.experiment ?? "all",
        seed: opts.seed ?? 0,
        mode: opts.mode ?? "timed",
        max_trials: opts.maxTrials ?? null,
      }),
    });
    return expectOk(response);
  }

  async getSession(sessionId: string): Promise<SessionSummary> {
    return expectOk(await this.fetchFn(this.url(`/sessions/${sessionId}`)));
  }

  /** Idempotent: repeated calls return the same pending trial. */
  async nextTrial(sessionId: string): Promise<NextTrialResponse> {
    return expectOk(
      await this.fetchFn(this.url(`/sessions/${sessionId}/next`)),
    );
  }

  async postResponse(
    sessionId: string,
    trialId: string,
    rawAnswer: string,
    timing: Array<{ phase: string; requested_ms: number | null; measured_ms: number | null }>,
  ): Promise<ResponseAck> {
    const response = await this.fetchFn(
      this.url(`/sessions/${sessionId}/responses`),
      {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({
          trial_id: trialId,
          raw_answer: rawAnswer,
          timing,
        }),
      },
    );
    return expectOk(response);
  }

  assetUrl(path: string): string {
    return path.startsWith("http") ? path : this.url(path);
  }
}

export function timingForSubmission(
  phases: Array<{ phase: string; requested_ms: number | null; measured_ms: number | null }>,
): Array<{ phase: string; requested_ms: number | null; measured_ms: number | null }> {
  return phases.map(({ phase, requested_ms, measured_ms }) => ({
    phase,
    requested_ms,
    measured_ms,
  }));
}
