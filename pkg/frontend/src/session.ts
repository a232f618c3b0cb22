/** Session flow: create (or resume) a session and loop
 * next-trial -> run -> record until the service reports Done.
 *
 * next-trial is an idempotent read, so a refresh or network retry
 * resumes at the pending trial; a duplicate-response rejection after a
 * lost acknowledgment is treated as already-recorded and the loop moves
 * on. Correct answers are never shown.
 */

import { ServiceClient, ServiceError, timingForSubmission } from "./api.js";
import { measureTiming } from "./timing.js";
import { runTrial, type TrialDeps } from "./trial.js";
import type { TimingQuality, TrialPresentation } from "./types.js";

export interface SessionOptions {
  subjectId: string;
  experiment?: string;
  seed?: number;
  mode?: "timed" | "untimed_groundtruth";
  maxTrials?: number;
  refreshMs?: number;
}

export interface SessionProgress {
  index: number;
  total: number;
  presentation: TrialPresentation;
  quality: TimingQuality;
}

export interface SessionSummaryReport {
  sessionId: string;
  completed: number;
  total: number;
  timingValid: number;
}

export async function sessionFlow(
  client: ServiceClient,
  options: SessionOptions,
  deps: TrialDeps,
  onProgress?: (p: SessionProgress) => void,
): Promise<SessionSummaryReport> {
  let session;
  try {
    session = await client.createSession({
      subjectId: options.subjectId,
      experiment: options.experiment,
      seed: options.seed,
      mode: options.mode,
      maxTrials: options.maxTrials,
    });
  } catch (err) {
    if (err instanceof ServiceError && err.status === 400) {
      // session already exists: resume at its cursor
      const sid = `s-${options.subjectId}-${options.experiment ?? "all"}-${options.seed ?? 0}`;
      session = await client.getSession(sid);
    } else {
      throw err;
    }
  }

  let completed = 0;
  let timingValid = 0;
  for (;;) {
    const next = await client.nextTrial(session.session_id);
    if (next.done || !next.trial) break;
    const trial = {
      ...next.trial,
      assets: Object.fromEntries(
        Object.entries(next.trial.assets).map(([role, path]) => [
          role,
          client.assetUrl(path),
        ]),
      ),
    };
    const presentation = await runTrial(trial, deps, options.refreshMs);
    const quality = measureTiming(presentation, options.refreshMs);
    if (quality.valid) timingValid += 1;
    try {
      await client.postResponse(
        session.session_id,
        trial.trial_id,
        presentation.raw_answer,
        timingForSubmission(presentation.phases),
      );
    } catch (err) {
      if (!(err instanceof ServiceError && err.status === 409)) throw err;
      // duplicate after a lost ack: the response is already stored
    }
    completed += 1;
    onProgress?.({
      index: (next.index ?? 0) + 1,
      total: next.n_trials ?? 0,
      presentation,
      quality,
    });
  }
  return {
    sessionId: session.session_id,
    completed,
    total: session.n_trials,
    timingValid,
  };
}
