/** Frame-aligned presentation of one trial.
 *
 * Phases run strictly in order: fixation, location cue, the timed
 * stimulus phases from the trial's schedule, then the answer prompt.
 * Assets are preloaded and decoded before the fixation begins; phase
 * switches happen on display-refresh callbacks, never wall-clock sleeps,
 * and measured durations come from the frame timestamps.
 */

import { estimateRefresh, type FrameClock } from "./clock.js";
import type {
  PhaseRecord,
  TimingEntry,
  TrialPayload,
  TrialPresentation,
} from "./types.js";

export type Visual =
  | { kind: "fixation" }
  | { kind: "cue"; bbox: [number, number, number, number]; imageSize: [number, number] }
  | { kind: "asset"; role: string; url: string }
  | { kind: "answer" };

export interface Display {
  /** Called exactly once per phase, at its first frame. */
  show(visual: Visual): void;
}

export interface TrialDeps {
  clock: FrameClock;
  display: Display;
  /** Fetch-and-decode every URL before the trial may start. */
  preload(urls: string[]): Promise<void>;
  /** Resolves with the subject's submitted answer. */
  getAnswer(): Promise<string>;
}

const STIMULUS_PHASES = new Set([
  "image",
  "mask",
  "context_only",
  "object_only",
]);

export function isStimulusPhase(phase: string): boolean {
  return STIMULUS_PHASES.has(phase);
}

/** Single-word answers in timed mode; ground-truth mode is free-form. */
export function validateAnswer(raw: string, mode: string): string | null {
  const trimmed = raw.trim();
  if (!trimmed) return null;
  if (mode !== "untimed_groundtruth" && /\s/.test(trimmed)) return null;
  return trimmed;
}

interface PlannedPhase {
  phase: string;
  visual: Visual;
  requestedMs: number | null;
}

export function planPhases(trial: TrialPayload): PlannedPhase[] {
  const plan: PlannedPhase[] = [];
  for (const entry of trial.timing) {
    plan.push({
      phase: entry.phase,
      visual: visualFor(entry, trial),
      requestedMs: entry.ms,
    });
  }
  const order = plan.map((p) => p.phase);
  if (order[0] !== "fixation" || order[1] !== "cue") {
    throw new Error(`schedule must start fixation, cue; got ${order}`);
  }
  if (!order.slice(2).every((p) => isStimulusPhase(p))) {
    throw new Error(`unexpected phases after the cue: ${order}`);
  }
  return plan;
}

function visualFor(entry: TimingEntry, trial: TrialPayload): Visual {
  if (entry.phase === "fixation") return { kind: "fixation" };
  if (entry.phase === "cue") {
    return {
      kind: "cue",
      bbox: trial.target.bbox,
      imageSize: trial.target.image_size,
    };
  }
  const url = trial.assets[entry.phase === "image" ? "image" : entry.phase];
  if (!url) {
    throw new Error(`trial ${trial.trial_id} lacks asset for ${entry.phase}`);
  }
  return { kind: "asset", role: entry.phase, url };
}

/** Round a requested duration to whole frames (at least one). */
export function framesFor(requestedMs: number, refreshMs: number): number {
  return Math.max(1, Math.round(requestedMs / refreshMs));
}

export async function runTrial(
  trial: TrialPayload,
  deps: TrialDeps,
  nominalRefreshMs = 1000 / 60,
): Promise<TrialPresentation> {
  const plan = planPhases(trial);
  await deps.preload(Object.values(trial.assets));

  const records: PhaseRecord[] = [];
  const frameTimes: number[] = [];
  let ts = await deps.clock.nextFrame();
  frameTimes.push(ts);

  for (const phase of plan) {
    const startTs = ts;
    deps.display.show(phase.visual);
    if (phase.requestedMs === null) {
      // untimed: the visual persists; the answer prompt takes over below
      records.push({
        phase: phase.phase,
        visual: phase.visual.kind,
        requested_ms: null,
        measured_ms: null,
      });
      continue;
    }
    const refresh =
      frameTimes.length >= 3 ? estimateRefresh(frameTimes) : nominalRefreshMs;
    const frames = framesFor(phase.requestedMs, refresh);
    const scheduledEnd = startTs + frames * refresh;
    // advance to the frame nearest the scheduled end
    for (;;) {
      const next = await deps.clock.nextFrame();
      frameTimes.push(next);
      if (frameTimes.length > 240) frameTimes.shift();
      ts = next;
      if (next >= scheduledEnd - refresh / 2) break;
    }
    records.push({
      phase: phase.phase,
      visual: phase.visual.kind,
      requested_ms: phase.requestedMs,
      measured_ms: ts - startTs,
    });
  }

  // the answer box appears only after every stimulus phase has ended
  deps.display.show({ kind: "answer" });
  const answerShownAt = ts;
  const rawAnswer = await deps.getAnswer();
  return {
    trial_id: trial.trial_id,
    phases: records,
    raw_answer: rawAnswer,
    answer_shown_at_ms: answerShownAt,
  };
}
