/** Wire types of the experiment service and the runner's own records. */

export interface TimingEntry {
  phase: "fixation" | "cue" | "image" | "mask" | "context_only" | "object_only";
  /** Requested duration; null means "until the answer is submitted". */
  ms: number | null;
}

export interface TrialTarget {
  image_id: string;
  bbox: [number, number, number, number];
  image_size: [number, number];
  category: string;
  size_bin: string;
  extent: number;
}

export interface TrialPayload {
  trial_id: string;
  experiment: string;
  target: TrialTarget;
  timing: TimingEntry[];
  /** role -> URL path on the service */
  assets: Record<string, string>;
}

export interface NextTrialResponse {
  done: boolean;
  index?: number;
  n_trials?: number;
  mode?: string;
  trial?: TrialPayload;
}

export interface SessionSummary {
  session_id: string;
  subject_id: string;
  experiment: string;
  mode: string;
  n_trials: number;
  cursor: number;
  done: boolean;
}

export interface ResponseAck {
  accepted: boolean;
  cursor: number;
  remaining: number;
}

/** What was actually put on the screen, with frame-derived durations. */
export interface PhaseRecord {
  phase: string;
  visual: string;
  requested_ms: number | null;
  measured_ms: number | null;
}

export interface TrialPresentation {
  trial_id: string;
  phases: PhaseRecord[];
  raw_answer: string;
  answer_shown_at_ms: number;
}

export interface TimingQuality {
  valid: boolean;
  worst_stimulus_error_ms: number;
  refresh_ms: number;
  phases: Array<PhaseRecord & { error_ms: number | null; stimulus: boolean }>;
}
