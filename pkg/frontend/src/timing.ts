/** Timing-quality assessment of a completed presentation.
 *
 * A trial is timing-valid iff every stimulus-bearing phase landed within
 * one display refresh of its requested duration. Fixation, cue, and
 * untimed phases never invalidate a trial.
 */

import { isStimulusPhase } from "./trial.js";
import type { TimingQuality, TrialPresentation } from "./types.js";

export function measureTiming(
  presentation: TrialPresentation,
  refreshMs = 1000 / 60,
): TimingQuality {
  let worst = 0;
  let valid = true;
  const phases = presentation.phases.map((p) => {
    const stimulus = isStimulusPhase(p.phase) && p.requested_ms !== null;
    const error =
      p.requested_ms === null || p.measured_ms === null
        ? null
        : Math.abs(p.measured_ms - p.requested_ms);
    if (stimulus && error !== null) {
      worst = Math.max(worst, error);
      if (error > refreshMs) valid = false;
    }
    return { ...p, error_ms: error, stimulus };
  });
  return {
    valid,
    worst_stimulus_error_ms: worst,
    refresh_ms: refreshMs,
    phases,
  };
}
