import { TestClock } from "../src/clock.js";
import type { Display, TrialDeps, Visual } from "../src/trial.js";
import type { TimingEntry, TrialPayload } from "../src/types.js";

export class RecordingDisplay implements Display {
  shown: Array<{ kind: string; role?: string }> = [];

  show(visual: Visual): void {
    this.shown.push({
      kind: visual.kind,
      role: visual.kind === "asset" ? visual.role : undefined,
    });
  }

  get sequence(): string[] {
    return this.shown.map((s) => s.role ?? s.kind);
  }
}

export function makeTrial(
  timing: TimingEntry[],
  roles: string[] = ["image"],
  id = "t1",
): TrialPayload {
  return {
    trial_id: id,
    experiment: "A1_full",
    target: {
      image_id: "im1",
      bbox: [10, 10, 16, 16],
      image_size: [64, 64],
      category: "alpha",
      size_bin: "S1",
      extent: 16,
    },
    timing,
    assets: Object.fromEntries(roles.map((r) => [r, `/assets/${r}.png`])),
  };
}

export function standardTiming(exposureMs: number): TimingEntry[] {
  return [
    { phase: "fixation", ms: 500 },
    { phase: "cue", ms: 1000 },
    { phase: "image", ms: exposureMs },
  ];
}

export function depsWith(
  clock: TestClock,
  display: RecordingDisplay,
  answer = "alpha",
): TrialDeps & { preloaded: string[][] } {
  const preloaded: string[][] = [];
  return {
    clock,
    display,
    preloaded,
    preload: async (urls: string[]) => {
      preloaded.push(urls);
    },
    getAnswer: async () => answer,
  };
}

/** Deterministic pseudo-random jitter in ms, optionally with dropped
 * frames (a drop extends one interval by a whole refresh). */
export function jitterFn(
  seed: number,
  amplitudeMs: number,
  dropEvery = 0,
): (frame: number) => number {
  let state = seed >>> 0 || 1;
  return (frame: number) => {
    state = (state * 1664525 + 1013904223) >>> 0;
    const uniform = state / 2 ** 32 - 0.5;
    let jitter = uniform * 2 * amplitudeMs;
    if (dropEvery > 0 && frame > 0 && frame % dropEvery === 0) {
      jitter += 1000 / 60; // dropped frame
    }
    return jitter;
  };
}
