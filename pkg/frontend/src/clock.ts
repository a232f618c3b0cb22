/** Frame clock abstraction: real displays use requestAnimationFrame,
 * tests drive a synthetic one deterministically. */

export interface FrameClock {
  /** Resolve at the next display refresh with its timestamp in ms. */
  nextFrame(): Promise<number>;
}

export class RafClock implements FrameClock {
  nextFrame(): Promise<number> {
    return new Promise((resolve) => requestAnimationFrame((t) => resolve(t)));
  }
}

/** Scripted clock: frames tick at a nominal interval plus optional jitter.
 * Used by tests and the synthetic timing-quality session. */
export class TestClock implements FrameClock {
  private t = 0;
  constructor(
    private readonly intervalMs = 1000 / 60,
    private readonly jitter: (frameIndex: number) => number = () => 0,
  ) {}

  private frame = 0;

  async nextFrame(): Promise<number> {
    this.t += this.intervalMs + this.jitter(this.frame++);
    return this.t;
  }

  get now(): number {
    return this.t;
  }
}

/** Median frame interval from consecutive timestamps; 60 Hz fallback. */
export function estimateRefresh(timestamps: number[]): number {
  if (timestamps.length < 2) return 1000 / 60;
  const deltas = [];
  for (let i = 1; i < timestamps.length; i++) {
    deltas.push(timestamps[i] - timestamps[i - 1]);
  }
  deltas.sort((a, b) => a - b);
  return deltas[Math.floor(deltas.length / 2)];
}
