/** Deterministic 64-bit split-mix generator.
 *
 * Every randomized step of the export pipeline (augmentation parameter
 * draws, the stand-in backbone projection) derives from one of these,
 * so a fixed seed reproduces the output byte for byte.
 */

const MASK = (1n << 64n) - 1n;
const GAMMA = 0x9e3779b97f4a7c15n;
const MIX1 = 0xbf58476d1ce4e5b9n;
const MIX2 = 0x94d049bb133111ebn;

export class Rng {
  private state: bigint;

  constructor(seed: number | bigint) {
    this.state = BigInt(seed) & MASK;
  }

  nextU64(): bigint {
    this.state = (this.state + GAMMA) & MASK;
    let z = this.state;
    z = ((z ^ (z >> 30n)) * MIX1) & MASK;
    z = ((z ^ (z >> 27n)) * MIX2) & MASK;
    return z ^ (z >> 31n);
  }

  /** Uniform float in [lo, hi), 53-bit resolution. */
  uniform(lo = 0, hi = 1): number {
    if (hi < lo) throw new RangeError(`empty range [${lo}, ${hi})`);
    const u = Number(this.nextU64() >> 11n) / 2 ** 53;
    return lo + u * (hi - lo);
  }

  /** Standard normal via the Box-Muller transform (two raw draws). */
  normal(mean = 0, std = 1): number {
    // u1 in (0, 1] so log() is safe; u2 in [0, 1)
    const u1 = (Number(this.nextU64() >> 11n) + 1) / 2 ** 53;
    const u2 = this.uniform();
    return mean + std * Math.sqrt(-2 * Math.log(u1)) * Math.cos(2 * Math.PI * u2);
  }

  /** Integer in [0, n) via the multiply-shift reduction. */
  below(n: number): number {
    if (n < 1) throw new RangeError(`below(${n})`);
    return Number((this.nextU64() * BigInt(n)) >> 64n);
  }

  /** Derive an independent stream for a labeled sub-task. */
  fork(label: string): Rng {
    let h = this.state;
    for (const ch of Buffer.from(label, "utf-8")) {
      h = ((h ^ BigInt(ch)) * MIX1) & MASK;
    }
    return new Rng(h ^ this.nextU64());
  }
}
