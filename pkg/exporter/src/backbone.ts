/** Feature backbones: anything that turns an RGB image into a CxHxW
 * float map with the contract shapes (body 960x7x7 from a 128x128 crop,
 * aesthetic 1280x7x7 from the 224x224 whole image).
 *
 * The default implementation is a deterministic seeded-projection
 * stand-in, NOT a pretrained network: it pools per-cell color/texture
 * statistics over a 7x7 grid and projects them through a fixed random
 * basis.  It preserves the properties downstream code depends on
 * (shape contract, determinism, spatial locality: a horizontal flip of
 * the input mirrors the feature grid) and is pluggable, so a real
 * pretrained backbone can be dropped in where weights are available.
 */

import { Image } from "./image.js";
import { Rng } from "./random.js";

export interface Backbone {
  readonly name: string;
  readonly channels: number;
  readonly grid: number;
  readonly inputSize: number;
  /** CxHxW feature map, row-major, from an inputSize x inputSize image. */
  features(img: Image): Float32Array;
}

const STAT_DIM = 8; // per-cell statistics vector length

/** Grid-cell boundary i of `size` pixels split into `grid` cells. */
function boundary(i: number, size: number, grid: number): number {
  return Math.round((i * size) / grid);
}

function cellStats(img: Image, x0: number, x1: number, y0: number, y1: number): number[] {
  let n = 0;
  const mean = [0, 0, 0];
  const sq = [0, 0, 0];
  for (let y = y0; y < y1; y++) {
    for (let x = x0; x < x1; x++) {
      const i = (y * img.width + x) * 3;
      for (let c = 0; c < 3; c++) {
        const v = img.data[i + c] / 255;
        mean[c] += v;
        sq[c] += v * v;
      }
      n++;
    }
  }
  const out = new Array<number>(STAT_DIM);
  for (let c = 0; c < 3; c++) {
    const m = mean[c] / n;
    out[c] = m;
    out[3 + c] = Math.sqrt(Math.max(0, sq[c] / n - m * m));
  }
  const lum = (out[0] + out[1] + out[2]) / 3;
  out[6] = lum;
  out[7] = 1; // bias term
  return out;
}

export class SeededProjectionBackbone implements Backbone {
  readonly grid = 7;
  private readonly weights: Float32Array; // channels x STAT_DIM

  constructor(
    readonly name: string,
    readonly channels: number,
    readonly inputSize: number,
    seed: number,
  ) {
    const rng = new Rng(seed).fork(`backbone:${name}:${channels}`);
    this.weights = new Float32Array(channels * STAT_DIM);
    for (let i = 0; i < this.weights.length; i++) {
      this.weights[i] = rng.normal(0, 1);
    }
  }

  features(img: Image): Float32Array {
    if (img.width !== this.inputSize || img.height !== this.inputSize) {
      throw new Error(
        `${this.name}: expected ${this.inputSize}x${this.inputSize} input, ` +
          `got ${img.width}x${img.height}`,
      );
    }
    const g = this.grid;
    const out = new Float32Array(this.channels * g * g);
    for (let gy = 0; gy < g; gy++) {
      const y0 = boundary(gy, this.inputSize, g);
      const y1 = boundary(gy + 1, this.inputSize, g);
      for (let gx = 0; gx < g; gx++) {
        const x0 = boundary(gx, this.inputSize, g);
        const x1 = boundary(gx + 1, this.inputSize, g);
        const s = cellStats(img, x0, x1, y0, y1);
        const loc = gy * g + gx;
        for (let c = 0; c < this.channels; c++) {
          let acc = 0;
          for (let k = 0; k < STAT_DIM; k++) acc += this.weights[c * STAT_DIM + k] * s[k];
          out[c * g * g + loc] = Math.tanh(acc);
        }
      }
    }
    return out;
  }
}

export const BODY_INPUT = 128;
export const AES_INPUT = 224;
export const BODY_CHANNELS = 960;
export const AES_CHANNELS = 1280;

export function defaultBackbones(seed: number): { body: Backbone; aesthetic: Backbone } {
  return {
    body: new SeededProjectionBackbone("body", BODY_CHANNELS, BODY_INPUT, seed),
    aesthetic: new SeededProjectionBackbone("aesthetic", AES_CHANNELS, AES_INPUT, seed),
  };
}
