import { describe, expect, it } from "vitest";
import { SeededProjectionBackbone, defaultBackbones } from "../src/backbone.js";
import { horizontalFlip } from "../src/augment.js";
import { syntheticImage } from "./helpers.js";

describe("SeededProjectionBackbone", () => {
  it("emits the contract shapes", () => {
    const { body, aesthetic } = defaultBackbones(0);
    const bmap = body.features(syntheticImage(128, 128, 1));
    const amap = aesthetic.features(syntheticImage(224, 224, 1));
    expect(bmap.length).toBe(960 * 7 * 7);
    expect(amap.length).toBe(1280 * 7 * 7);
    expect(bmap.every(Number.isFinite)).toBe(true);
  });

  it("is deterministic in (seed, image) and distinct across seeds", () => {
    const img = syntheticImage(128, 128, 2);
    const a = defaultBackbones(5).body.features(img);
    const b = defaultBackbones(5).body.features(img);
    const c = defaultBackbones(6).body.features(img);
    expect(a).toEqual(b);
    expect(a).not.toEqual(c);
  });

  it("rejects wrong input sizes", () => {
    const { body } = defaultBackbones(0);
    expect(() => body.features(syntheticImage(64, 64, 1))).toThrow(/128x128/);
  });

  it("mirrors the feature grid when the input is flipped", () => {
    // the grid partition is symmetric, so flipping the image permutes
    // grid columns; channel values per cell are unchanged
    const bb = new SeededProjectionBackbone("body", 32, 128, 3);
    const img = syntheticImage(128, 128, 4);
    const orig = bb.features(img);
    const flip = bb.features(horizontalFlip(img));
    const g = bb.grid;
    for (let c = 0; c < bb.channels; c++) {
      for (let gy = 0; gy < g; gy++) {
        for (let gx = 0; gx < g; gx++) {
          const a = orig[c * g * g + gy * g + gx];
          const b = flip[c * g * g + gy * g + (g - 1 - gx)];
          expect(Math.abs(a - b)).toBeLessThanOrEqual(1e-6);
        }
      }
    }
  });

  it("responds to image content", () => {
    const bb = defaultBackbones(0).body;
    const a = bb.features(syntheticImage(128, 128, 1));
    const b = bb.features(syntheticImage(128, 128, 2));
    expect(a).not.toEqual(b);
  });
});
