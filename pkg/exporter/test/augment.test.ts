import { describe, expect, it } from "vitest";
import {
  applyOps,
  brightnessContrast,
  horizontalFlip,
  hueSaturationValue,
  posterize,
  recipeSchema,
} from "../src/augment.js";
import { getPixel } from "../src/image.js";
import { Rng } from "../src/random.js";
import { syntheticImage } from "./helpers.js";

describe("horizontalFlip", () => {
  it("mirrors pixels and is an involution", () => {
    const img = syntheticImage(11, 6, 1);
    const flipped = horizontalFlip(img);
    expect(getPixel(flipped, 0, 2)).toEqual(getPixel(img, 10, 2));
    const twice = horizontalFlip(flipped);
    expect(Buffer.from(twice.data).equals(Buffer.from(img.data))).toBe(true);
  });
});

describe("brightnessContrast", () => {
  it("zero shift is the identity", () => {
    const img = syntheticImage(8, 8, 2);
    const out = brightnessContrast(img, 0, 0);
    expect(Buffer.from(out.data).equals(Buffer.from(img.data))).toBe(true);
  });

  it("positive brightness never darkens and stays in range", () => {
    const img = syntheticImage(8, 8, 3);
    const out = brightnessContrast(img, 0.3, 0);
    for (let i = 0; i < img.data.length; i++) {
      expect(out.data[i]).toBeGreaterThanOrEqual(img.data[i]);
      expect(out.data[i]).toBeLessThanOrEqual(255);
    }
  });
});

describe("posterize", () => {
  it("keeps only the top bits", () => {
    const img = syntheticImage(8, 8, 4);
    const out = posterize(img, 3);
    for (let i = 0; i < out.data.length; i++) {
      expect(out.data[i] & 0b00011111).toBe(0);
      expect(out.data[i]).toBe(img.data[i] & 0b11100000);
    }
  });

  it("8 bits is the identity; bad levels rejected", () => {
    const img = syntheticImage(4, 4, 5);
    expect(Buffer.from(posterize(img, 8).data).equals(Buffer.from(img.data))).toBe(true);
    expect(() => posterize(img, 0)).toThrow(/bits/);
    expect(() => posterize(img, 9)).toThrow(/bits/);
  });
});

describe("hueSaturationValue", () => {
  it("zero shifts are the identity within rounding", () => {
    const img = syntheticImage(8, 8, 6);
    const out = hueSaturationValue(img, 0, 0, 0);
    for (let i = 0; i < img.data.length; i++) {
      expect(Math.abs(out.data[i] - img.data[i])).toBeLessThanOrEqual(1);
    }
  });

  it("a 360-degree hue shift is the identity within rounding", () => {
    const img = syntheticImage(8, 8, 7);
    const out = hueSaturationValue(img, 360, 0, 0);
    for (let i = 0; i < img.data.length; i++) {
      expect(Math.abs(out.data[i] - img.data[i])).toBeLessThanOrEqual(1);
    }
  });

  it("grays stay gray under hue shifts", () => {
    const img = syntheticImage(4, 4, 8);
    img.data.fill(90);
    const out = hueSaturationValue(img, 137, 0, 0);
    expect(out.data.every((v) => v === 90)).toBe(true);
  });
});

describe("applyOps", () => {
  const ops = recipeSchema.parse({
    variants: [
      {
        id: "v",
        ops: [
          { op: "HorizontalFlip" },
          { op: "RandomBrightnessContrast", brightnessLimit: 0.2, contrastLimit: 0.2 },
          { op: "Posterize", bits: 5 },
          { op: "HueSaturationValue" },
        ],
      },
    ],
  }).variants[0].ops;

  it("is deterministic for a fixed stream", () => {
    const img = syntheticImage(16, 16, 9);
    const a = applyOps(img, ops, new Rng(7).fork("x"));
    const b = applyOps(img, ops, new Rng(7).fork("x"));
    expect(Buffer.from(a.data).equals(Buffer.from(b.data))).toBe(true);
  });

  it("different streams draw different parameters", () => {
    const img = syntheticImage(16, 16, 9);
    const a = applyOps(img, ops, new Rng(7).fork("x"));
    const b = applyOps(img, ops, new Rng(8).fork("x"));
    expect(Buffer.from(a.data).equals(Buffer.from(b.data))).toBe(false);
  });
});

describe("recipeSchema", () => {
  it("rejects unknown ops and empty variant lists", () => {
    expect(recipeSchema.safeParse({ variants: [] }).success).toBe(false);
    expect(
      recipeSchema.safeParse({
        variants: [{ id: "v", ops: [{ op: "Cutout" }] }],
      }).success,
    ).toBe(false);
  });
});
