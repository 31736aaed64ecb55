/** Export-time photometric/geometric augmentations.
 *
 * Four operations are supported: HorizontalFlip,
 * RandomBrightnessContrast, Posterize and HueSaturationValue.  Random
 * parameters are drawn once per (job, variant) from the run seed, so a
 * recipe is reproducible end to end.
 */

import { z } from "zod";
import { Image, getPixel, makeImage, setPixel } from "./image.js";
import { Rng } from "./random.js";

export const opSchema = z.discriminatedUnion("op", [
  z.object({ op: z.literal("HorizontalFlip") }).strict(),
  z
    .object({
      op: z.literal("RandomBrightnessContrast"),
      brightnessLimit: z.number().min(0).max(1).default(0.2),
      contrastLimit: z.number().min(0).max(1).default(0.2),
    })
    .strict(),
  z
    .object({
      op: z.literal("Posterize"),
      bits: z.number().int().min(1).max(8).default(4),
    })
    .strict(),
  z
    .object({
      op: z.literal("HueSaturationValue"),
      hueShiftLimit: z.number().min(0).max(180).default(20),
      satShiftLimit: z.number().min(0).max(255).default(30),
      valShiftLimit: z.number().min(0).max(255).default(20),
    })
    .strict(),
]);

export const recipeSchema = z
  .object({
    variants: z
      .array(
        z
          .object({
            id: z.string().min(1),
            ops: z.array(opSchema),
          })
          .strict(),
      )
      .min(1),
  })
  .strict();

export type AugmentOp = z.infer<typeof opSchema>;
export type Recipe = z.infer<typeof recipeSchema>;

/** The recipe used when no --augment file is given: originals only. */
export const IDENTITY_RECIPE: Recipe = { variants: [{ id: "orig", ops: [] }] };

const clamp8 = (v: number) => Math.max(0, Math.min(255, Math.round(v)));

export function horizontalFlip(img: Image): Image {
  const out = makeImage(img.width, img.height);
  for (let y = 0; y < img.height; y++) {
    for (let x = 0; x < img.width; x++) {
      setPixel(out, img.width - 1 - x, y, getPixel(img, x, y));
    }
  }
  return out;
}

export function brightnessContrast(img: Image, brightness: number, contrast: number): Image {
  // brightness/contrast as fractional shifts around mid-gray
  const out = makeImage(img.width, img.height);
  const gain = 1 + contrast;
  const shift = 255 * brightness;
  for (let i = 0; i < img.data.length; i++) {
    out.data[i] = clamp8((img.data[i] - 127.5) * gain + 127.5 + shift);
  }
  return out;
}

export function posterize(img: Image, bits: number): Image {
  if (!Number.isInteger(bits) || bits < 1 || bits > 8) {
    throw new RangeError(`posterize bits must be 1..8, got ${bits}`);
  }
  const mask = 0xff & (0xff << (8 - bits));
  const out = makeImage(img.width, img.height);
  for (let i = 0; i < img.data.length; i++) out.data[i] = img.data[i] & mask;
  return out;
}

function rgbToHsv(r: number, g: number, b: number): [number, number, number] {
  const max = Math.max(r, g, b);
  const min = Math.min(r, g, b);
  const d = max - min;
  let h = 0;
  if (d > 0) {
    if (max === r) h = 60 * (((g - b) / d) % 6);
    else if (max === g) h = 60 * ((b - r) / d + 2);
    else h = 60 * ((r - g) / d + 4);
  }
  if (h < 0) h += 360;
  return [h, max === 0 ? 0 : d / max, max];
}

function hsvToRgb(h: number, s: number, v: number): [number, number, number] {
  const c = v * s;
  const x = c * (1 - Math.abs(((h / 60) % 2) - 1));
  const m = v - c;
  let rgb: [number, number, number];
  if (h < 60) rgb = [c, x, 0];
  else if (h < 120) rgb = [x, c, 0];
  else if (h < 180) rgb = [0, c, x];
  else if (h < 240) rgb = [0, x, c];
  else if (h < 300) rgb = [x, 0, c];
  else rgb = [c, 0, x];
  return [rgb[0] + m, rgb[1] + m, rgb[2] + m];
}

export function hueSaturationValue(
  img: Image,
  hueShift: number,
  satShift: number,
  valShift: number,
): Image {
  const out = makeImage(img.width, img.height);
  for (let y = 0; y < img.height; y++) {
    for (let x = 0; x < img.width; x++) {
      const [r, g, b] = getPixel(img, x, y);
      let [h, s, v] = rgbToHsv(r, g, b);
      h = (((h + hueShift) % 360) + 360) % 360;
      s = Math.max(0, Math.min(1, s + satShift / 255));
      v = Math.max(0, Math.min(255, v + valShift));
      const [nr, ng, nb] = hsvToRgb(h, s, v);
      setPixel(out, x, y, [clamp8(nr), clamp8(ng), clamp8(nb)]);
    }
  }
  return out;
}

/** Apply one variant's op list; random parameters come from `rng`. */
export function applyOps(img: Image, ops: AugmentOp[], rng: Rng): Image {
  let out = img;
  for (const op of ops) {
    switch (op.op) {
      case "HorizontalFlip":
        out = horizontalFlip(out);
        break;
      case "RandomBrightnessContrast":
        out = brightnessContrast(
          out,
          rng.uniform(-op.brightnessLimit, op.brightnessLimit),
          rng.uniform(-op.contrastLimit, op.contrastLimit),
        );
        break;
      case "Posterize":
        out = posterize(out, op.bits);
        break;
      case "HueSaturationValue":
        out = hueSaturationValue(
          out,
          rng.uniform(-op.hueShiftLimit, op.hueShiftLimit),
          rng.uniform(-op.satShiftLimit, op.satShiftLimit),
          rng.uniform(-op.valShiftLimit, op.valShiftLimit),
        );
        break;
    }
  }
  return out;
}
