/** The export pipeline: per job, crop the person box, resize (whole
 * image 224x224 for the aesthetic branch, body crop 128x128), apply
 * each augmentation variant, run both backbones, and emit one SLNF
 * feature file per (job x variant) plus a JSONL annotation file the
 * training pipeline loads directly.
 *
 * Jobs are independent: a bad image or out-of-bounds box is logged,
 * the job is skipped, and the run reports the skip count so the caller
 * can exit nonzero.
 */

import { promises as fs } from "node:fs";
import * as path from "node:path";
import { IDENTITY_RECIPE, Recipe, applyOps } from "./augment.js";
import { Backbone, AES_INPUT, BODY_INPUT, defaultBackbones } from "./backbone.js";
import { crop, decodeImage, resizeBilinear } from "./image.js";
import { ExportJob } from "./jobs.js";
import { Rng } from "./random.js";
import { writeSlnf } from "./slnf.js";

export interface ExportOptions {
  imagesDir: string;
  outDir: string;
  seed?: number;
  recipe?: Recipe;
  backbones?: { body: Backbone; aesthetic: Backbone };
  log?: (line: string) => void;
}

export interface ExportResult {
  written: number;
  skipped: { id: string; reason: string }[];
  annotationsPath: string;
}

function sanitize(id: string): string {
  return id.replace(/[^A-Za-z0-9_.-]/g, "_");
}

export async function runExport(
  jobs: ExportJob[],
  opts: ExportOptions,
): Promise<ExportResult> {
  const seed = opts.seed ?? 0;
  const recipe = opts.recipe ?? IDENTITY_RECIPE;
  const backbones = opts.backbones ?? defaultBackbones(seed);
  const log = opts.log ?? (() => {});
  await fs.mkdir(opts.outDir, { recursive: true });

  const lines: string[] = [];
  const skipped: ExportResult["skipped"] = [];
  let written = 0;

  for (const job of jobs) {
    try {
      const raw = await fs.readFile(path.join(opts.imagesDir, job.image));
      const img = decodeImage(raw, job.image);
      const [x, y, w, h] = job.box;
      const body = crop(img, { x, y, w, h });
      for (const variant of recipe.variants) {
        // one independent, reproducible stream per (job, variant)
        const rng = new Rng(seed).fork(`augment:${job.id}:${variant.id}`);
        const wholeAug = applyOps(img, variant.ops, rng);
        const bodyRng = new Rng(seed).fork(`augment:${job.id}:${variant.id}`);
        const bodyAug = applyOps(body, variant.ops, bodyRng);

        const bodyMap = backbones.body.features(
          resizeBilinear(bodyAug, BODY_INPUT, BODY_INPUT),
        );
        const aesMap = backbones.aesthetic.features(
          resizeBilinear(wholeAug, AES_INPUT, AES_INPUT),
        );
        const g = backbones.body.grid;
        const fname = `${sanitize(job.id)}__${sanitize(variant.id)}.slnf`;
        await writeSlnf(path.join(opts.outDir, fname), [
          { name: "body", dims: [backbones.body.channels, g, g], data: bodyMap },
          { name: "aesthetic", dims: [backbones.aesthetic.channels, g, g], data: aesMap },
        ]);
        lines.push(
          JSON.stringify({
            emotions: job.emotions,
            features: fname,
            id: `${job.id}__${variant.id}`,
            split: job.split,
          }),
        );
        written++;
      }
    } catch (err) {
      const reason = err instanceof Error ? err.message : String(err);
      log(`skip ${job.id}: ${reason}`);
      skipped.push({ id: job.id, reason });
    }
  }

  const annotationsPath = path.join(opts.outDir, "annotations.jsonl");
  const tmp = annotationsPath + ".tmp";
  await fs.writeFile(tmp, lines.join("\n") + "\n");
  await fs.rename(tmp, annotationsPath);
  log(`wrote ${written} feature files, skipped ${skipped.length} jobs`);
  return { written, skipped, annotationsPath };
}
