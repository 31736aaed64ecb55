/** Export job descriptions and the annotation source format.
 *
 * The source file is JSON: an array of jobs, each naming an image, a
 * person bounding box in pixel coordinates, a nonempty emotion label
 * list from the 26-category schema, and a dataset split.  This mirrors
 * how EMOTIC-style annotations are distributed (one person box + label
 * set per record) and converts 1:1 into the training pipeline's JSONL.
 */

import { promises as fs } from "node:fs";
import { z } from "zod";

/** The 26-category emotion schema of the training pipeline's JSONL
 * interface (alphabetical EMOTIC category names). */
export const EMOTIONS = [
  "Affection",
  "Anger",
  "Annoyance",
  "Anticipation",
  "Aversion",
  "Confidence",
  "Disapproval",
  "Disconnection",
  "Disquietment",
  "Doubt/Confusion",
  "Embarrassment",
  "Engagement",
  "Esteem",
  "Excitement",
  "Fatigue",
  "Fear",
  "Happiness",
  "Pain",
  "Peace",
  "Pleasure",
  "Sadness",
  "Sensitivity",
  "Suffering",
  "Surprise",
  "Sympathy",
  "Yearning",
] as const;

export const SPLITS = ["train", "val", "test"] as const;

export const jobSchema = z
  .object({
    id: z.string().min(1),
    image: z.string().min(1),
    box: z.tuple([
      z.number().int().min(0),
      z.number().int().min(0),
      z.number().int().min(1),
      z.number().int().min(1),
    ]),
    emotions: z.array(z.enum(EMOTIONS)).min(1),
    split: z.enum(SPLITS),
  })
  .strict();

export type ExportJob = z.infer<typeof jobSchema>;

export async function loadJobs(path: string): Promise<ExportJob[]> {
  const parsed = z.array(jobSchema).min(1).safeParse(
    JSON.parse(await fs.readFile(path, "utf-8")),
  );
  if (!parsed.success) {
    throw new Error(`${path}: ${parsed.error.issues[0].message} at ${parsed.error.issues[0].path.join(".")}`);
  }
  const seen = new Set<string>();
  for (const job of parsed.data) {
    if (seen.has(job.id)) throw new Error(`${path}: duplicate job id ${job.id}`);
    seen.add(job.id);
  }
  return parsed.data;
}
