#!/usr/bin/env node
/** Command-line surface:
 *
 *   selinet-export export --annotations jobs.json --images dir --out dir
 *                         [--augment recipe.json] [--seed N]
 *
 * Exit code 0 when every job exported; 1 when any job was skipped or
 * the inputs were invalid.
 */

import { promises as fs } from "node:fs";
import { parseArgs } from "node:util";
import { recipeSchema } from "./augment.js";
import { runExport } from "./export.js";
import { loadJobs } from "./jobs.js";

const USAGE =
  "usage: selinet-export export --annotations jobs.json --images dir --out dir" +
  " [--augment recipe.json] [--seed N]";

export async function main(argv: string[]): Promise<number> {
  const [command, ...rest] = argv;
  if (command !== "export") {
    throw new Error(`unknown command ${command ?? "(none)"}\n${USAGE}`);
  }
  const { values } = parseArgs({
    args: rest,
    options: {
      annotations: { type: "string" },
      images: { type: "string" },
      out: { type: "string" },
      augment: { type: "string" },
      seed: { type: "string", default: "0" },
    },
    allowPositionals: false,
  });
  for (const required of ["annotations", "images", "out"] as const) {
    if (values[required] === undefined) {
      throw new Error(`missing --${required}\n${USAGE}`);
    }
  }
  const seed = Number(values.seed);
  if (!Number.isSafeInteger(seed) || seed < 0) {
    throw new Error(`--seed must be a non-negative integer, got ${values.seed}`);
  }

  const jobs = await loadJobs(values.annotations!);
  let recipe;
  if (values.augment !== undefined) {
    const parsed = recipeSchema.safeParse(
      JSON.parse(await fs.readFile(values.augment, "utf-8")),
    );
    if (!parsed.success) {
      throw new Error(`${values.augment}: ${parsed.error.issues[0].message}`);
    }
    recipe = parsed.data;
  }
  const result = await runExport(jobs, {
    imagesDir: values.images!,
    outDir: values.out!,
    seed,
    recipe,
    log: (line) => console.error(line),
  });
  console.log(
    `exported ${result.written} feature files to ${result.annotationsPath}`,
  );
  return result.skipped.length > 0 ? 1 : 0;
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("cli.js") || entry.endsWith("cli.ts")) {
  main(process.argv.slice(2))
    .then((code) => process.exit(code))
    .catch((err) => {
      console.error(`error: ${err instanceof Error ? err.message : err}`);
      process.exit(1);
    });
}
