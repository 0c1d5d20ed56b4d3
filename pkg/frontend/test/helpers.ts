import { readFile } from "node:fs/promises";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { Fetcher } from "../src/bundle.js";

export const BUNDLE_DIR = join(dirname(fileURLToPath(import.meta.url)), "..", "testdata", "bundle");

/** Filesystem-backed fetcher over the checked-in reference bundle. */
export function fsFetcher(base: string = BUNDLE_DIR): Fetcher {
  return async (relPath: string) => JSON.parse(await readFile(join(base, relPath), "utf-8"));
}

export const ALL_GOALS = Array.from({ length: 17 }, (_, i) => i + 1);
