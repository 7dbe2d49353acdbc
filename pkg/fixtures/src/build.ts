/* Build the fixture shared library from C source. */

import { spawnSync } from "node:child_process";
import { existsSync, mkdirSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

// works from both src/ (vitest) and dist/ (node)
const here = dirname(fileURLToPath(import.meta.url));
export const packageRoot = join(here, "..");
export const sourceFile = join(packageRoot, "src", "dc64fixtures.c");
export const buildDir = join(packageRoot, "build");
export const libraryPath = join(buildDir, "dc64fixtures.so");

export const EXPECTED_EXPORTS = [
  "BENCHMARK",
  "fill_seq",
  "get64_c",
  "get_c",
  "get_f_",
  "mutate_all",
].sort();

export function buildFixtureLibrary(force = false): string {
  if (!force && existsSync(libraryPath)) {
    return libraryPath;
  }
  mkdirSync(buildDir, { recursive: true });
  const cc = process.env.CC ?? "cc";
  const result = spawnSync(
    cc,
    ["-shared", "-fPIC", "-O2", "-o", libraryPath, sourceFile],
    { encoding: "utf8" },
  );
  if (result.error) {
    throw new Error(`cannot run ${cc}: ${result.error.message}`);
  }
  if (result.status !== 0) {
    throw new Error(`${cc} failed (${result.status}):\n${result.stderr}`);
  }
  return libraryPath;
}

if (process.argv[1] && process.argv[1].endsWith("build.js")) {
  const path = buildFixtureLibrary(true);
  console.log(`built ${path}`);
}
