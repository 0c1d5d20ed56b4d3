import { createHash } from "node:crypto";
import { readFile } from "node:fs/promises";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import {
  loadGoals,
  loadGraph,
  loadManifest,
  loadMatrix,
  loadNewGoals,
  SchemaError,
  validateGraphDoc,
} from "../src/bundle.js";
import { ALL_GOALS, BUNDLE_DIR, fsFetcher } from "./helpers.js";

describe("bundle loading", () => {
  it("manifest checksums match the shipped files", async () => {
    const manifest = await loadManifest(fsFetcher());
    for (const [rel, digest] of Object.entries(manifest.files)) {
      const bytes = await readFile(join(BUNDLE_DIR, rel));
      expect(createHash("sha256").update(bytes).digest("hex")).toBe(digest);
    }
  });

  it("all 17 graphs validate", async () => {
    const fetcher = fsFetcher();
    for (const goal of ALL_GOALS) {
      const graph = await loadGraph(fetcher, goal);
      expect(graph.goal).toBe(goal);
      expect(graph.nodes.length).toBeGreaterThan(0);
    }
  });

  it("goals catalog lists 17 entries", async () => {
    const goals = await loadGoals(fsFetcher());
    expect(goals.length).toBe(17);
    expect(goals[0].title).toBe("No Poverty");
  });

  it("matrix is 17x17 and symmetric", async () => {
    const matrix = await loadMatrix(fsFetcher());
    expect(matrix.cells.length).toBe(17);
    for (let i = 0; i < 17; i++) {
      for (let j = 0; j < 17; j++) {
        expect(matrix.cells[i][j]).toBe(matrix.cells[j][i]);
      }
    }
  });

  it("new-goals rows carry the five table columns", async () => {
    const doc = await loadNewGoals(fsFetcher());
    expect(doc.rows.length).toBeGreaterThan(0);
    for (const row of doc.rows) {
      expect(row.goal).toMatch(/^Goal \d+: /);
      expect(row.sub_goals.length).toBeGreaterThan(0);
      expect(row.sub_goals[0].indicators.length).toBeGreaterThan(0);
      expect(row.source_label).toContain("Goal");
      expect(typeof row.description).toBe("string");
    }
  });

  it("rejects documents with dangling link endpoints", () => {
    expect(() => validateGraphDoc({
      goal: 1,
      dataset: "x",
      nodes: [{ id: "A", order: 1, details: "", degree: 0, color_bin: 0 }],
      links: [{ source: "A", target: "GHOST", relation: "r" }],
    })).toThrow(SchemaError);
  });

  it("rejects duplicate node orders", () => {
    expect(() => validateGraphDoc({
      goal: 1,
      dataset: "x",
      nodes: [
        { id: "A", order: 1, details: "", degree: 0, color_bin: 0 },
        { id: "B", order: 1, details: "", degree: 0, color_bin: 0 },
      ],
      links: [],
    })).toThrow(SchemaError);
  });
});
