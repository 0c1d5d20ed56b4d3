import { describe, expect, it } from "vitest";

import { loadGraph, loadManifest } from "../src/bundle.js";
import { binColor, colorBin, degreeBounds, nodeFill } from "../src/color.js";
import { ALL_GOALS, fsFetcher } from "./helpers.js";

describe("color binning", () => {
  it("matches the exporter's color_bin on every node of every reference graph", async () => {
    const fetcher = fsFetcher();
    const manifest = await loadManifest(fetcher);
    for (const goal of ALL_GOALS) {
      const graph = await loadGraph(fetcher, goal);
      const [minDeg, maxDeg] = degreeBounds(graph.nodes.map((n) => n.degree));
      for (const node of graph.nodes) {
        expect(colorBin(node.degree, minDeg, maxDeg, manifest.palette_size)).toBe(node.color_bin);
      }
    }
  });

  it("uniform degree collapses to a single bin", () => {
    expect(colorBin(5, 5, 5, 8)).toBe(0);
    expect(colorBin(5, 5, 5, 16)).toBe(0);
  });

  it("maximum degree gets the lightest color, minimum the darkest", () => {
    const palette = 8;
    const light = nodeFill(9, 1, 9, palette);
    const dark = nodeFill(1, 1, 9, palette);
    const channel = (c: string) => Number(c.match(/rgb\((\d+)/)![1]);
    expect(channel(light)).toBeGreaterThan(channel(dark));
    expect(dark).toBe(binColor(0, palette));
  });

  it("bins never exceed palette_size - 1", () => {
    for (let degree = 0; degree <= 30; degree++) {
      const bin = colorBin(degree, 0, 30, 8);
      expect(bin).toBeGreaterThanOrEqual(0);
      expect(bin).toBeLessThanOrEqual(7);
    }
  });
});
