import { describe, expect, it } from "vitest";

import { loadGraph, loadMetrics } from "../src/bundle.js";
import { inspectNode, UnknownNodeError, visibleLinks, visibleNodes } from "../src/inspect.js";
import { ALL_GOALS, fsFetcher } from "./helpers.js";

describe("node inspection", () => {
  it("most-connected node shows the metrics-table degree on every goal", async () => {
    const fetcher = fsFetcher();
    const metrics = await loadMetrics(fetcher);
    for (const goal of ALL_GOALS) {
      const graph = await loadGraph(fetcher, goal);
      const row = metrics.rows.find((r) => r.goal === goal)!;
      for (const id of row.most_connected) {
        expect(inspectNode(graph, id).degree).toBe(row.max_degree);
      }
    }
  });

  it("isolated node has an empty incident list", async () => {
    // Goal 7 of the reference set has fewer links than nodes, so some nodes
    // are isolated.
    const graph = await loadGraph(fsFetcher(), 7);
    const linked = new Set(graph.links.flatMap((l) => [l.source, l.target]));
    const isolated = graph.nodes.find((n) => !linked.has(n.id));
    expect(isolated).toBeDefined();
    const info = inspectNode(graph, isolated!.id);
    expect(info.incident).toEqual([]);
    expect(info.degree).toBe(0);
  });

  it("incident links are sorted by target order", async () => {
    const fetcher = fsFetcher();
    const metrics = await loadMetrics(fetcher);
    for (const goal of ALL_GOALS) {
      const graph = await loadGraph(fetcher, goal);
      const hub = metrics.rows.find((r) => r.goal === goal)!.most_connected[0];
      const info = inspectNode(graph, hub);
      const orders = info.incident.map((l) => l.targetOrder);
      expect(orders).toEqual([...orders].sort((a, b) => a - b));
    }
  });

  it("unknown node raises without mutating anything", async () => {
    const graph = await loadGraph(fsFetcher(), 3);
    const before = JSON.stringify(graph);
    expect(() => inspectNode(graph, "No Such Concept")).toThrow(UnknownNodeError);
    expect(JSON.stringify(graph)).toBe(before);
  });
});

describe("presentation filters", () => {
  it("min-degree filter derives a view without mutating the graph", async () => {
    const graph = await loadGraph(fsFetcher(), 3);
    const before = JSON.stringify(graph);
    const nodes = visibleNodes(graph, 2);
    const links = visibleLinks(graph, 2);
    expect(nodes.every((n) => n.degree >= 2)).toBe(true);
    const kept = new Set(nodes.map((n) => n.id));
    expect(links.every((l) => kept.has(l.source) && kept.has(l.target))).toBe(true);
    expect(JSON.stringify(graph)).toBe(before);
  });

  it("zero threshold keeps everything", async () => {
    const graph = await loadGraph(fsFetcher(), 3);
    expect(visibleNodes(graph, 0).length).toBe(graph.nodes.length);
    expect(visibleLinks(graph, 0).length).toBe(graph.links.length);
  });
});
