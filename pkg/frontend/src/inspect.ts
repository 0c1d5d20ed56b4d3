// Node inspection and presentation-side filtering. Everything here is pure:
// filters derive views and never mutate the loaded bundle documents.

import type { BundleNode, GraphDoc } from "./types.js";

export class UnknownNodeError extends Error {
  constructor(id: string) {
    super(`node ${id} is not in the loaded graph`);
    this.name = "UnknownNodeError";
  }
}

export interface IncidentLink {
  direction: "out" | "in";
  other: string;
  relation: string;
  targetOrder: number;
}

export interface NodeDetail {
  id: string;
  details: string;
  degree: number;
  colorBin: number;
  order: number;
  incident: IncidentLink[];
}

export function inspectNode(graph: GraphDoc, id: string): NodeDetail {
  const node = graph.nodes.find((n) => n.id === id);
  if (!node) throw new UnknownNodeError(id);
  const orderOf = new Map(graph.nodes.map((n) => [n.id, n.order]));
  const incident: IncidentLink[] = [];
  for (const link of graph.links) {
    if (link.source !== id && link.target !== id) continue;
    incident.push({
      direction: link.source === id ? "out" : "in",
      other: link.source === id ? link.target : link.source,
      relation: link.relation,
      targetOrder: orderOf.get(link.target) ?? 0,
    });
  }
  incident.sort((a, b) => a.targetOrder - b.targetOrder || a.other.localeCompare(b.other));
  return {
    id: node.id,
    details: node.details,
    degree: node.degree,
    colorBin: node.color_bin,
    order: node.order,
    incident,
  };
}

export function visibleNodes(graph: GraphDoc, minDegree: number): BundleNode[] {
  return graph.nodes.filter((n) => n.degree >= minDegree);
}

export function visibleLinks(graph: GraphDoc, minDegree: number) {
  const keep = new Set(visibleNodes(graph, minDegree).map((n) => n.id));
  return graph.links.filter((l) => keep.has(l.source) && keep.has(l.target));
}
