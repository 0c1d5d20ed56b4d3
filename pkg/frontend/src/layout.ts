// Spiral layout: radius grows strictly with node order (Archimedean
// r = a + b * order, fixed angular step), so every node gets a distinct
// position and earlier concepts sit nearer the center. Constants are part
// of the bundle schema doc for reproducible screenshots.

import { SchemaError } from "./bundle.js";
import type { GraphDoc, Point } from "./types.js";

export const SPIRAL_A = 40;
export const SPIRAL_B = 22;
export const ANGLE_STEP = 0.55; // radians per order step
export const START_ANGLE = -Math.PI / 2;

export function spiralPosition(order: number): Point {
  const r = SPIRAL_A + SPIRAL_B * order;
  const angle = START_ANGLE + ANGLE_STEP * (order - 1);
  return { x: r * Math.cos(angle), y: r * Math.sin(angle) };
}

export function layoutSpiral(graph: GraphDoc): Map<string, Point> {
  const seen = new Set<number>();
  for (const node of graph.nodes) {
    if (node.order < 1 || seen.has(node.order)) {
      throw new SchemaError("graph.nodes", `bad order ${node.order} for ${node.id}`);
    }
    seen.add(node.order);
  }
  const positions = new Map<string, Point>();
  for (const node of graph.nodes) {
    positions.set(node.id, spiralPosition(node.order));
  }
  return positions;
}

export function radius(p: Point): number {
  return Math.hypot(p.x, p.y);
}

/** Bounding box of a layout plus margin, for the SVG viewBox. */
export function viewBox(positions: Map<string, Point>, margin = 60): [number, number, number, number] {
  let maxR = 0;
  for (const p of positions.values()) {
    maxR = Math.max(maxR, radius(p));
  }
  const extent = maxR + margin;
  return [-extent, -extent, 2 * extent, 2 * extent];
}
