// SVG rendering for the graph page. Pure helpers live in layout/color/
// inspect; this module only builds DOM.

import { nodeFill } from "./color.js";
import { visibleLinks, visibleNodes } from "./inspect.js";
import { layoutSpiral, viewBox } from "./layout.js";
import type { GraphDoc, PanelSettings } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const NODE_RADIUS = 14;

function el<K extends string>(name: K, attrs: Record<string, string | number> = {}): SVGElement {
  const node = document.createElementNS(SVG_NS, name);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, String(value));
  }
  return node;
}

export function renderGraph(
  container: HTMLElement,
  graph: GraphDoc,
  settings: PanelSettings,
  onSelect: (id: string) => void,
  selected: string | null,
): void {
  container.replaceChildren();
  const positions = layoutSpiral(graph);
  const [x, y, w, h] = viewBox(positions);
  const svg = el("svg", { viewBox: `${x} ${y} ${w} ${h}` }) as SVGSVGElement;
  svg.classList.add("graph-canvas");

  const defs = el("defs");
  const marker = el("marker", {
    id: "arrowhead", viewBox: "0 0 10 10", refX: 9, refY: 5,
    markerWidth: 7, markerHeight: 7, orient: "auto-start-reverse",
  });
  marker.appendChild(el("path", { d: "M 0 0 L 10 5 L 0 10 z", fill: "#5b6b7a" }));
  defs.appendChild(marker);
  svg.appendChild(defs);

  const nodes = visibleNodes(graph, settings.min_degree);
  const links = visibleLinks(graph, settings.min_degree);
  const degrees = graph.nodes.map((n) => n.degree);
  const minDeg = Math.min(...degrees);
  const maxDeg = Math.max(...degrees);

  for (const link of links) {
    const from = positions.get(link.source)!;
    const to = positions.get(link.target)!;
    // Trim the line to the node circles so the arrowhead stays visible.
    const dx = to.x - from.x;
    const dy = to.y - from.y;
    const len = Math.hypot(dx, dy) || 1;
    const sx = from.x + (dx / len) * NODE_RADIUS;
    const sy = from.y + (dy / len) * NODE_RADIUS;
    const tx = to.x - (dx / len) * (NODE_RADIUS + 2);
    const ty = to.y - (dy / len) * (NODE_RADIUS + 2);
    svg.appendChild(el("line", {
      x1: sx, y1: sy, x2: tx, y2: ty,
      stroke: "#5b6b7a", "stroke-width": 1.4, "marker-end": "url(#arrowhead)",
    }));
    if (settings.link_labels && link.relation) {
      const label = el("text", {
        x: (sx + tx) / 2, y: (sy + ty) / 2 - 4,
        "text-anchor": "middle", class: "link-label",
      });
      label.textContent = link.relation;
      svg.appendChild(label);
    }
  }

  for (const node of nodes) {
    const p = positions.get(node.id)!;
    const group = el("g", { class: "node-group" });
    const circle = el("circle", {
      cx: p.x, cy: p.y, r: NODE_RADIUS,
      fill: nodeFill(node.degree, minDeg, maxDeg, settings.palette_size),
      stroke: node.id === selected ? "#d95f02" : "#26415e",
      "stroke-width": node.id === selected ? 3 : 1.2,
    });
    circle.addEventListener("click", () => onSelect(node.id));
    const title = el("title");
    title.textContent = `${node.id} (order ${node.order}, degree ${node.degree})`;
    circle.appendChild(title);
    group.appendChild(circle);
    const label = el("text", {
      x: p.x, y: p.y - NODE_RADIUS - 4, "text-anchor": "middle", class: "node-label",
    });
    label.textContent = node.id.length > 24 ? node.id.slice(0, 22) + "…" : node.id;
    group.appendChild(label);
    svg.appendChild(group);
  }

  container.appendChild(svg);
}

export function showToast(message: string): void {
  const toast = document.createElement("div");
  toast.className = "toast";
  toast.textContent = message;
  document.body.appendChild(toast);
  setTimeout(() => toast.remove(), 2500);
}
