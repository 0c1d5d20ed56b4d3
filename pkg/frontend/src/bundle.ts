// Bundle loading and validation. Fetching is injected so tests can read
// from the filesystem; the browser glue wraps fetch().

import type { GoalEntry, GraphDoc, Manifest, MatrixDoc, MetricsDoc, NewGoalsDoc } from "./types.js";

export type Fetcher = (relPath: string) => Promise<unknown>;

export class SchemaError extends Error {
  constructor(path: string, reason: string) {
    super(`${path}: ${reason}`);
    this.name = "SchemaError";
  }
}

function isObject(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

function requireNumber(obj: Record<string, unknown>, key: string, path: string): number {
  const value = obj[key];
  if (typeof value !== "number" || Number.isNaN(value)) {
    throw new SchemaError(`${path}.${key}`, "expected a number");
  }
  return value;
}

function requireString(obj: Record<string, unknown>, key: string, path: string): string {
  const value = obj[key];
  if (typeof value !== "string") {
    throw new SchemaError(`${path}.${key}`, "expected a string");
  }
  return value;
}

function requireArray(obj: Record<string, unknown>, key: string, path: string): unknown[] {
  const value = obj[key];
  if (!Array.isArray(value)) {
    throw new SchemaError(`${path}.${key}`, "expected an array");
  }
  return value;
}

export function validateGraphDoc(raw: unknown, path = "graph"): GraphDoc {
  if (!isObject(raw)) throw new SchemaError(path, "expected an object");
  const goal = requireNumber(raw, "goal", path);
  const dataset = requireString(raw, "dataset", path);
  const nodes = requireArray(raw, "nodes", path).map((n, i) => {
    if (!isObject(n)) throw new SchemaError(`${path}.nodes[${i}]`, "expected an object");
    return {
      id: requireString(n, "id", `${path}.nodes[${i}]`),
      order: requireNumber(n, "order", `${path}.nodes[${i}]`),
      details: requireString(n, "details", `${path}.nodes[${i}]`),
      degree: requireNumber(n, "degree", `${path}.nodes[${i}]`),
      color_bin: requireNumber(n, "color_bin", `${path}.nodes[${i}]`),
    };
  });
  if (nodes.length === 0) throw new SchemaError(`${path}.nodes`, "must be non-empty");
  const orders = new Set(nodes.map((n) => n.order));
  if (orders.size !== nodes.length) {
    throw new SchemaError(`${path}.nodes`, "orders must be unique");
  }
  const ids = new Set(nodes.map((n) => n.id));
  const links = requireArray(raw, "links", path).map((l, i) => {
    if (!isObject(l)) throw new SchemaError(`${path}.links[${i}]`, "expected an object");
    const link = {
      source: requireString(l, "source", `${path}.links[${i}]`),
      target: requireString(l, "target", `${path}.links[${i}]`),
      relation: requireString(l, "relation", `${path}.links[${i}]`),
    };
    if (!ids.has(link.source) || !ids.has(link.target)) {
      throw new SchemaError(`${path}.links[${i}]`, "endpoint missing from nodes");
    }
    return link;
  });
  return { goal, dataset, nodes, links };
}

export async function loadGraph(fetcher: Fetcher, goal: number): Promise<GraphDoc> {
  const rel = `graphs/goal_${String(goal).padStart(2, "0")}.json`;
  return validateGraphDoc(await fetcher(rel), rel);
}

export async function loadMetrics(fetcher: Fetcher): Promise<MetricsDoc> {
  const raw = await fetcher("metrics.json");
  if (!isObject(raw) || !Array.isArray(raw.rows)) {
    throw new SchemaError("metrics.json", "expected rows");
  }
  return raw as unknown as MetricsDoc;
}

export async function loadMatrix(fetcher: Fetcher): Promise<MatrixDoc> {
  const raw = await fetcher("matrix.json");
  if (!isObject(raw) || !Array.isArray(raw.cells)) {
    throw new SchemaError("matrix.json", "expected cells");
  }
  return raw as unknown as MatrixDoc;
}

export async function loadNewGoals(fetcher: Fetcher): Promise<NewGoalsDoc> {
  const raw = await fetcher("new_goals.json");
  if (!isObject(raw) || !Array.isArray(raw.rows)) {
    throw new SchemaError("new_goals.json", "expected rows");
  }
  return raw as unknown as NewGoalsDoc;
}

export async function loadGoals(fetcher: Fetcher): Promise<GoalEntry[]> {
  const raw = await fetcher("goals.json");
  if (!Array.isArray(raw)) throw new SchemaError("goals.json", "expected an array");
  return raw as GoalEntry[];
}

export async function loadManifest(fetcher: Fetcher): Promise<Manifest> {
  const raw = await fetcher("manifest.json");
  if (!isObject(raw) || !isObject(raw.files)) {
    throw new SchemaError("manifest.json", "expected a files map");
  }
  return raw as unknown as Manifest;
}

export function httpFetcher(baseUrl: string): Fetcher {
  return async (relPath: string) => {
    const resp = await fetch(`${baseUrl.replace(/\/$/, "")}/${relPath}`);
    if (!resp.ok) {
      throw new SchemaError(relPath, `fetch failed (${resp.status})`);
    }
    return resp.json();
  };
}
