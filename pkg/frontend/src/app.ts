// Graph-explorer page wiring: goal switcher, control panel, spiral canvas,
// node detail panel. State persists through localStorage between sessions.

import { httpFetcher, loadGoals, loadGraph, loadManifest, loadMetrics } from "./bundle.js";
import type { Fetcher } from "./bundle.js";
import { inspectNode, UnknownNodeError } from "./inspect.js";
import { renderGraph, showToast } from "./render.js";
import { loadState, saveState } from "./state.js";
import type { GraphDoc, MetricsDoc, ViewState } from "./types.js";

async function resolveFetcher(state: ViewState): Promise<Fetcher> {
  // Prefer a per-dataset bundle directory; fall back to a single bundle.
  const candidates = [`bundle/${state.selected_dataset}`, "bundle"];
  for (const base of candidates) {
    const fetcher = httpFetcher(base);
    try {
      const manifest = await loadManifest(fetcher);
      state.selected_dataset = manifest.dataset;
      return fetcher;
    } catch {
      continue;
    }
  }
  throw new Error("no bundle found; run `goalforge export-site` into frontend/bundle");
}

export async function startApp(): Promise<void> {
  const storage = window.localStorage;
  const state = loadState(storage);
  const fetcher = await resolveFetcher(state);
  const metrics = await loadMetrics(fetcher);
  const goals = await loadGoals(fetcher);

  const goalSelect = document.getElementById("goal-select") as HTMLSelectElement;
  const canvas = document.getElementById("graph-canvas") as HTMLElement;
  const detail = document.getElementById("node-detail") as HTMLElement;
  const metricsPanel = document.getElementById("goal-metrics") as HTMLElement;
  const linkLabels = document.getElementById("link-labels") as HTMLInputElement;
  const minDegree = document.getElementById("min-degree") as HTMLInputElement;
  const paletteSize = document.getElementById("palette-size") as HTMLInputElement;

  goalSelect.replaceChildren(...goals.map((g) => {
    const option = document.createElement("option");
    option.value = String(g.number);
    option.textContent = `Goal ${g.number}: ${g.title}`;
    return option;
  }));
  goalSelect.value = String(state.selected_goal);
  linkLabels.checked = state.panel_settings.link_labels;
  minDegree.value = String(state.panel_settings.min_degree);
  paletteSize.value = String(state.panel_settings.palette_size);

  let graph: GraphDoc = await loadGraph(fetcher, state.selected_goal);

  const persist = () => saveState(storage, state);

  const renderDetail = () => {
    if (!state.selected_node) {
      detail.innerHTML = "<p class='hint'>Click a node to inspect it.</p>";
      return;
    }
    try {
      const info = inspectNode(graph, state.selected_node);
      const incident = info.incident.map((l) =>
        `<li>${l.direction === "out" ? "→" : "←"} <strong>${l.other}</strong>` +
        (l.relation ? ` <em>(${l.relation})</em>` : "") + `</li>`).join("");
      detail.innerHTML = `
        <h3>${info.id}</h3>
        <p>${info.details}</p>
        <p>order ${info.order} · degree ${info.degree} · color bin ${info.colorBin}</p>
        <ul class="incident">${incident || "<li class='hint'>no incident links</li>"}</ul>`;
    } catch (err) {
      if (err instanceof UnknownNodeError) {
        showToast(err.message);
        state.selected_node = null;
      } else {
        throw err;
      }
    }
  };

  const renderMetrics = () => {
    const row = metrics.rows.find((r) => r.goal === state.selected_goal);
    if (!row) {
      metricsPanel.textContent = "";
      return;
    }
    metricsPanel.innerHTML = `
      <dt>Initial node</dt><dd>${row.initial_node}</dd>
      <dt>Most connected</dt><dd>${row.most_connected.join(", ")}</dd>
      <dt>Final node</dt><dd>${row.final_node}</dd>
      <dt>Direction</dt><dd>${row.direction_trend}${row.intricate ? " (near-tied)" : ""}
        — ${row.outward_count} out / ${row.inward_count} in</dd>
      <dt>Size</dt><dd>${row.n_nodes} nodes, ${row.n_links} links,
        ${row.color_variety} colors</dd>`;
  };

  const redraw = () => {
    renderGraph(canvas, graph, state.panel_settings, (id) => {
      state.selected_node = id;
      persist();
      renderDetail();
      redraw();
    }, state.selected_node);
    renderMetrics();
    renderDetail();
  };

  goalSelect.addEventListener("change", async () => {
    state.selected_goal = Number(goalSelect.value);
    state.selected_node = null;
    graph = await loadGraph(fetcher, state.selected_goal);
    persist();
    redraw();
  });
  linkLabels.addEventListener("change", () => {
    state.panel_settings.link_labels = linkLabels.checked;
    persist();
    redraw();
  });
  minDegree.addEventListener("change", () => {
    state.panel_settings.min_degree = Math.max(0, Number(minDegree.value) || 0);
    minDegree.value = String(state.panel_settings.min_degree);
    persist();
    redraw();
  });
  paletteSize.addEventListener("change", () => {
    state.panel_settings.palette_size = Math.max(2, Number(paletteSize.value) || 8);
    paletteSize.value = String(state.panel_settings.palette_size);
    persist();
    redraw();
  });

  document.getElementById("dataset-name")!.textContent = state.selected_dataset;
  persist();
  redraw();
}

startApp().catch((err) => {
  const canvas = document.getElementById("graph-canvas");
  if (canvas) canvas.textContent = String(err);
});
