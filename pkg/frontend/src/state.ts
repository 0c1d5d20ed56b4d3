// View state persisted across sessions. Storage is injected (localStorage
// in the browser, a plain map in tests); corrupt or out-of-range state
// falls back to defaults rather than breaking the page.

import type { ViewState } from "./types.js";

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

export const STATE_KEY = "goalforge-view-state";

export function defaultState(): ViewState {
  return {
    selected_dataset: "preliminary",
    selected_goal: 1,
    selected_node: null,
    panel_settings: { link_labels: true, min_degree: 0, palette_size: 8 },
  };
}

export function loadState(storage: StorageLike): ViewState {
  const fallback = defaultState();
  const raw = storage.getItem(STATE_KEY);
  if (raw === null) return fallback;
  let parsed: unknown;
  try {
    parsed = JSON.parse(raw);
  } catch {
    return fallback;
  }
  if (typeof parsed !== "object" || parsed === null) return fallback;
  const candidate = parsed as Partial<ViewState>;
  const goal = Number(candidate.selected_goal);
  const panel = candidate.panel_settings ?? fallback.panel_settings;
  return {
    selected_dataset:
      typeof candidate.selected_dataset === "string" && candidate.selected_dataset
        ? candidate.selected_dataset
        : fallback.selected_dataset,
    selected_goal: Number.isInteger(goal) && goal >= 1 && goal <= 17 ? goal : fallback.selected_goal,
    selected_node: typeof candidate.selected_node === "string" ? candidate.selected_node : null,
    panel_settings: {
      link_labels: Boolean(panel.link_labels ?? fallback.panel_settings.link_labels),
      min_degree: Math.max(0, Number(panel.min_degree ?? 0) || 0),
      palette_size: Math.max(2, Number(panel.palette_size ?? 8) || 8),
    },
  };
}

export function saveState(storage: StorageLike, state: ViewState): void {
  storage.setItem(STATE_KEY, JSON.stringify(state));
}
