import { describe, expect, it } from "vitest";

import { defaultState, loadState, saveState, STATE_KEY, StorageLike } from "../src/state.js";

function memoryStorage(): StorageLike & { data: Map<string, string> } {
  const data = new Map<string, string>();
  return {
    data,
    getItem: (k) => data.get(k) ?? null,
    setItem: (k, v) => void data.set(k, v),
  };
}

describe("view state persistence", () => {
  it("round-trips through storage", () => {
    const storage = memoryStorage();
    const state = defaultState();
    state.selected_goal = 9;
    state.selected_node = "White Paper";
    state.panel_settings.min_degree = 3;
    state.panel_settings.link_labels = false;
    saveState(storage, state);
    expect(loadState(storage)).toEqual(state);
  });

  it("missing storage yields defaults", () => {
    expect(loadState(memoryStorage())).toEqual(defaultState());
  });

  it("corrupt JSON yields defaults", () => {
    const storage = memoryStorage();
    storage.setItem(STATE_KEY, "{not json");
    expect(loadState(storage)).toEqual(defaultState());
  });

  it("out-of-range values are clamped to valid state", () => {
    const storage = memoryStorage();
    storage.setItem(STATE_KEY, JSON.stringify({
      selected_dataset: "",
      selected_goal: 99,
      selected_node: 7,
      panel_settings: { link_labels: 1, min_degree: -5, palette_size: 0 },
    }));
    const state = loadState(storage);
    expect(state.selected_goal).toBe(1);
    expect(state.selected_dataset).toBe("preliminary");
    expect(state.selected_node).toBeNull();
    expect(state.panel_settings.min_degree).toBe(0);
    expect(state.panel_settings.palette_size).toBeGreaterThanOrEqual(2);
  });

  it("save then reload across a fresh load call is stable", () => {
    const storage = memoryStorage();
    const first = loadState(storage);
    saveState(storage, first);
    expect(loadState(storage)).toEqual(first);
  });
});
