// Bundle document shapes; the contract is docs/bundle-schema.md in the
// repository root, shared with the exporter.

export interface BundleNode {
  id: string;
  order: number;
  details: string;
  degree: number;
  color_bin: number;
}

export interface BundleLink {
  source: string;
  target: string;
  relation: string;
}

export interface GraphDoc {
  goal: number;
  dataset: string;
  nodes: BundleNode[];
  links: BundleLink[];
}

export interface MetricsRow {
  goal: number;
  initial_node: string;
  most_connected: string[];
  final_node: string;
  color_variety: number;
  direction_trend: "Inward" | "Outward" | "Balanced";
  intricate: boolean;
  inward_count: number;
  outward_count: number;
  n_nodes: number;
  n_links: number;
  max_degree: number;
}

export interface MetricsDoc {
  dataset: string;
  palette_size: number;
  rows: MetricsRow[];
}

export interface MatrixDoc {
  dataset: string;
  goals: number[];
  cells: number[][];
}

export interface NewGoalIndicator {
  code: string;
  description: string;
}

export interface NewGoalSubGoal {
  code: string;
  description: string;
  indicators: NewGoalIndicator[];
}

export interface NewGoalRow {
  number: number;
  goal: string;
  sub_goals: NewGoalSubGoal[];
  source_goals: number[];
  source_label: string;
  description: string;
}

export interface NewGoalsDoc {
  dataset: string;
  rows: NewGoalRow[];
}

export interface GoalEntry {
  number: number;
  title: string;
  indicator_change_count: number;
}

export interface Manifest {
  dataset: string;
  seed: number | null;
  bundle_schema_version: number;
  generator_version: string;
  palette_size: number;
  files: Record<string, string>;
}

export interface PanelSettings {
  link_labels: boolean;
  min_degree: number;
  palette_size: number;
}

export interface ViewState {
  selected_dataset: string;
  selected_goal: number;
  selected_node: string | null;
  panel_settings: PanelSettings;
}

export interface Point {
  x: number;
  y: number;
}
