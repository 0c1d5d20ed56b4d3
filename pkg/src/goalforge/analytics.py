"""Quantitative analyses over annotations and knowledge graphs:
tag co-occurrence, the attribute network, per-graph structural metrics, and
the two-dataset node/link comparison (Levene + Welch).

The Levene and Welch statistics are computed from first principles here;
the test suite cross-checks them against scipy's reference implementations,
so the two routes stay independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import f as f_dist
from scipy.stats import t as t_dist

from .errors import EmptyDataset, EmptyGraph, IncompleteDataset
from .models import KnowledgeGraph
from .store import Store

GOALS = list(range(1, 18))


# --------------------------------------------------------------------------
# Co-occurrence
# --------------------------------------------------------------------------


@dataclass
class CooccurrenceMatrix:
    cells: list[list[int]]  # 17x17, 0-based storage
    dataset: str
    single_only: bool = False

    def count(self, i: int, j: int) -> int:
        """Cell for 1-based goal numbers."""
        return self.cells[i - 1][j - 1]

    def max_value(self) -> int:
        return max(max(row) for row in self.cells)

    def validate(self) -> None:
        for a in range(17):
            for b in range(17):
                assert self.cells[a][b] == self.cells[b][a], "matrix must be symmetric"
                if not self.single_only:
                    assert self.cells[a][a] >= self.cells[a][b], "diagonal must dominate its row"


def cooccurrence_from_tags(tag_sets: Iterable[frozenset[int] | set[int]], dataset: str = "",
                           single_only: bool = False) -> CooccurrenceMatrix:
    cells = [[0] * 17 for _ in range(17)]
    for tags in tag_sets:
        ordered = sorted(tags)
        for idx, i in enumerate(ordered):
            if single_only:
                if len(ordered) == 1:
                    cells[i - 1][i - 1] += 1
            else:
                cells[i - 1][i - 1] += 1
            for j in ordered[idx + 1:]:
                cells[i - 1][j - 1] += 1
                cells[j - 1][i - 1] += 1
    return CooccurrenceMatrix(cells=cells, dataset=dataset, single_only=single_only)


def cooccurrence(store: Store, label: str, single_only: bool = False) -> CooccurrenceMatrix:
    """cells[i][j] (i != j) counts talks tagged with both goals; cells[i][i]
    counts talks tagged with goal i (any tag cardinality by default; in
    single-only mode, talks whose tag set is exactly {i})."""
    annotations = store.annotations(label)
    if not annotations:
        raise EmptyDataset(f"no annotations for dataset {label!r}")
    return cooccurrence_from_tags((a.sdg_types for a in annotations), dataset=label, single_only=single_only)


@dataclass
class AttributeNetwork:
    nodes: list[int]
    edges: list[tuple[int, int, int]]  # (goal_i, goal_j, weight) with i < j


def attribute_network(matrix: CooccurrenceMatrix, min_weight: int = 1) -> AttributeNetwork:
    """Goals as nodes (those with any tags), weighted edges where the pair
    count reaches min_weight."""
    nodes = [g for g in GOALS if matrix.count(g, g) > 0]
    edges = [
        (i, j, matrix.count(i, j))
        for i in GOALS for j in GOALS
        if i < j and matrix.count(i, j) >= min_weight
    ]
    return AttributeNetwork(nodes=nodes, edges=edges)


@dataclass
class ZeroPair:
    goal_i: int
    goal_j: int
    count_i: int  # talks tagged with goal_i
    count_j: int


def zero_pair_report(matrix: CooccurrenceMatrix) -> list[ZeroPair]:
    """Goal pairs that never co-occur, annotated with each goal's own talk
    count. Sorted, i < j."""
    return [
        ZeroPair(i, j, matrix.count(i, i), matrix.count(j, j))
        for i in GOALS for j in GOALS
        if i < j and matrix.count(i, j) == 0
    ]


# --------------------------------------------------------------------------
# Per-graph structural metrics
# --------------------------------------------------------------------------


def color_bin(degree: int, min_deg: int, max_deg: int, palette_size: int = 8) -> int:
    """Spectrum bin for a node's degree; uniform-degree graphs collapse to a
    single bin."""
    span = max(1, max_deg - min_deg + 1)
    return math.floor((degree - min_deg) / span * palette_size)


@dataclass
class KgMetrics:
    goal: int
    initial_node: str
    most_connected: list[str]
    final_node: str
    color_variety: int
    direction_trend: str  # "Inward" | "Outward" | "Balanced"
    inward_count: int
    outward_count: int
    n_nodes: int
    n_links: int
    intricate: bool = False  # |outward - inward| <= 2: directions nearly tied


def node_degrees(graph: KnowledgeGraph) -> dict[str, int]:
    """Undirected degree (in + out); self-loops count once."""
    degrees = {n.id: 0 for n in graph.nodes}
    for link in graph.links:
        if link.source == link.target:
            degrees[link.source] += 1
        else:
            degrees[link.source] += 1
            degrees[link.target] += 1
    return degrees


def kg_metrics(graph: KnowledgeGraph, palette_size: int = 8) -> KgMetrics:
    if not graph.nodes:
        raise EmptyGraph(f"goal {graph.goal} graph has no nodes")
    if palette_size < 2:
        raise ValueError("palette_size must be >= 2")
    by_order = sorted(graph.nodes, key=lambda n: n.order)
    order_of = {n.id: n.order for n in graph.nodes}

    degrees = node_degrees(graph)
    max_deg = max(degrees.values())
    min_deg = min(degrees.values())
    most_connected = [n.id for n in by_order if degrees[n.id] == max_deg]
    bins = {color_bin(d, min_deg, max_deg, palette_size) for d in degrees.values()}

    inward = outward = 0
    for link in graph.links:
        so, to = order_of[link.source], order_of[link.target]
        if so > to:
            inward += 1
        elif so < to:
            outward += 1
        # equal orders only happen for self-loops; excluded from both counts
    if outward > inward:
        trend = "Outward"
    elif inward > outward:
        trend = "Inward"
    else:
        trend = "Balanced"

    return KgMetrics(
        goal=graph.goal,
        initial_node=by_order[0].id,
        most_connected=most_connected,
        final_node=by_order[-1].id,
        color_variety=len(bins),
        direction_trend=trend,
        inward_count=inward,
        outward_count=outward,
        n_nodes=len(graph.nodes),
        n_links=len(graph.links),
        intricate=abs(outward - inward) <= 2,
    )


def metrics_table(store: Store, label: str, palette_size: int = 8) -> list[KgMetrics]:
    graphs = store.graphs(label)
    if not graphs:
        raise EmptyDataset(f"no graphs for dataset {label!r}")
    return [kg_metrics(g, palette_size) for g in sorted(graphs, key=lambda g: g.goal)]


# --------------------------------------------------------------------------
# Two-dataset comparison
# --------------------------------------------------------------------------


@dataclass
class ComparisonReport:
    metric: str  # "Nodes" | "Links"
    levene_W: float
    levene_p: float
    welch_t: float
    welch_df: float
    welch_p: float
    group_means: tuple[float, float]
    levene_center: str = "mean"


def welch_ttest(a: Sequence[float], b: Sequence[float]) -> tuple[float, float, float]:
    """Two-sample t-test without pooling variances; returns (t, df, p) with
    the Welch-Satterthwaite degrees of freedom and a two-sided p-value."""
    x, y = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    n1, n2 = len(x), len(y)
    if n1 < 2 or n2 < 2:
        raise ValueError("each sample needs at least 2 observations")
    m1, m2 = x.mean(), y.mean()
    v1, v2 = x.var(ddof=1), y.var(ddof=1)
    se2 = v1 / n1 + v2 / n2
    if se2 == 0:
        if m1 == m2:
            return 0.0, float(n1 + n2 - 2), 1.0
        return math.inf if m1 > m2 else -math.inf, float(n1 + n2 - 2), 0.0
    t = (m1 - m2) / math.sqrt(se2)
    df = se2**2 / ((v1 / n1) ** 2 / (n1 - 1) + (v2 / n2) ** 2 / (n2 - 1))
    p = 2.0 * float(t_dist.sf(abs(t), df))
    return float(t), float(df), p


def levene_test(a: Sequence[float], b: Sequence[float], center: str = "mean") -> tuple[float, float]:
    """Levene's test for equal variances over two samples. center="mean" is
    the classic statistic; center="median" gives the Brown-Forsythe variant."""
    groups = [np.asarray(a, dtype=float), np.asarray(b, dtype=float)]
    k = len(groups)
    n_total = sum(len(g) for g in groups)
    if any(len(g) < 2 for g in groups):
        raise ValueError("each sample needs at least 2 observations")
    if center == "mean":
        centers = [g.mean() for g in groups]
    elif center == "median":
        centers = [float(np.median(g)) for g in groups]
    else:
        raise ValueError(f"unknown center {center!r}")
    z = [np.abs(g - c) for g, c in zip(groups, centers)]
    z_means = [zi.mean() for zi in z]
    z_grand = sum(zi.sum() for zi in z) / n_total
    numerator = sum(len(zi) * (zm - z_grand) ** 2 for zi, zm in zip(z, z_means))
    denominator = sum(((zi - zm) ** 2).sum() for zi, zm in zip(z, z_means))
    if denominator == 0:
        return 0.0, 1.0
    W = (n_total - k) / (k - 1) * numerator / denominator
    p = float(f_dist.sf(W, k - 1, n_total - k))
    return float(W), p


def compare_samples(metric: str, a: Sequence[float], b: Sequence[float],
                    levene_center: str = "mean") -> ComparisonReport:
    W, lp = levene_test(a, b, center=levene_center)
    t, df, p = welch_ttest(a, b)
    return ComparisonReport(
        metric=metric, levene_W=W, levene_p=lp,
        welch_t=t, welch_df=df, welch_p=p,
        group_means=(float(np.mean(a)), float(np.mean(b))),
        levene_center=levene_center,
    )


def compare_datasets(store: Store, metric: str, labels: tuple[str, str] = ("formal", "preliminary"),
                     levene_center: str = "mean") -> ComparisonReport:
    """Levene + Welch over per-goal node or link counts of two datasets."""
    if metric not in ("Nodes", "Links"):
        raise ValueError("metric must be 'Nodes' or 'Links'")
    samples = []
    for label in labels:
        graphs = store.graphs(label)
        if len(graphs) < 17:
            raise IncompleteDataset(f"dataset {label!r} has {len(graphs)} graphs; 17 expected")
        key = (lambda g: len(g.nodes)) if metric == "Nodes" else (lambda g: len(g.links))
        samples.append([key(g) for g in sorted(graphs, key=lambda g: g.goal)])
    return compare_samples(metric, samples[0], samples[1], levene_center)


# --------------------------------------------------------------------------
# Heatmap export
# --------------------------------------------------------------------------

_COLOR_LOW = (247, 251, 255)
_COLOR_HIGH = (8, 48, 107)
_CELL_PX = 24


def _blend(fraction: float) -> tuple[int, int, int]:
    return tuple(
        round(lo + (hi - lo) * fraction) for lo, hi in zip(_COLOR_LOW, _COLOR_HIGH)
    )


def heatmap_export(matrix: CooccurrenceMatrix, out_dir: str | Path, stem: str = "cooccurrence") -> dict[str, Path]:
    """Write the heatmap image plus the matrix as a TSV table. Output bytes
    are a pure function of the matrix: the color scale anchors at the matrix
    maximum and the PNG is written without variable metadata."""
    from PIL import Image

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    peak = matrix.max_value()
    img = Image.new("RGB", (17 * _CELL_PX, 17 * _CELL_PX))
    pixels = img.load()
    for row in range(17):
        for col in range(17):
            value = matrix.cells[row][col]
            color = _blend(value / peak if peak else 0.0)
            for dy in range(_CELL_PX):
                for dx in range(_CELL_PX):
                    pixels[col * _CELL_PX + dx, row * _CELL_PX + dy] = color
    png_path = out_dir / f"{stem}.png"
    img.save(png_path, format="PNG")

    tsv_path = out_dir / f"{stem}.tsv"
    header = "goal\t" + "\t".join(str(g) for g in GOALS)
    lines = [header]
    for g in GOALS:
        lines.append(str(g) + "\t" + "\t".join(str(matrix.count(g, j)) for j in GOALS))
    tsv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return {"image": png_path, "table": tsv_path}
