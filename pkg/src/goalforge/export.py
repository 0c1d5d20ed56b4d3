"""Static site-bundle exporter.

The bundle is plain JSON files plus a manifest with per-file checksums; the
viewer computes layout from the shipped order/degree/color_bin values, so
the bundle stays presentation-independent. Exported bytes are a pure
function of the store contents (no timestamps, sorted keys), which makes
re-exports checksum-stable.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .analytics import cooccurrence, kg_metrics, node_degrees, color_bin
from .catalog import Catalog
from .errors import IncompleteDataset
from .store import Store

BUNDLE_SCHEMA_VERSION = 1


def _write_json(path: Path, obj) -> bytes:
    data = (json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode("utf-8")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)
    return data


@dataclass
class BundleInfo:
    out_dir: Path
    manifest: dict

    @property
    def checksums(self) -> dict[str, str]:
        return self.manifest["files"]


def export_site(
    store: Store,
    label: str,
    out_dir: str | Path,
    catalog: Catalog,
    palette_size: int = 8,
    seed: int | None = None,
) -> BundleInfo:
    """Write the exploration bundle for one dataset: 17 graph documents with
    precomputed degrees and color bins, the metrics table, the co-occurrence
    matrix, new-goal documents, and a checksummed manifest."""
    out_dir = Path(out_dir)
    graphs = {g.goal: g for g in store.graphs(label)}
    missing = [g for g in range(1, 18) if g not in graphs]
    if missing:
        raise IncompleteDataset(f"dataset {label!r} lacks graphs for goals {missing}")

    files: dict[str, bytes] = {}

    files["goals.json"] = _write_json(out_dir / "goals.json", [
        {"number": g.number, "title": g.title, "indicator_change_count": g.indicator_change_count}
        for g in catalog.goals
    ])

    metrics_rows = []
    for goal in range(1, 18):
        graph = graphs[goal]
        degrees = node_degrees(graph)
        max_deg, min_deg = max(degrees.values()), min(degrees.values())
        doc = {
            "goal": goal,
            "dataset": label,
            "nodes": [
                {
                    "id": n.id, "order": n.order, "details": n.details,
                    "degree": degrees[n.id],
                    "color_bin": color_bin(degrees[n.id], min_deg, max_deg, palette_size),
                }
                for n in sorted(graph.nodes, key=lambda n: n.order)
            ],
            "links": [
                {"source": l.source, "target": l.target, "relation": l.relation}
                for l in graph.links
            ],
        }
        rel = f"graphs/goal_{goal:02d}.json"
        files[rel] = _write_json(out_dir / rel, doc)

        m = kg_metrics(graph, palette_size)
        metrics_rows.append({
            "goal": m.goal,
            "initial_node": m.initial_node,
            "most_connected": m.most_connected,
            "final_node": m.final_node,
            "color_variety": m.color_variety,
            "direction_trend": m.direction_trend,
            "intricate": m.intricate,
            "inward_count": m.inward_count,
            "outward_count": m.outward_count,
            "n_nodes": m.n_nodes,
            "n_links": m.n_links,
            "max_degree": max(node_degrees(graph).values()),
        })
    files["metrics.json"] = _write_json(out_dir / "metrics.json", {
        "dataset": label, "palette_size": palette_size, "rows": metrics_rows,
    })

    matrix = cooccurrence(store, label)
    files["matrix.json"] = _write_json(out_dir / "matrix.json", {
        "dataset": label, "goals": list(range(1, 18)), "cells": matrix.cells,
    })

    proposals = store.proposals(label)
    titles = {g.number: g.title for g in catalog.goals}
    files["new_goals.json"] = _write_json(out_dir / "new_goals.json", {
        "dataset": label,
        "rows": [
            {
                "number": p.number,
                "goal": f"Goal {p.number}: {p.title}",
                "sub_goals": [
                    {
                        "code": s.code, "description": s.description,
                        "indicators": [{"code": i.code, "description": i.description} for i in s.indicators],
                    }
                    for s in p.sub_goals
                ],
                "source_goals": sorted(p.source_goals),
                "source_label": ", ".join(f"Goal {n}: {titles[n]}" for n in sorted(p.source_goals)),
                "description": p.rationale,
            }
            for p in proposals
        ],
    })

    manifest = {
        "dataset": label,
        "seed": seed,
        "bundle_schema_version": BUNDLE_SCHEMA_VERSION,
        "generator_version": __version__,
        "palette_size": palette_size,
        "files": {rel: hashlib.sha256(data).hexdigest() for rel, data in sorted(files.items())},
    }
    _write_json(out_dir / "manifest.json", manifest)
    return BundleInfo(out_dir=out_dir, manifest=manifest)


def verify_bundle(out_dir: str | Path) -> bool:
    """Recompute checksums for every file listed in the manifest."""
    out_dir = Path(out_dir)
    manifest = json.loads((out_dir / "manifest.json").read_text(encoding="utf-8"))
    for rel, digest in manifest["files"].items():
        data = (out_dir / rel).read_bytes()
        if hashlib.sha256(data).hexdigest() != digest:
            return False
    return True
