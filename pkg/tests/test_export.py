from __future__ import annotations

import json

import pytest

from goalforge.analytics import color_bin, node_degrees
from goalforge.errors import IncompleteDataset
from goalforge.export import export_site, verify_bundle
from goalforge.fixtures import (
    PRELIMINARY_GRAPH_ROWS,
    load_graph_fixture,
    load_new_goals_doc,
    load_tag_fixture,
)
from goalforge.structured import parse_structured, serialize
from goalforge.synthesis import parse_proposals


@pytest.fixture()
def loaded_store(store, catalog):
    load_tag_fixture(store, "preliminary")
    load_graph_fixture(store, "preliminary")
    for p in parse_proposals(parse_structured(serialize(load_new_goals_doc("preliminary")), "NewGoalsDoc")):
        store.put_proposal("preliminary", p)
    return store


def test_bundle_contains_17_graph_documents(loaded_store, catalog, tmp_path):
    bundle = export_site(loaded_store, "preliminary", tmp_path / "bundle", catalog)
    graph_files = sorted((tmp_path / "bundle" / "graphs").glob("goal_*.json"))
    assert len(graph_files) == 17
    assert verify_bundle(tmp_path / "bundle")
    assert set(bundle.checksums) == {f"graphs/goal_{g:02d}.json" for g in range(1, 18)} | {
        "goals.json", "metrics.json", "matrix.json", "new_goals.json",
    }


def test_metrics_table_mirrors_reference_rows(loaded_store, catalog, tmp_path):
    export_site(loaded_store, "preliminary", tmp_path / "bundle", catalog)
    metrics = json.loads((tmp_path / "bundle" / "metrics.json").read_text())
    rows = {r["goal"]: r for r in metrics["rows"]}
    for goal, initial, hubs, final, trend, intricate, n_nodes, n_links in PRELIMINARY_GRAPH_ROWS:
        row = rows[goal]
        assert row["initial_node"] == initial
        assert row["most_connected"] == hubs
        assert row["final_node"] == final
        assert row["direction_trend"] == trend
        assert row["intricate"] == intricate
        assert (row["n_nodes"], row["n_links"]) == (n_nodes, n_links)


def test_exported_degrees_and_bins_match_analytics(loaded_store, catalog, tmp_path):
    export_site(loaded_store, "preliminary", tmp_path / "bundle", catalog)
    graphs = {g.goal: g for g in loaded_store.graphs("preliminary")}
    for goal in (1, 6, 8):
        doc = json.loads((tmp_path / "bundle" / "graphs" / f"goal_{goal:02d}.json").read_text())
        degrees = node_degrees(graphs[goal])
        max_d, min_d = max(degrees.values()), min(degrees.values())
        for node in doc["nodes"]:
            assert node["degree"] == degrees[node["id"]]
            assert node["color_bin"] == color_bin(node["degree"], min_d, max_d, 8)


def test_matrix_export_matches_store(loaded_store, catalog, tmp_path):
    export_site(loaded_store, "preliminary", tmp_path / "bundle", catalog)
    doc = json.loads((tmp_path / "bundle" / "matrix.json").read_text())
    assert doc["cells"][9][9] == 115  # goal 10 diagonal, 0-based
    assert doc["cells"][9][15] == 71


def test_new_goals_export_columns(loaded_store, catalog, tmp_path):
    export_site(loaded_store, "preliminary", tmp_path / "bundle", catalog)
    doc = json.loads((tmp_path / "bundle" / "new_goals.json").read_text())
    assert len(doc["rows"]) == 1
    row = doc["rows"][0]
    assert row["goal"] == "Goal 18: Inclusive Well-being"
    assert row["source_goals"] == [3, 10]
    assert "Goal 3" in row["source_label"] and "Goal 10" in row["source_label"]
    assert row["sub_goals"][0]["indicators"][0]["code"] == "18.1.1"


def test_reexport_has_identical_checksums(loaded_store, catalog, tmp_path):
    first = export_site(loaded_store, "preliminary", tmp_path / "a", catalog)
    second = export_site(loaded_store, "preliminary", tmp_path / "b", catalog)
    assert first.checksums == second.checksums


def test_incomplete_dataset_rejected(store, catalog, tmp_path):
    load_tag_fixture(store, "preliminary")
    with pytest.raises(IncompleteDataset):
        export_site(store, "preliminary", tmp_path / "bundle", catalog)
