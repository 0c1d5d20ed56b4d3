from __future__ import annotations

import random

import numpy as np
import pytest
from scipy import stats as scipy_stats

from goalforge.analytics import (
    attribute_network,
    color_bin,
    compare_samples,
    cooccurrence,
    cooccurrence_from_tags,
    heatmap_export,
    kg_metrics,
    levene_test,
    node_degrees,
    welch_ttest,
    zero_pair_report,
)
from goalforge.errors import EmptyDataset, EmptyGraph
from goalforge.fixtures import (
    formal_tag_sets,
    load_tag_fixture,
    preliminary_tag_sets,
    reference_graphs,
)

from .conftest import make_graph


def brute_force_matrix(tag_sets):
    """Independent oracle: all-pairs membership scan."""
    cells = [[0] * 17 for _ in range(17)]
    for i in range(1, 18):
        for j in range(1, 18):
            cells[i - 1][j - 1] = sum(1 for tags in tag_sets if i in tags and j in tags)
    return cells


class TestCooccurrence:
    def test_hand_checked_example(self):
        matrix = cooccurrence_from_tags([{1, 2}, {2}])
        assert matrix.count(1, 2) == 1
        assert matrix.count(2, 2) == 2
        assert matrix.count(1, 1) == 1
        assert matrix.cells == brute_force_matrix([{1, 2}, {2}])

    def test_matches_oracle_on_random_databases(self):
        rng = random.Random(7)
        for _ in range(50):
            tag_sets = [
                frozenset(rng.sample(range(1, 18), rng.randint(1, 6)))
                for _ in range(rng.randint(1, 50))
            ]
            matrix = cooccurrence_from_tags(tag_sets)
            assert matrix.cells == brute_force_matrix(tag_sets)
            matrix.validate()  # symmetry + diagonal dominance

    def test_store_backed_matrix(self, store):
        load_tag_fixture(store, "preliminary")
        matrix = cooccurrence(store, "preliminary")
        assert matrix.count(10, 10) == 115
        assert matrix.count(10, 16) == 71

    def test_empty_dataset(self, store):
        with pytest.raises(EmptyDataset):
            cooccurrence(store, "preliminary")

    def test_single_only_diagonal(self):
        matrix = cooccurrence_from_tags([{1}, {1, 2}, {2}], single_only=True)
        assert matrix.count(1, 1) == 1  # only the single-tag talk
        assert matrix.count(2, 2) == 1
        assert matrix.count(1, 2) == 1  # pair counting unchanged


class TestAttributeNetwork:
    def test_formal_reference_edges(self):
        matrix = cooccurrence_from_tags(formal_tag_sets(), "formal")
        network = attribute_network(matrix, min_weight=1)
        weights = {(i, j): w for i, j, w in network.edges}
        assert weights[(10, 16)] == 298
        assert (5, 7) not in weights
        assert set(network.nodes) == set(range(1, 18))

    def test_huge_min_weight_isolates_nodes(self):
        matrix = cooccurrence_from_tags(preliminary_tag_sets(), "preliminary")
        network = attribute_network(matrix, min_weight=10**9)
        assert network.edges == []
        assert len(network.nodes) == 17

    def test_symmetric_in_pair_order(self):
        matrix = cooccurrence_from_tags([{1, 2}, {2, 3}])
        network = attribute_network(matrix, min_weight=1)
        assert all(i < j for i, j, _ in network.edges)
        assert {(i, j) for i, j, _ in network.edges} == {(1, 2), (2, 3)}


class TestZeroPairs:
    def test_formal_reference_zero_pairs(self):
        matrix = cooccurrence_from_tags(formal_tag_sets(), "formal")
        pairs = {(z.goal_i, z.goal_j): z for z in zero_pair_report(matrix)}
        for expected in ((4, 14), (5, 7), (5, 14), (6, 8)):
            assert expected in pairs
        annotated = pairs[(5, 7)]
        assert annotated.count_i == 147
        assert annotated.count_j == 107

    def test_all_pairs_present_gives_empty_report(self):
        matrix = cooccurrence_from_tags([set(range(1, 18))] * 2)
        assert zero_pair_report(matrix) == []

    def test_sorted_output(self):
        matrix = cooccurrence_from_tags([{1}, {2}, {3}])
        pairs = [(z.goal_i, z.goal_j) for z in zero_pair_report(matrix)]
        assert pairs == sorted(pairs)
        assert all(i < j for i, j in pairs)


class TestKgMetrics:
    def test_chain(self):
        graph = make_graph(
            [("A", 1), ("B", 2), ("C", 3)],
            [("A", "B"), ("B", "C")],
        )
        m = kg_metrics(graph)
        assert m.initial_node == "A"
        assert m.final_node == "C"
        assert m.most_connected == ["B"]
        assert (m.outward_count, m.inward_count) == (2, 0)
        assert m.direction_trend == "Outward"

    def test_star_pointing_inward(self):
        nodes = [("Hub", 1)] + [(f"L{i}", i + 1) for i in range(4)]
        links = [(f"L{i}", "Hub") for i in range(4)]
        m = kg_metrics(make_graph(nodes, links))
        assert m.direction_trend == "Inward"
        assert m.most_connected == ["Hub"]

    def test_reference_goal_3_row(self):
        graph = reference_graphs("preliminary")[2]
        m = kg_metrics(graph)
        assert (m.n_nodes, m.n_links) == (11, 10)
        assert m.initial_node == "Goal 3: Good Health and Well-being"
        assert m.most_connected == ["Goal 3: Good Health and Well-being"]
        assert m.direction_trend == "Inward"

    def test_self_loop_counts_once_in_degree_not_in_directions(self):
        graph = make_graph([("A", 1), ("B", 2)], [("A", "A"), ("A", "B")])
        assert node_degrees(graph) == {"A": 2, "B": 1}
        m = kg_metrics(graph)
        assert m.inward_count + m.outward_count == 1  # self-loop excluded
        assert m.inward_count + m.outward_count <= m.n_links

    def test_balanced_trend_and_intricate_flag(self):
        graph = make_graph(
            [("A", 1), ("B", 2), ("C", 3)],
            [("A", "B"), ("C", "A")],
        )
        m = kg_metrics(graph)
        assert m.direction_trend == "Balanced"
        assert m.intricate is True

    def test_uniform_degree_single_color(self):
        graph = make_graph([("A", 1), ("B", 2)], [("A", "B")])
        assert kg_metrics(graph).color_variety == 1

    def test_color_bin_formula(self):
        # degrees 1..4, palette 8: bin = floor((d - 1) / 4 * 8)
        assert [color_bin(d, 1, 4, 8) for d in (1, 2, 3, 4)] == [0, 2, 4, 6]
        assert color_bin(5, 5, 5, 8) == 0

    def test_most_connected_ties_ordered_by_order(self):
        graph = make_graph(
            [("B", 1), ("A", 2), ("C", 3), ("D", 4)],
            [("B", "C"), ("A", "D")],
        )
        m = kg_metrics(make_graph(
            [("B", 1), ("A", 2), ("C", 3), ("D", 4)],
            [("B", "C"), ("A", "D")],
        ))
        assert m.most_connected == ["B", "A", "C", "D"]

    def test_empty_graph(self):
        with pytest.raises(EmptyGraph):
            kg_metrics(make_graph([], []))

    def test_direction_counts_partition_links_on_random_graphs(self):
        rng = random.Random(31)
        for _ in range(40):
            n = rng.randint(1, 15)
            nodes = [(f"N{i}", i + 1) for i in range(n)]
            links = [
                (f"N{rng.randrange(n)}", f"N{rng.randrange(n)}")
                for _ in range(rng.randint(0, 3 * n))
            ]
            graph = make_graph(nodes, links)
            m = kg_metrics(graph)
            self_loops = sum(1 for s, t in links if s == t)
            assert m.inward_count + m.outward_count + self_loops == m.n_links
            degrees = node_degrees(graph)
            top = max(degrees.values())
            assert set(m.most_connected) == {i for i, d in degrees.items() if d == top}
            assert m.initial_node == "N0"  # unique order-1 node


class TestStatistics:
    def test_matches_scipy_on_random_samples(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            a = rng.normal(rng.uniform(-5, 5), rng.uniform(0.5, 4), rng.integers(3, 40))
            b = rng.normal(rng.uniform(-5, 5), rng.uniform(0.5, 4), rng.integers(3, 40))
            t, df, p = welch_ttest(a, b)
            ref = scipy_stats.ttest_ind(a, b, equal_var=False)
            assert abs(t - ref.statistic) <= 1e-9
            assert abs(p - ref.pvalue) <= 1e-9
            W, lp = levene_test(a, b, center="mean")
            ref_W, ref_lp = scipy_stats.levene(a, b, center="mean")
            assert abs(W - ref_W) <= 1e-9
            assert abs(lp - ref_lp) <= 1e-9

    def test_identical_groups(self):
        t, _, p = welch_ttest([3, 5, 7], [3, 5, 7])
        assert t == 0.0 and p == 1.0

    def test_brown_forsythe_variant_available(self):
        a = [1.0, 2.0, 9.0, 4.0]
        b = [2.0, 2.5, 3.0, 8.0]
        W, p = levene_test(a, b, center="median")
        ref_W, ref_p = scipy_stats.levene(a, b, center="median")
        assert abs(W - ref_W) <= 1e-9 and abs(p - ref_p) <= 1e-9

    def test_reference_arrays_reproduce_target_pvalues(self):
        prelim = [len(g.nodes) for g in reference_graphs("preliminary")]
        formal = [len(g.nodes) for g in reference_graphs("formal")]
        report = compare_samples("Nodes", formal, prelim)
        assert abs(report.welch_p - 0.415) <= 0.05
        assert report.levene_p < 0.05  # variance heterogeneity is significant

        prelim_l = [len(g.links) for g in reference_graphs("preliminary")]
        formal_l = [len(g.links) for g in reference_graphs("formal")]
        report_l = compare_samples("Links", formal_l, prelim_l)
        assert abs(report_l.welch_p - 0.570) <= 0.05
        assert report_l.levene_p < 0.05


class TestHeatmap:
    def test_zero_matrix_uniform_minimum_color(self, tmp_path):
        from PIL import Image

        matrix = cooccurrence_from_tags([])
        paths = heatmap_export(matrix, tmp_path)
        img = Image.open(paths["image"])
        colors = img.getcolors()
        assert len(colors) == 1
        assert colors[0][1] == (247, 251, 255)

    def test_max_cell_gets_anchor_color(self, tmp_path):
        from PIL import Image

        matrix = cooccurrence_from_tags(formal_tag_sets(), "formal")
        paths = heatmap_export(matrix, tmp_path)
        img = Image.open(paths["image"])
        # cell (10, 10) 1-based -> row/col index 9, cell size 24
        assert img.getpixel((9 * 24 + 12, 9 * 24 + 12)) == (8, 48, 107)

    def test_byte_deterministic(self, tmp_path):
        matrix = cooccurrence_from_tags(preliminary_tag_sets(), "preliminary")
        a = heatmap_export(matrix, tmp_path / "a")
        b = heatmap_export(matrix, tmp_path / "b")
        assert a["image"].read_bytes() == b["image"].read_bytes()
        assert a["table"].read_bytes() == b["table"].read_bytes()

    def test_table_contains_all_cells(self, tmp_path):
        matrix = cooccurrence_from_tags([{1, 2}])
        paths = heatmap_export(matrix, tmp_path)
        lines = paths["table"].read_text().strip().splitlines()
        assert len(lines) == 18  # header + 17 rows
        assert lines[1].split("\t")[2] == "1"  # cells[1][2]
