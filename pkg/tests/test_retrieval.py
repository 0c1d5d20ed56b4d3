from __future__ import annotations

import numpy as np
import pytest

from goalforge.errors import EmptyDataset, NoCandidates
from goalforge.models import TalkAnnotation, TalkRecord
from goalforge.retrieval import EmbeddingIndex, build_index, select_participants


def _seed_annotations(store, rows, label="preliminary"):
    """rows: list of (video_id, tags, embedding text hint)."""
    for vid, tags, hint in rows:
        store.put_talk(label, TalkRecord(
            video_id=vid, title=hint, published_at="2023-05-01T00:00:00+00:00",
            duration=600, channel="TED", transcript="x", usable=True,
        ))
        store.put_annotation(label, TalkAnnotation(
            video_id=vid, title=hint, description=f"about {hint}", core_value=hint,
            key_words=(hint,), qa=tuple((f"q{i}", f"a{i}") for i in range(5)),
            sdg_types=frozenset(tags),
        ))


def test_index_has_one_unit_vector_per_talk(store, mock_gateway):
    _seed_annotations(store, [("a", {1}, "alpha"), ("b", {2}, "beta"), ("c", {3}, "gamma")])
    index = build_index(store, "preliminary", mock_gateway())
    assert index.ids == ["a", "b", "c"]
    assert index.vectors.shape == (3, index.dimension)
    assert np.allclose(np.linalg.norm(index.vectors, axis=1), 1.0, atol=1e-9)


def test_index_deterministic_for_seed(store, mock_gateway):
    _seed_annotations(store, [("a", {1}, "alpha"), ("b", {2}, "beta")])
    i1 = build_index(store, "preliminary", mock_gateway(seed=11))
    i2 = build_index(store, "preliminary", mock_gateway(seed=11))
    assert np.array_equal(i1.vectors, i2.vectors)


def test_empty_dataset_rejected(store, mock_gateway):
    with pytest.raises(EmptyDataset):
        build_index(store, "preliminary", mock_gateway())


def test_index_round_trips_through_disk(store, mock_gateway, tmp_path):
    _seed_annotations(store, [("a", {1}, "alpha"), ("b", {2}, "beta")])
    index = build_index(store, "preliminary", mock_gateway())
    index.save(tmp_path, "preliminary")
    loaded = EmbeddingIndex.load(tmp_path, "preliminary")
    assert loaded.ids == index.ids
    assert np.array_equal(loaded.vectors, index.vectors)
    assert loaded.model == index.model and loaded.seed == index.seed


def test_cosine_symmetry(store, mock_gateway):
    _seed_annotations(store, [("a", {1}, "alpha"), ("b", {2}, "beta")])
    index = build_index(store, "preliminary", mock_gateway())
    va, vb = index.vectors
    assert abs(float(va @ vb) - float(vb @ va)) <= 1e-9


class TestSelection:
    def test_under_cap_returns_all_sorted(self, store, mock_gateway, catalog):
        _seed_annotations(store, [
            ("a", {6}, "river"), ("b", {6}, "aquifer"), ("c", {6}, "rain"),
            ("d", {2}, "farm"),
        ])
        gw = mock_gateway()
        index = build_index(store, "preliminary", gw)
        picked = select_participants(6, index, catalog, 25, store, "preliminary", gw)
        assert sorted(picked.members) == ["a", "b", "c"]
        assert picked.scores == sorted(picked.scores, reverse=True)

    def test_cap_truncates(self, store, mock_gateway, catalog):
        _seed_annotations(store, [(f"t{i:02d}", {6}, f"talk {i}") for i in range(40)])
        gw = mock_gateway()
        index = build_index(store, "preliminary", gw)
        picked = select_participants(6, index, catalog, 25, store, "preliminary", gw)
        assert len(picked.members) == 25

    def test_members_all_carry_the_goal_tag(self, store, mock_gateway, catalog):
        _seed_annotations(store, [
            ("a", {6}, "water"), ("b", {3}, "health"), ("c", {6, 3}, "both"),
        ])
        gw = mock_gateway()
        index = build_index(store, "preliminary", gw)
        picked = select_participants(6, index, catalog, 25, store, "preliminary", gw)
        tagged = {a.video_id for a in store.annotations("preliminary") if 6 in a.sdg_types}
        assert set(picked.members) <= tagged

    def test_exact_ties_break_on_video_id(self, store, mock_gateway, catalog):
        # Identical annotation text embeds to identical vectors => exact tie.
        _seed_annotations(store, [("z9", {6}, "same"), ("a1", {6}, "same")])
        gw = mock_gateway()
        index = build_index(store, "preliminary", gw)
        picked = select_participants(6, index, catalog, 25, store, "preliminary", gw)
        assert picked.scores[0] == picked.scores[1]
        assert picked.members == ["a1", "z9"]

    def test_no_candidates(self, store, mock_gateway, catalog):
        _seed_annotations(store, [("a", {1}, "poverty")])
        gw = mock_gateway()
        index = build_index(store, "preliminary", gw)
        with pytest.raises(NoCandidates):
            select_participants(14, index, catalog, 25, store, "preliminary", gw)

    def test_selection_pure_function_of_inputs(self, store, mock_gateway, catalog):
        _seed_annotations(store, [(f"t{i}", {6}, f"text {i}") for i in range(8)])
        gw = mock_gateway(seed=3)
        index = build_index(store, "preliminary", gw)
        p1 = select_participants(6, index, catalog, 5, store, "preliminary", gw)
        p2 = select_participants(6, index, catalog, 5, store, "preliminary", gw)
        assert p1.members == p2.members and p1.scores == p2.scores
