from __future__ import annotations

import hashlib

import pytest

from goalforge.errors import NoCandidates
from goalforge.models import ParticipantSet, TalkAnnotation, TalkRecord
from goalforge.retrieval import build_index
from goalforge.roundtable import simulate, simulate_all


def _seed(store, rows, label="preliminary"):
    for vid, tags in rows:
        store.put_talk(label, TalkRecord(
            video_id=vid, title=f"Talk {vid}", published_at="2023-05-01T00:00:00+00:00",
            duration=600, channel="TED", transcript="x", usable=True,
        ))
        store.put_annotation(label, TalkAnnotation(
            video_id=vid, title=f"Talk {vid}", description="d", core_value="c",
            key_words=("k",), qa=tuple((f"q{i}", f"a{i}") for i in range(5)),
            sdg_types=frozenset(tags),
        ))


class PromptSpy:
    """Wraps a gateway to record prompts passed to generate()."""

    def __init__(self, gateway):
        self.gateway = gateway
        self.prompts = []
        self.config = gateway.config

    def generate(self, prompt):
        self.prompts.append(prompt)
        return self.gateway.generate(prompt)

    def embed(self, texts):
        return self.gateway.embed(texts)


def test_simulate_renders_participant_count_and_host(store, mock_gateway, catalog):
    _seed(store, [("a", {1}), ("b", {1}), ("c", {1})])
    spy = PromptSpy(mock_gateway(seed=4))
    participants = ParticipantSet(goal=1, members=["a", "b", "c"], scores=[0.9, 0.8, 0.7])
    transcript = simulate(1, participants, spy, store, "preliminary", catalog)
    prompt = spy.prompts[0]
    assert "totaling 3 participants" in prompt
    assert "【SDGs Goal 1. No Poverty】" in prompt
    assert transcript.word_count > 0
    assert transcript.participant_ids == ("a", "b", "c")
    assert transcript.run_metadata.prompt_hash == hashlib.sha256(prompt.encode()).hexdigest()


def test_simulate_persists_transcript(store, mock_gateway, catalog):
    _seed(store, [("a", {2})])
    participants = ParticipantSet(goal=2, members=["a"], scores=[1.0])
    simulate(2, participants, mock_gateway(), store, "preliminary", catalog)
    stored = store.transcripts("preliminary")
    assert len(stored) == 1 and stored[0].goal == 2
    assert stored[0].text


def test_empty_participants_rejected(store, mock_gateway, catalog):
    with pytest.raises(NoCandidates):
        simulate(3, ParticipantSet(goal=3), mock_gateway(), store, "preliminary", catalog)


def test_simulate_all_produces_17_or_records_failures(store, mock_gateway, catalog):
    # Tag coverage for all goals except 14.
    rows = [(f"t{g:02d}", {g}) for g in range(1, 18) if g != 14]
    _seed(store, rows)
    gw = mock_gateway(seed=6)
    index = build_index(store, "preliminary", gw)
    outcome = simulate_all(store, "preliminary", gw, catalog, index)
    assert sum(1 for s in outcome.values() if s == "ok") == 16
    assert outcome[14].startswith("NoCandidates")
    assert len(store.transcripts("preliminary")) == 16


def test_rerun_same_seed_is_byte_identical_and_unique_per_goal(store, mock_gateway, catalog):
    _seed(store, [(f"t{g:02d}", {g}) for g in range(1, 18)])
    gw = mock_gateway(seed=11)
    index = build_index(store, "preliminary", gw)
    simulate_all(store, "preliminary", gw, catalog, index)
    first = {t.goal: t.text for t in store.transcripts("preliminary")}
    simulate_all(store, "preliminary", gw, catalog, index)
    second = {t.goal: t.text for t in store.transcripts("preliminary")}
    assert first == second
    assert len(store.transcripts("preliminary")) == 17  # one row per (dataset, goal)
