"""Simulated roundtable generation: one transcript per goal, with the goal as
moderator and selected talks as participants."""

from __future__ import annotations

import logging
from datetime import datetime, timezone

from .catalog import Catalog
from .errors import NoCandidates, ProviderError, SafetyBlocked
from .gateway import Gateway, load_template, prompt_hash, render
from .models import ParticipantSet, RoundtableTranscript, RunMetadata
from .retrieval import EmbeddingIndex, select_participants
from .store import Store

log = logging.getLogger(__name__)

# The prompt asks for this length; deviations are logged, never enforced.
TARGET_WORD_COUNT = 8500


def participant_block(store: Store, label: str, participants: ParticipantSet) -> str:
    """Numbered annotation blocks for the kg_box slot."""
    by_id = {a.video_id: a for a in store.annotations(label)}
    blocks = []
    for i, vid in enumerate(participants.members, start=1):
        ann = by_id[vid]
        qa_lines = "\n".join(f"   Q: {q}\n   A: {a}" for q, a in ann.qa)
        blocks.append(
            f"{i}. {ann.title}\n"
            f"   Description: {ann.description}\n"
            f"   Core value: {ann.core_value}\n"
            f"   Key words: {', '.join(ann.key_words)}\n"
            f"{qa_lines}"
        )
    return "\n\n".join(blocks)


def goal_background(catalog: Catalog, goal: int) -> str:
    """Forum background for the bg_box slot: title, targets, keywords."""
    g = catalog.goal(goal)
    lines = [f"Goal {g.number}: {g.title}"]
    for t in g.targets:
        lines.append(f"Target {t.code}: {t.description}")
    lines.append("Keywords: " + ", ".join(g.keywords))
    return "\n".join(lines)


def simulate(
    goal: int,
    participants: ParticipantSet,
    gateway: Gateway,
    store: Store,
    label: str,
    catalog: Catalog,
) -> RoundtableTranscript:
    if not participants:
        raise NoCandidates(goal)
    template = load_template("roundtable")
    prompt = render(template, {
        "type": catalog.goal(goal).label(),
        "n": str(len(participants)),
        "kg_box": "\n\nkg_box:\n" + participant_block(store, label, participants),
        "bg_box": "\n\nbg_box (forum_background):\n" + goal_background(catalog, goal),
    })
    text = gateway.generate(prompt)
    word_count = len(text.split())
    if abs(word_count - TARGET_WORD_COUNT) > TARGET_WORD_COUNT * 0.2:
        log.info("goal %d transcript is %d words (target %d)", goal, word_count, TARGET_WORD_COUNT)
    transcript = RoundtableTranscript(
        goal=goal,
        dataset=label,
        participant_ids=tuple(participants.members),
        text=text,
        word_count=word_count,
        run_metadata=RunMetadata(
            model=gateway.config.generation_model,
            seed=gateway.config.seed,
            timestamp=datetime.now(timezone.utc).isoformat(),
            prompt_hash=prompt_hash(prompt),
        ),
    )
    store.put_transcript(label, transcript)
    return transcript


def simulate_all(
    store: Store,
    label: str,
    gateway: Gateway,
    catalog: Catalog,
    index: EmbeddingIndex,
    cap: int = 25,
    goals: list[int] | None = None,
) -> dict[int, str]:
    """One transcript per goal; per-goal failures are recorded and never abort
    the batch. Returns goal -> "ok" or the failure reason."""
    outcome: dict[int, str] = {}
    for goal in goals or range(1, 18):
        try:
            participants = select_participants(goal, index, catalog, cap, store, label, gateway)
            simulate(goal, participants, gateway, store, label, catalog)
            outcome[goal] = "ok"
        except NoCandidates as exc:
            outcome[goal] = f"NoCandidates: {exc}"
        except SafetyBlocked as exc:
            outcome[goal] = f"SafetyBlocked: {exc}"
        except ProviderError as exc:
            outcome[goal] = f"ProviderError: {exc}"
    failures = {g: r for g, r in outcome.items() if r != "ok"}
    if failures:
        log.warning("simulation failures: %s", failures)
    return outcome
