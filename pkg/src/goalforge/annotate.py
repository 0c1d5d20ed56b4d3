"""Talk annotation: summary, core value, keywords, five Q&A pairs, and goal
tags for every usable talk, with one corrective re-prompt on schema failures.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .catalog import Catalog
from .errors import AnnotationFailed, SafetyBlocked, SchemaViolation, Unparseable
from .gateway import Gateway, load_template, render
from .models import TalkAnnotation, TalkRecord
from .store import Store
from .structured import parse_structured

log = logging.getLogger(__name__)

_CORRECTIVE_SUFFIX = (
    "\n\nYour previous response could not be used ({reason}). Respond again with a "
    "single JSON document containing exactly these fields: title, description, "
    "core_value, key_words (non-empty list), qa (exactly 5 question/answer "
    "objects), sdg_types (integers 1-17)."
)


def _annotation_prompt(record: TalkRecord) -> str:
    template = load_template("annotate")
    payload = f"\n\ntedtalk_data:\nTitle: {record.title}\nTranscript:\n{record.transcript}"
    return render(template, {"tedtalk_data": payload})


def annotate_talk(record: TalkRecord, gateway: Gateway, catalog: Catalog) -> TalkAnnotation:
    """One annotation attempt plus at most one corrective re-prompt. Tagging
    context is the transcript alone; catalog keywords are deliberately kept
    out of the prompt."""
    if not record.usable or not record.transcript:
        raise ValueError(f"talk {record.video_id} is not usable")
    prompt = _annotation_prompt(record)
    raw = gateway.generate(prompt)
    try:
        doc = parse_structured(raw, "AnnotationDoc")
    except (SchemaViolation, Unparseable) as first:
        log.info("annotation for %s invalid (%s); issuing corrective re-prompt", record.video_id, first)
        raw = gateway.generate(prompt + _CORRECTIVE_SUFFIX.format(reason=first))
        try:
            doc = parse_structured(raw, "AnnotationDoc")
        except (SchemaViolation, Unparseable) as second:
            raise AnnotationFailed(record.video_id, str(second)) from second

    known = set(catalog.change_counts())
    tags = frozenset(t for t in doc["sdg_types"] if t in known)
    if not tags:
        raise AnnotationFailed(record.video_id, "no valid goal tags")
    return TalkAnnotation(
        video_id=record.video_id,
        title=doc["title"],
        description=doc["description"],
        core_value=doc["core_value"],
        key_words=tuple(doc["key_words"]),
        qa=tuple(doc["qa"]),
        sdg_types=tags,
    )


@dataclass
class AnnotateReport:
    annotated: int = 0
    failed: int = 0
    blocked: int = 0
    failures: dict[str, str] = field(default_factory=dict)


def annotate_dataset(
    store: Store,
    label: str,
    gateway: Gateway,
    catalog: Catalog,
    max_workers: int = 8,
) -> AnnotateReport:
    """Annotate every usable talk. Talks whose annotation fails twice (or is
    safety-blocked) are demoted to unusable; the batch never aborts."""
    report = AnnotateReport()
    talks = [t for t in store.talks(label) if t.usable]

    def work(rec: TalkRecord):
        try:
            return rec, annotate_talk(rec, gateway, catalog), None
        except (AnnotationFailed, SafetyBlocked) as exc:
            return rec, None, exc

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        results = list(pool.map(work, talks))
    for rec, ann, exc in results:
        if ann is not None:
            store.put_annotation(label, ann, model=gateway.config.generation_model, seed=gateway.config.seed)
            report.annotated += 1
        else:
            reason = "SafetyBlocked" if isinstance(exc, SafetyBlocked) else "AnnotationFailed"
            store.demote_talk(label, rec.video_id, reason)
            report.failures[rec.video_id] = str(exc)
            if reason == "SafetyBlocked":
                report.blocked += 1
            else:
                report.failed += 1
    return report


@dataclass
class TagStats:
    talks: int
    total_tags: int
    mean_tags_per_talk: float
    per_goal_counts: dict[int, int]


def tag_statistics(store: Store, label: str) -> TagStats:
    """Talk-level tag presence counts for the dataset."""
    from .errors import EmptyDataset

    annotations = store.annotations(label)
    if not annotations:
        raise EmptyDataset(f"no annotations for dataset {label!r}")
    per_goal = {n: 0 for n in range(1, 18)}
    total = 0
    for ann in annotations:
        total += len(ann.sdg_types)
        for g in ann.sdg_types:
            per_goal[g] += 1
    return TagStats(
        talks=len(annotations),
        total_tags=total,
        mean_tags_per_talk=total / len(annotations),
        per_goal_counts=per_goal,
    )
