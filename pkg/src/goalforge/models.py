"""Domain records passed between pipeline stages."""

from __future__ import annotations

from dataclasses import dataclass, field

SKIP_REASONS = (
    "NoTranscript",
    "MemberOnly",
    "NonEnglish",
    "OutOfWindow",
    "BadDuration",
    "AnnotationFailed",
    "SafetyBlocked",
)

DURATION_MIN_S = 240
DURATION_MAX_S = 1200


@dataclass
class TalkRecord:
    video_id: str
    title: str
    published_at: str  # ISO-8601 UTC
    duration: int  # seconds
    channel: str
    transcript: str | None = None
    usable: bool = False
    skip_reason: str | None = None

    def validate(self) -> None:
        if self.usable:
            assert self.transcript, "usable talk must carry a transcript"
            assert DURATION_MIN_S <= self.duration <= DURATION_MAX_S


@dataclass(frozen=True)
class CorpusWindow:
    start: str  # inclusive date, YYYY-MM-DD
    end: str  # inclusive date
    label: str = "custom"

    def __post_init__(self) -> None:
        if not self.start < self.end:
            raise ValueError(f"window start {self.start} must precede end {self.end}")

    def contains(self, published_at: str) -> bool:
        day = published_at[:10]
        return self.start <= day <= self.end


PRELIMINARY_WINDOW = CorpusWindow("2023-01-01", "2023-12-31", "preliminary")
FORMAL_WINDOW = CorpusWindow("2020-01-01", "2024-04-30", "formal")

DATASET_WINDOWS = {"preliminary": PRELIMINARY_WINDOW, "formal": FORMAL_WINDOW}


@dataclass(frozen=True)
class TalkAnnotation:
    video_id: str
    title: str
    description: str
    core_value: str
    key_words: tuple[str, ...]
    qa: tuple[tuple[str, str], ...]  # exactly 5 (question, answer) pairs
    sdg_types: frozenset[int]

    def embedding_text(self) -> str:
        return "\n".join([self.title, self.description, self.core_value, ", ".join(self.key_words)])


@dataclass(frozen=True)
class RunMetadata:
    model: str
    seed: int | None
    timestamp: str
    prompt_hash: str


@dataclass(frozen=True)
class RoundtableTranscript:
    goal: int
    dataset: str
    participant_ids: tuple[str, ...]
    text: str
    word_count: int
    run_metadata: RunMetadata


@dataclass(frozen=True)
class KgNode:
    id: str
    order: int
    details: str = ""


@dataclass(frozen=True)
class KgLink:
    source: str
    target: str
    relation: str = ""


@dataclass(frozen=True)
class KnowledgeGraph:
    goal: int
    dataset: str
    nodes: tuple[KgNode, ...]
    links: tuple[KgLink, ...]
    provenance: RunMetadata

    def node_ids(self) -> set[str]:
        return {n.id for n in self.nodes}


@dataclass(frozen=True)
class SubGoalIndicator:
    code: str
    description: str


@dataclass(frozen=True)
class SubGoal:
    code: str
    description: str
    indicators: tuple[SubGoalIndicator, ...]


@dataclass(frozen=True)
class NewGoalProposal:
    number: int
    title: str
    sub_goals: tuple[SubGoal, ...]
    source_goals: frozenset[int]
    rationale: str


@dataclass
class ParticipantSet:
    goal: int
    members: list[str] = field(default_factory=list)
    scores: list[float] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.members)

    def __bool__(self) -> bool:
        return bool(self.members)
