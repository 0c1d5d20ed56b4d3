"""Embedding index over annotations and roundtable participant selection.

The corpus tops out around ~1200 talks, so similarity search is an exact
scan over unit vectors; no approximate index is warranted.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .catalog import Catalog
from .errors import EmptyDataset, NoCandidates
from .gateway import Gateway
from .models import ParticipantSet
from .store import Store

log = logging.getLogger(__name__)


@dataclass
class EmbeddingIndex:
    ids: list[str]
    vectors: np.ndarray  # one unit row per id
    dimension: int
    model: str = ""
    seed: int | None = None

    def vector(self, video_id: str) -> np.ndarray:
        return self.vectors[self.ids.index(video_id)]

    def save(self, directory: str | Path, label: str) -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        np.save(directory / f"{label}_vectors.npy", self.vectors)
        manifest = {
            "dimension": self.dimension,
            "model": self.model,
            "seed": self.seed,
            "ids": self.ids,
        }
        path = directory / f"{label}_index.json"
        path.write_text(json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8")
        return path

    @classmethod
    def load(cls, directory: str | Path, label: str) -> "EmbeddingIndex":
        directory = Path(directory)
        manifest = json.loads((directory / f"{label}_index.json").read_text(encoding="utf-8"))
        vectors = np.load(directory / f"{label}_vectors.npy")
        return cls(
            ids=manifest["ids"], vectors=vectors, dimension=manifest["dimension"],
            model=manifest["model"], seed=manifest["seed"],
        )


def build_index(store: Store, label: str, gateway: Gateway) -> EmbeddingIndex:
    """Embed every annotated talk (title + description + core value +
    keywords as one document per talk; no chunking)."""
    annotations = store.annotations(label)
    if not annotations:
        raise EmptyDataset(f"no annotations for dataset {label!r}")
    ids = [a.video_id for a in annotations]
    vectors = gateway.embed([a.embedding_text() for a in annotations])
    return EmbeddingIndex(
        ids=ids,
        vectors=vectors,
        dimension=vectors.shape[1],
        model=gateway.config.embedding_model,
        seed=gateway.config.seed,
    )


def goal_profile_text(catalog: Catalog, goal: int) -> str:
    g = catalog.goal(goal)
    parts = [g.title]
    parts.extend(t.description for t in g.targets)
    parts.append(", ".join(g.keywords))
    return "\n".join(p for p in parts if p)


def select_participants(
    goal: int,
    index: EmbeddingIndex,
    catalog: Catalog,
    cap: int,
    store: Store,
    label: str,
    gateway: Gateway,
) -> ParticipantSet:
    """Talks tagged with the goal, ranked by cosine similarity to the goal
    profile, truncated to cap. Exact score ties break on video_id ascending."""
    if not 1 <= goal <= 17:
        raise ValueError(f"goal {goal} outside 1..17")
    tagged = [a.video_id for a in store.annotations(label) if goal in a.sdg_types]
    if not tagged:
        raise NoCandidates(goal)
    profile = gateway.embed([goal_profile_text(catalog, goal)])[0]

    pos = {vid: i for i, vid in enumerate(index.ids)}
    scored = []
    for vid in tagged:
        if vid not in pos:
            log.warning("talk %s tagged with goal %d but missing from index; skipped", vid, goal)
            continue
        scored.append((float(index.vectors[pos[vid]] @ profile), vid))
    if not scored:
        raise NoCandidates(goal)
    scored.sort(key=lambda pair: (-pair[0], pair[1]))
    scored = scored[:cap]
    return ParticipantSet(goal=goal, members=[vid for _, vid in scored], scores=[s for s, _ in scored])
