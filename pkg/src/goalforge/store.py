"""Single-file SQLite persistence for every pipeline artifact.

The two standard datasets keep the historical table names: annotations live
in ``trans``/``trans2``, roundtable transcripts in ``forum``/``forum2``
(graphs in the adjacent ``*_graph`` tables), and synthesized proposals in
``new_goal``/``new_goal2``. Custom dataset labels get a ``_<label>`` suffix.

One writer at a time (guarded by a lock); readers take point-in-time
snapshots via separate WAL-mode connections.
"""

from __future__ import annotations

import json
import re
import sqlite3
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterator

from .errors import GoalforgeError, IncompatibleVersion
from .models import (
    KgLink,
    KgNode,
    KnowledgeGraph,
    NewGoalProposal,
    RoundtableTranscript,
    RunMetadata,
    SubGoal,
    SubGoalIndicator,
    TalkAnnotation,
    TalkRecord,
)

SCHEMA_VERSION = 1

_SUFFIXES = {"preliminary": "", "formal": "2"}


def dataset_suffix(label: str) -> str:
    if label in _SUFFIXES:
        return _SUFFIXES[label]
    if not re.fullmatch(r"[a-z][a-z0-9_]*", label):
        raise GoalforgeError(f"dataset label {label!r} must be lowercase [a-z0-9_]")
    return f"_{label}"


@dataclass(frozen=True)
class DatasetHandle:
    label: str
    path: Path
    schema_version: int


def _table_ddl(sfx: str) -> list[str]:
    return [
        f"""CREATE TABLE IF NOT EXISTS talks{sfx} (
            video_id TEXT PRIMARY KEY,
            title TEXT NOT NULL,
            published_at TEXT NOT NULL,
            duration INTEGER NOT NULL,
            channel TEXT NOT NULL,
            transcript TEXT,
            usable INTEGER NOT NULL,
            skip_reason TEXT
        )""",
        f"""CREATE TABLE IF NOT EXISTS trans{sfx} (
            video_id TEXT PRIMARY KEY REFERENCES talks{sfx}(video_id),
            title TEXT NOT NULL,
            description TEXT NOT NULL,
            core_value TEXT NOT NULL,
            key_words TEXT NOT NULL,
            qa TEXT NOT NULL,
            sdg_types TEXT NOT NULL,
            model TEXT NOT NULL DEFAULT '',
            seed INTEGER
        )""",
        f"""CREATE TABLE IF NOT EXISTS forum{sfx} (
            goal INTEGER PRIMARY KEY CHECK (goal BETWEEN 1 AND 17),
            participant_ids TEXT NOT NULL,
            text TEXT NOT NULL,
            word_count INTEGER NOT NULL,
            model TEXT NOT NULL,
            seed INTEGER,
            created_at TEXT NOT NULL,
            prompt_hash TEXT NOT NULL
        )""",
        f"""CREATE TABLE IF NOT EXISTS forum{sfx}_graph (
            goal INTEGER PRIMARY KEY REFERENCES forum{sfx}(goal),
            nodes TEXT NOT NULL,
            links TEXT NOT NULL,
            model TEXT NOT NULL,
            seed INTEGER,
            created_at TEXT NOT NULL,
            prompt_hash TEXT NOT NULL,
            repairs TEXT NOT NULL DEFAULT '[]'
        )""",
        f"""CREATE TABLE IF NOT EXISTS new_goal{sfx} (
            number INTEGER PRIMARY KEY CHECK (number >= 18),
            title TEXT NOT NULL,
            sub_goals TEXT NOT NULL,
            source_goals TEXT NOT NULL,
            rationale TEXT NOT NULL,
            seed INTEGER
        )""",
    ]


class _Reader:
    """Read-side queries shared by Store and Snapshot."""

    _conn: sqlite3.Connection

    def _rows(self, sql: str, args: tuple = ()) -> list[sqlite3.Row]:
        cur = self._conn.execute(sql, args)
        return cur.fetchall()

    def talks(self, label: str) -> list[TalkRecord]:
        sfx = dataset_suffix(label)
        return [
            TalkRecord(
                video_id=r["video_id"], title=r["title"], published_at=r["published_at"],
                duration=r["duration"], channel=r["channel"], transcript=r["transcript"],
                usable=bool(r["usable"]), skip_reason=r["skip_reason"],
            )
            for r in self._rows(f"SELECT * FROM talks{sfx} ORDER BY video_id")
        ]

    def talk_count(self, label: str, usable_only: bool = False) -> int:
        sfx = dataset_suffix(label)
        where = " WHERE usable = 1" if usable_only else ""
        return self._rows(f"SELECT COUNT(*) AS c FROM talks{sfx}{where}")[0]["c"]

    def annotations(self, label: str) -> list[TalkAnnotation]:
        sfx = dataset_suffix(label)
        return [
            TalkAnnotation(
                video_id=r["video_id"], title=r["title"], description=r["description"],
                core_value=r["core_value"], key_words=tuple(json.loads(r["key_words"])),
                qa=tuple(tuple(pair) for pair in json.loads(r["qa"])),
                sdg_types=frozenset(json.loads(r["sdg_types"])),
            )
            for r in self._rows(f"SELECT * FROM trans{sfx} ORDER BY video_id")
        ]

    def annotation_count(self, label: str) -> int:
        sfx = dataset_suffix(label)
        return self._rows(f"SELECT COUNT(*) AS c FROM trans{sfx}")[0]["c"]

    def transcripts(self, label: str) -> list[RoundtableTranscript]:
        sfx = dataset_suffix(label)
        return [
            RoundtableTranscript(
                goal=r["goal"], dataset=label,
                participant_ids=tuple(json.loads(r["participant_ids"])),
                text=r["text"], word_count=r["word_count"],
                run_metadata=RunMetadata(r["model"], r["seed"], r["created_at"], r["prompt_hash"]),
            )
            for r in self._rows(f"SELECT * FROM forum{sfx} ORDER BY goal")
        ]

    def transcript(self, label: str, goal: int) -> RoundtableTranscript | None:
        for t in self.transcripts(label):
            if t.goal == goal:
                return t
        return None

    def graphs(self, label: str) -> list[KnowledgeGraph]:
        sfx = dataset_suffix(label)
        out = []
        for r in self._rows(f"SELECT * FROM forum{sfx}_graph ORDER BY goal"):
            nodes = tuple(KgNode(n["id"], n["order"], n["details"]) for n in json.loads(r["nodes"]))
            links = tuple(KgLink(l["source"], l["target"], l["relation"]) for l in json.loads(r["links"]))
            out.append(
                KnowledgeGraph(
                    goal=r["goal"], dataset=label, nodes=nodes, links=links,
                    provenance=RunMetadata(r["model"], r["seed"], r["created_at"], r["prompt_hash"]),
                )
            )
        return out

    def graph_count(self, label: str) -> int:
        sfx = dataset_suffix(label)
        return self._rows(f"SELECT COUNT(*) AS c FROM forum{sfx}_graph")[0]["c"]

    def proposals(self, label: str) -> list[NewGoalProposal]:
        sfx = dataset_suffix(label)
        out = []
        for r in self._rows(f"SELECT * FROM new_goal{sfx} ORDER BY number"):
            subs = tuple(
                SubGoal(
                    code=s["code"], description=s["description"],
                    indicators=tuple(SubGoalIndicator(i["code"], i["description"]) for i in s["indicators"]),
                )
                for s in json.loads(r["sub_goals"])
            )
            out.append(
                NewGoalProposal(
                    number=r["number"], title=r["title"], sub_goals=subs,
                    source_goals=frozenset(json.loads(r["source_goals"])),
                    rationale=r["rationale"],
                )
            )
        return out


class Snapshot(_Reader):
    """Consistent point-in-time read view (open read transaction in WAL mode)."""

    def __init__(self, path: Path):
        self._conn = sqlite3.connect(path, check_same_thread=False)
        self._conn.row_factory = sqlite3.Row
        # BEGIN plus a read pins the WAL snapshot for the transaction's lifetime.
        self._conn.execute("BEGIN")
        self._conn.execute("SELECT COUNT(*) FROM sqlite_schema").fetchone()

    def close(self) -> None:
        self._conn.rollback()
        self._conn.close()

    def __enter__(self) -> "Snapshot":
        return self

    def __exit__(self, *exc: Any) -> None:
        self.close()


class Store(_Reader):
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._conn = sqlite3.connect(self.path, check_same_thread=False)
        self._conn.row_factory = sqlite3.Row
        self._conn.execute("PRAGMA journal_mode=WAL")
        self._conn.execute("PRAGMA foreign_keys=ON")
        self._lock = threading.Lock()
        self._datasets: set[str] = set()

    def close(self) -> None:
        self._conn.close()

    def __enter__(self) -> "Store":
        return self

    def __exit__(self, *exc: Any) -> None:
        self.close()

    # -- schema ------------------------------------------------------------

    def migrate(self, label: str = "preliminary") -> DatasetHandle:
        """Create (or verify) all tables for the dataset. Idempotent."""
        found = self._conn.execute("PRAGMA user_version").fetchone()[0]
        if found > SCHEMA_VERSION:
            raise IncompatibleVersion(found, SCHEMA_VERSION)
        sfx = dataset_suffix(label)
        with self._lock, self._conn:
            for ddl in _table_ddl(sfx):
                self._conn.execute(ddl)
            self._conn.execute(f"PRAGMA user_version = {SCHEMA_VERSION}")
        self._datasets.add(label)
        return DatasetHandle(label=label, path=self.path, schema_version=SCHEMA_VERSION)

    def _ensure(self, label: str) -> str:
        if label not in self._datasets:
            self.migrate(label)
        return dataset_suffix(label)

    # -- writes (single-writer) ---------------------------------------------

    def put_talk(self, label: str, rec: TalkRecord) -> None:
        sfx = self._ensure(label)
        with self._lock, self._conn:
            self._conn.execute(
                f"INSERT OR REPLACE INTO talks{sfx} VALUES (?,?,?,?,?,?,?,?)",
                (rec.video_id, rec.title, rec.published_at, rec.duration,
                 rec.channel, rec.transcript, int(rec.usable), rec.skip_reason),
            )

    def demote_talk(self, label: str, video_id: str, reason: str) -> None:
        sfx = self._ensure(label)
        with self._lock, self._conn:
            self._conn.execute(
                f"UPDATE talks{sfx} SET usable = 0, skip_reason = ? WHERE video_id = ?",
                (reason, video_id),
            )

    def put_annotation(self, label: str, ann: TalkAnnotation, model: str = "", seed: int | None = None) -> None:
        sfx = self._ensure(label)
        row = self._conn.execute(
            f"SELECT 1 FROM talks{sfx} WHERE video_id = ?", (ann.video_id,)
        ).fetchone()
        if row is None:
            raise GoalforgeError(f"annotation references unknown talk {ann.video_id!r}")
        with self._lock, self._conn:
            self._conn.execute(
                f"INSERT OR REPLACE INTO trans{sfx} VALUES (?,?,?,?,?,?,?,?,?)",
                (ann.video_id, ann.title, ann.description, ann.core_value,
                 json.dumps(list(ann.key_words)), json.dumps([list(p) for p in ann.qa]),
                 json.dumps(sorted(ann.sdg_types)), model, seed),
            )

    def put_transcript(self, label: str, t: RoundtableTranscript) -> None:
        sfx = self._ensure(label)
        meta = t.run_metadata
        with self._lock, self._conn:
            self._conn.execute(
                f"INSERT OR REPLACE INTO forum{sfx} VALUES (?,?,?,?,?,?,?,?)",
                (t.goal, json.dumps(list(t.participant_ids)), t.text, t.word_count,
                 meta.model, meta.seed, meta.timestamp, meta.prompt_hash),
            )

    def put_graph(self, label: str, g: KnowledgeGraph, repairs: list[dict] | None = None) -> None:
        sfx = self._ensure(label)
        if self._conn.execute(f"SELECT 1 FROM forum{sfx} WHERE goal = ?", (g.goal,)).fetchone() is None:
            raise GoalforgeError(f"graph for goal {g.goal} has no stored transcript")
        meta = g.provenance
        with self._lock, self._conn:
            self._conn.execute(
                f"INSERT OR REPLACE INTO forum{sfx}_graph VALUES (?,?,?,?,?,?,?,?)",
                (g.goal,
                 json.dumps([{"id": n.id, "order": n.order, "details": n.details} for n in g.nodes]),
                 json.dumps([{"source": l.source, "target": l.target, "relation": l.relation} for l in g.links]),
                 meta.model, meta.seed, meta.timestamp, meta.prompt_hash,
                 json.dumps(repairs or [])),
            )

    def put_proposal(self, label: str, p: NewGoalProposal, seed: int | None = None) -> None:
        sfx = self._ensure(label)
        have = {r["goal"] for r in self._rows(f"SELECT goal FROM forum{sfx}_graph")}
        missing = sorted(set(p.source_goals) - have)
        if missing:
            raise GoalforgeError(f"proposal {p.number} references goals without graphs: {missing}")
        with self._lock, self._conn:
            self._conn.execute(
                f"INSERT OR REPLACE INTO new_goal{sfx} VALUES (?,?,?,?,?,?)",
                (p.number, p.title,
                 json.dumps([
                     {"code": s.code, "description": s.description,
                      "indicators": [{"code": i.code, "description": i.description} for i in s.indicators]}
                     for s in p.sub_goals
                 ]),
                 json.dumps(sorted(p.source_goals)), p.rationale, seed),
            )

    def clear_dataset(self, label: str) -> None:
        sfx = self._ensure(label)
        with self._lock, self._conn:
            for table in (f"new_goal{sfx}", f"forum{sfx}_graph", f"forum{sfx}",
                          f"trans{sfx}", f"talks{sfx}"):
                self._conn.execute(f"DELETE FROM {table}")

    # -- reads --------------------------------------------------------------

    def snapshot(self, label: str) -> Snapshot:
        self._ensure(label)
        # Make sure committed data is visible to the snapshot connection.
        self._conn.execute("PRAGMA wal_checkpoint(PASSIVE)")
        return Snapshot(self.path)

    def iter_usable_talks(self, label: str) -> Iterator[TalkRecord]:
        for t in self.talks(label):
            if t.usable:
                yield t
