"""Talk acquisition: metadata listing, transcript retrieval, corpus summary.

Two interchangeable sources: a fixture directory (one ``<video_id>.json``
metadata document plus one ``<video_id>.txt`` transcript per video) for
deterministic offline runs, and the live video-platform API. Per-video
availability problems (member-only, missing captions) never raise; they mark
the record unusable with a skip reason.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

from .errors import AuthError, NetworkError, ParseError
from .gateway import RateLimiter
from .models import DURATION_MAX_S, DURATION_MIN_S, CorpusWindow, TalkRecord
from .store import Store

log = logging.getLogger(__name__)


@dataclass
class CorpusSummary:
    collected: int = 0
    usable: int = 0
    skipped_by_reason: dict[str, int] = field(default_factory=dict)


class TalkSource(Protocol):
    def list_videos(self, channel: str, window: CorpusWindow, page_limit: int) -> list[dict]: ...

    def fetch_transcript(self, video_id: str) -> tuple[str | None, str | None]:
        """Returns (transcript, skip_reason); exactly one side is set."""
        ...


class FixtureSource:
    """Record/replay source over a fixture directory keyed by video_id."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        if not self.root.is_dir():
            raise ParseError(f"fixture directory {self.root} does not exist")

    def list_videos(self, channel: str, window: CorpusWindow, page_limit: int) -> list[dict]:
        out = []
        for meta_path in sorted(self.root.glob("*.json")):
            try:
                meta = json.loads(meta_path.read_text(encoding="utf-8"))
            except json.JSONDecodeError as exc:
                raise ParseError(f"bad metadata document {meta_path.name}: {exc}")
            if channel and meta.get("channel") != channel:
                continue
            if not window.contains(meta.get("published_at", "")):
                continue
            out.append(meta)
            if page_limit and len(out) >= page_limit * 50:
                break
        return out

    def fetch_transcript(self, video_id: str) -> tuple[str | None, str | None]:
        meta_path = self.root / f"{video_id}.json"
        if meta_path.exists():
            meta = json.loads(meta_path.read_text(encoding="utf-8"))
            if meta.get("member_only"):
                return None, "MemberOnly"
            if not meta.get("has_captions", True):
                return None, "NoTranscript"
        txt = self.root / f"{video_id}.txt"
        if not txt.exists():
            return None, "NoTranscript"
        text = txt.read_text(encoding="utf-8")
        if not text.strip():
            return None, "NoTranscript"
        return text, None


class YouTubeSource:
    """Live listing via the platform REST API; transcripts via the
    youtube-transcript-api package (optional dependency)."""

    API = "https://www.googleapis.com/youtube/v3"

    def __init__(self, api_key: str):
        if not api_key:
            raise AuthError("an API key is required for live ingestion")
        self.api_key = api_key

    def _get(self, endpoint: str, **params) -> dict:
        import httpx

        params["key"] = self.api_key
        try:
            resp = httpx.get(f"{self.API}/{endpoint}", params=params, timeout=30.0)
        except httpx.HTTPError as exc:
            raise NetworkError(str(exc)) from exc
        if resp.status_code in (401, 403):
            body = resp.text
            if "quota" in body.lower():
                from .errors import QuotaExceeded

                raise QuotaExceeded(retry_after=float(resp.headers.get("retry-after", 0)) or None)
            raise AuthError(f"API rejected the request ({resp.status_code})")
        if resp.status_code != 200:
            raise NetworkError(f"API error {resp.status_code}")
        return resp.json()

    def list_videos(self, channel: str, window: CorpusWindow, page_limit: int) -> list[dict]:
        videos: list[dict] = []
        page_token = None
        for _ in range(max(1, page_limit)):
            params = dict(
                part="id", channelId=channel, type="video", videoDuration="medium",
                maxResults=50, order="date",
                publishedAfter=f"{window.start}T00:00:00Z",
                publishedBefore=f"{window.end}T23:59:59Z",
            )
            if page_token:
                params["pageToken"] = page_token
            page = self._get("search", **params)
            ids = [item["id"]["videoId"] for item in page.get("items", [])]
            if ids:
                detail = self._get("videos", part="snippet,contentDetails", id=",".join(ids))
                for item in detail.get("items", []):
                    videos.append({
                        "video_id": item["id"],
                        "title": item["snippet"]["title"],
                        "published_at": item["snippet"]["publishedAt"],
                        "duration": _parse_iso8601_duration(item["contentDetails"]["duration"]),
                        "channel": channel,
                        "language": item["snippet"].get("defaultAudioLanguage", "en"),
                    })
            page_token = page.get("nextPageToken")
            if not page_token:
                break
        return videos

    def fetch_transcript(self, video_id: str) -> tuple[str | None, str | None]:
        try:
            from youtube_transcript_api import YouTubeTranscriptApi
            from youtube_transcript_api._errors import NoTranscriptFound, TranscriptsDisabled
        except ImportError as exc:
            raise AuthError(
                "live transcript fetching needs the 'live' extra (pip install goalforge[live])"
            ) from exc
        try:
            segments = YouTubeTranscriptApi.get_transcript(video_id, languages=["en"])
        except (NoTranscriptFound, TranscriptsDisabled):
            return None, "NoTranscript"
        except Exception as exc:  # member-only fetches surface as generic failures
            if "members" in str(exc).lower():
                return None, "MemberOnly"
            return None, "NoTranscript"
        return " ".join(seg["text"] for seg in segments), None


def _parse_iso8601_duration(value: str) -> int:
    import re

    match = re.fullmatch(r"PT(?:(\d+)H)?(?:(\d+)M)?(?:(\d+)S)?", value)
    if not match:
        return 0
    h, m, s = (int(g) if g else 0 for g in match.groups())
    return h * 3600 + m * 60 + s


def _record_from_meta(meta: dict, window: CorpusWindow) -> TalkRecord:
    rec = TalkRecord(
        video_id=meta["video_id"],
        title=meta.get("title", ""),
        published_at=meta.get("published_at", ""),
        duration=int(meta.get("duration", 0)),
        channel=meta.get("channel", ""),
    )
    if not (DURATION_MIN_S <= rec.duration <= DURATION_MAX_S):
        rec.usable = False
        rec.skip_reason = "BadDuration"
    elif not str(meta.get("language", "en")).lower().startswith("en"):
        rec.usable = False
        rec.skip_reason = "NonEnglish"
    return rec


def fetch_metadata(
    source: TalkSource, channel: str, window: CorpusWindow, page_limit: int = 20
) -> list[TalkRecord]:
    """Window-filtered metadata records; no transcripts attached yet.
    Out-of-range durations and non-English caption tracks are kept but marked
    unusable."""
    records = [_record_from_meta(meta, window) for meta in source.list_videos(channel, window, page_limit)]
    return [r for r in records if window.contains(r.published_at)]


def fetch_transcript(source: TalkSource, record: TalkRecord) -> TalkRecord:
    """Attach the transcript or set a skip reason. Records already skipped at
    metadata time pass through unchanged."""
    if record.skip_reason is not None:
        return record
    text, reason = source.fetch_transcript(record.video_id)
    if text:
        record.transcript = text
        record.usable = True
    else:
        record.usable = False
        record.skip_reason = reason or "NoTranscript"
    return record


def ingest_corpus(
    store: Store,
    label: str,
    source: TalkSource,
    window: CorpusWindow,
    channel: str = "",
    page_limit: int = 100,
    max_workers: int = 8,
    rate_limiter: RateLimiter | None = None,
) -> CorpusSummary:
    """Fetch metadata and transcripts for the window and persist every record.
    Transcript fetches run in parallel; the store is written by this single
    consumer thread. Re-running over unchanged fixtures is idempotent."""
    store.migrate(label)
    records = fetch_metadata(source, channel, window, page_limit)

    def fetch(rec: TalkRecord) -> TalkRecord:
        if rate_limiter is not None:
            rate_limiter.acquire()
        return fetch_transcript(source, rec)

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        completed = list(pool.map(fetch, records))
    for rec in completed:
        rec.validate()
        store.put_talk(label, rec)
    summary = build_corpus(store, label)
    log.info("ingested %s: %d collected, %d usable", label, summary.collected, summary.usable)
    return summary


def build_corpus(store: Store, label: str) -> CorpusSummary:
    """Summary of the stored corpus for a dataset label."""
    summary = CorpusSummary()
    for rec in store.talks(label):
        summary.collected += 1
        if rec.usable:
            summary.usable += 1
        elif rec.skip_reason:
            summary.skipped_by_reason[rec.skip_reason] = summary.skipped_by_reason.get(rec.skip_reason, 0) + 1
    return summary
