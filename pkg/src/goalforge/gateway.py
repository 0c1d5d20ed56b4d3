"""Provider-agnostic text generation and embedding.

The four prompt templates ship as resource files under ``prompts/`` and are
rendered by exact slot substitution, so stored bytes are the single source
of truth. The mock provider derives every output from a hash of
(seed, model, prompt), which makes full pipeline runs reproducible without
credentials.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import threading
import time
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Protocol, Sequence

import numpy as np

from .catalog import Catalog, load_default_catalog
from .errors import (
    AuthError,
    MissingSlot,
    NetworkError,
    ProviderError,
    QuotaExceeded,
    SafetyBlocked,
    TransientProviderError,
    UnknownSlot,
)

TEMPLATE_NAMES = ("annotate", "roundtable", "kg_extract", "new_goals")

_SLOT_RE = re.compile(r"\{([a-z_]+)\}")

MOCK_EMBED_DIM = 64

# Prompts containing this marker simulate a provider-side safety refusal.
SAFETY_MARKER = "[[blocked-content]]"


@dataclass(frozen=True)
class PromptTemplate:
    name: str
    body: str
    slots: frozenset[str]


@lru_cache(maxsize=None)
def load_template(name: str) -> PromptTemplate:
    if name not in TEMPLATE_NAMES:
        raise ValueError(f"unknown template {name!r}; expected one of {TEMPLATE_NAMES}")
    body = resources.files("goalforge").joinpath("prompts", f"{name}.txt").read_text(encoding="utf-8")
    return PromptTemplate(name=name, body=body, slots=frozenset(_SLOT_RE.findall(body)))


def render(template: PromptTemplate, slots: dict[str, str]) -> str:
    """Replace every declared slot exactly once; strict about coverage."""
    for name in slots:
        if name not in template.slots:
            raise UnknownSlot(name)
    for name in template.slots:
        if name not in slots:
            raise MissingSlot(name)
    return _SLOT_RE.sub(lambda m: slots[m.group(1)], template.body)


def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


@dataclass
class ProviderConfig:
    generation_model: str = "gemini-1.5-pro-latest"
    embedding_model: str = "text-embedding-004"
    max_retries: int = 3
    timeout: float = 60.0
    seed: int | None = None  # mock only
    backoff_base: float = 0.5

    def __post_init__(self) -> None:
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")


class Provider(Protocol):
    def generate(self, prompt: str, config: ProviderConfig) -> str: ...

    def embed(self, texts: Sequence[str], config: ProviderConfig) -> np.ndarray: ...


# --------------------------------------------------------------------------
# Mock provider
# --------------------------------------------------------------------------

_TOPIC_BANK = [
    "community resilience", "open data", "green infrastructure", "civic trust",
    "digital literacy", "local economies", "public health", "clean technology",
    "inclusive finance", "circular design", "youth leadership", "global cooperation",
]

_CONCEPT_BANK = [
    "White Paper", "Implementation Strategies", "Community Engagement",
    "Policy Frameworks", "Individual Action", "Global Collaboration",
    "Education and Awareness", "Innovation", "Sustainable Living",
    "Progress Measurement", "Funding Mechanisms", "Grassroots Movements",
    "Technology Access", "Data Transparency", "Local Partnerships",
    "Behavioral Change", "Long-term Vision", "Ethical Imperative",
    "Resource Sharing", "Capacity Building", "Public Awareness Campaigns",
    "Cross-sector Alliances", "Measurable Targets", "Systemic Change",
]

_QUESTION_FORMS = [
    "How can {t} close the gap highlighted in the talk?",
    "What role should institutions play in advancing {t}?",
    "Which barriers keep communities from adopting {t}?",
    "How might {t} change outcomes within a decade?",
    "What evidence supports investing in {t} first?",
]

_ANSWER_FORMS = [
    "The speaker argues that {t} succeeds when people closest to the problem lead the response.",
    "Scaling {t} requires patient funding and honest measurement of what works.",
    "Progress on {t} stalls without trust, so transparency must come first.",
    "Pilot programs show {t} spreading fastest where local ownership is strongest.",
    "Pairing {t} with education multiplies its long-term impact.",
]

_NEW_GOAL_TITLES = [
    "Inclusive Well-being", "Shared Prosperity", "Resilient Communities",
    "Equitable Innovation", "Collaborative Stewardship", "Universal Opportunity",
    "Just Transitions", "Connected Societies",
]


def _seed_int(*parts: object) -> int:
    digest = hashlib.sha256("|".join(str(p) for p in parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


class MockProvider:
    """Seed-deterministic provider assembling schema-valid documents.

    Output is a pure function of (seed, model id, prompt). Annotation tags are
    derived from catalog keywords found in the prompt payload, so fixture
    transcripts can be authored to produce known tag sets.
    """

    def __init__(self, catalog: Catalog | None = None):
        self._catalog = catalog

    @property
    def catalog(self) -> Catalog:
        if self._catalog is None:
            self._catalog = load_default_catalog()
        return self._catalog

    # -- generation ---------------------------------------------------------

    def generate(self, prompt: str, config: ProviderConfig) -> str:
        if SAFETY_MARKER in prompt:
            raise SafetyBlocked("prompt content triggered the mock safety filter")
        import random

        rng = random.Random(_seed_int(config.seed or 0, config.generation_model, prompt))
        if "TED Talk summarization expert" in prompt:
            return self._annotation_response(rng, prompt)
        if "You are a roundtable expert" in prompt:
            return self._roundtable_response(rng, prompt)
        if "knowledge graph construction expert" in prompt:
            return self._kg_response(rng, prompt)
        if "simulate the generation of new SDGs goals" in prompt:
            return self._new_goals_response(rng, prompt)
        words = [rng.choice(_TOPIC_BANK) for _ in range(12)]
        return "Considering the request, key themes are: " + ", ".join(words) + "."

    def _payload(self, prompt: str, anchor: str) -> str:
        idx = prompt.find(anchor)
        return prompt[idx + len(anchor):] if idx >= 0 else prompt

    def _matched_goals(self, text: str) -> list[int]:
        lowered = text.lower()
        hits: set[int] = set()
        for kw, goals in self.catalog.keyword_goals().items():
            if re.search(r"(?<!\w)" + re.escape(kw) + r"(?!\w)", lowered):
                hits.update(goals)
        return sorted(hits)

    def _annotation_response(self, rng, prompt: str) -> str:
        payload = self._payload(prompt, "Respond in English!")
        title_match = re.search(r"Title:\s*(.+)", payload)
        title = title_match.group(1).strip() if title_match else f"A talk on {rng.choice(_TOPIC_BANK)}"
        goals = self._matched_goals(payload)
        if not goals:
            goals = sorted(rng.sample(range(1, 18), rng.randint(1, 3)))
        keywords = [kw for kw, gs in self.catalog.keyword_goals().items()
                    if gs & set(goals) and re.search(r"(?<!\w)" + re.escape(kw) + r"(?!\w)", payload.lower())]
        if not keywords:
            keywords = rng.sample(_TOPIC_BANK, 3)
        topics = [rng.choice(_TOPIC_BANK) for _ in range(5)]
        doc = {
            "title": title,
            "description": f"The speaker walks through {topics[0]} and connects it to {topics[1]}, "
                           f"closing with a call to rethink {topics[2]}.",
            "core_value": f"Durable change comes from pairing {topics[3]} with {topics[4]}.",
            "key_words": keywords[:8],
            "qa": [
                {"question": _QUESTION_FORMS[i].format(t=topics[i % len(topics)]),
                 "answer": _ANSWER_FORMS[i].format(t=topics[(i + 1) % len(topics)])}
                for i in range(5)
            ],
            "sdg_types": goals,
        }
        return ("Here is the extracted summary.\n\n```json\n"
                + json.dumps(doc, indent=2, ensure_ascii=False)
                + "\n```\nLet me know if anything needs refinement.")

    def _roundtable_response(self, rng, prompt: str) -> str:
        host_match = re.search(r"【SDGs Goal ([^】]+)】", prompt)
        host = host_match.group(1) if host_match else "1"
        n_match = re.search(r"totaling (\d+) participants", prompt)
        n = int(n_match.group(1)) if n_match else 3
        lines = [
            f"Moderator (SDGs Goal {host}): Welcome everyone. Today we draft a white paper on the core "
            f"values of Goal {host}, focused on implementation and innovation.",
        ]
        for i in range(1, n + 1):
            t = rng.choice(_TOPIC_BANK)
            lines.append(
                f"Participant {i}: Speaking from my talk, I believe {t} is where we start. "
                f"{rng.choice(_ANSWER_FORMS).format(t=t)}"
            )
            if i % 4 == 0:
                lines.append(
                    "Facilitator: Could we make that concrete? What can individuals do this year, "
                    "and what requires cooperation between governments and international bodies?"
                )
        closing = rng.choice(_TOPIC_BANK)
        lines.append(
            f"Facilitator: Let us converge. The clear conclusion: anchor the white paper in {closing}, "
            "with measurable commitments at individual, national, and international levels."
        )
        lines.append(f"Moderator (SDGs Goal {host}): Agreed and recorded. This meeting is adjourned.")
        return "\n\n".join(lines)

    def _kg_response(self, rng, prompt: str) -> str:
        script = self._payload(prompt, "present within the nodes.")
        theme_match = re.search(r"Moderator \(SDGs Goal ([^)]+)\)", script)
        theme = f"Goal {theme_match.group(1)}" if theme_match else rng.choice(_CONCEPT_BANK)
        n_nodes = rng.randint(8, 16)
        names = [theme] + rng.sample(_CONCEPT_BANK, n_nodes - 1)
        nodes = [
            {"id": name, "order": i + 1,
             "details": f"{name} came up as a {rng.choice(['recurring', 'pivotal', 'contested', 'closing'])} theme."}
            for i, name in enumerate(names)
        ]
        relations = ["supports", "requires", "builds on", "informs", "challenges"]
        links = []
        for i in range(1, n_nodes):
            other = rng.randrange(0, i)
            a, b = names[i], names[other]
            if rng.random() < 0.5:
                a, b = b, a
            links.append({"source": a, "target": b, "relation": rng.choice(relations)})
        # Mild integrity noise keeps the downstream repair path honest.
        if rng.random() < 0.25:
            dup = rng.choice(nodes)
            nodes.append({"id": dup["id"], "order": n_nodes + 1, "details": "Revisited later in the session."})
        if rng.random() < 0.25 and links:
            links.append({"source": names[0], "target": "Unresolved Reference", "relation": "mentions"})
        doc = {"nodes": nodes, "links": links}
        return ("Nodes and links extracted from the transcript follow.\n\n```json\n"
                + json.dumps(doc, indent=2, ensure_ascii=False) + "\n```")

    def _new_goals_response(self, rng, prompt: str) -> str:
        present = sorted({int(m) for m in re.findall(r"## Goal (\d+):", prompt) if 1 <= int(m) <= 17})
        if len(present) < 2:
            present = list(range(1, 18))
        count = rng.randint(1, 5)
        results = []
        titles = rng.sample(_NEW_GOAL_TITLES, count)
        for i in range(count):
            number = 18 + i
            sources = sorted(rng.sample(present, 2))
            year = rng.choice([2030, 2035, 2040, 2045])
            results.append({
                "goal": f"Goal {number}: {titles[i]}",
                "sub_goals": [{
                    "code": f"{number}.1",
                    "description": f"By {year}, advance {titles[i].lower()} across every region, "
                                   f"drawing on the link between Goal {sources[0]} and Goal {sources[1]}.",
                    "indicators": [
                        {"code": f"{number}.1.1",
                         "description": f"Proportion of the population benefiting from {titles[i].lower()} programmes."},
                        {"code": f"{number}.1.2",
                         "description": f"Number of national plans aligning Goal {sources[0]} with Goal {sources[1]}."},
                    ],
                }],
                "source": [f"Goal {sources[0]}", f"Goal {sources[1]}"],
                "description": f"The overlaid graphs repeatedly connect Goal {sources[0]} and Goal {sources[1]}, "
                               f"suggesting a combined agenda of {titles[i].lower()}.",
            })
        return ("Identified relationships and proposed goals are below.\n\n```json\n"
                + json.dumps({"results": results}, indent=2, ensure_ascii=False) + "\n```")

    # -- embeddings -----------------------------------------------------------

    def embed(self, texts: Sequence[str], config: ProviderConfig) -> np.ndarray:
        out = np.empty((len(texts), MOCK_EMBED_DIM), dtype=np.float64)
        for i, text in enumerate(texts):
            rng = np.random.default_rng(_seed_int(config.seed or 0, config.embedding_model, text))
            vec = rng.standard_normal(MOCK_EMBED_DIM)
            out[i] = vec / np.linalg.norm(vec)
        return out


# --------------------------------------------------------------------------
# Live provider (Gemini-compatible REST API)
# --------------------------------------------------------------------------


class GeminiProvider:
    """Minimal client for the Generative Language REST API."""

    BASE = "https://generativelanguage.googleapis.com/v1beta/models"

    def __init__(self, api_key: str | None = None):
        self.api_key = api_key or os.environ.get("GEMINI_API_KEY") or os.environ.get("GOOGLE_API_KEY")
        if not self.api_key:
            raise AuthError("set GEMINI_API_KEY (or GOOGLE_API_KEY) for the live provider")

    def _post(self, url: str, payload: dict, timeout: float) -> dict:
        import httpx

        try:
            resp = httpx.post(url, params={"key": self.api_key}, json=payload, timeout=timeout)
        except httpx.HTTPError as exc:
            raise NetworkError(str(exc)) from exc
        if resp.status_code in (401, 403):
            raise AuthError(f"provider rejected credentials ({resp.status_code})")
        if resp.status_code == 429:
            retry_after = resp.headers.get("retry-after")
            raise QuotaExceeded(retry_after=float(retry_after) if retry_after else None)
        if resp.status_code >= 500:
            raise TransientProviderError(f"provider error {resp.status_code}")
        if resp.status_code != 200:
            raise ProviderError(f"provider error {resp.status_code}: {resp.text[:200]}")
        return resp.json()

    def generate(self, prompt: str, config: ProviderConfig) -> str:
        url = f"{self.BASE}/{config.generation_model}:generateContent"
        data = self._post(url, {"contents": [{"parts": [{"text": prompt}]}]}, config.timeout)
        feedback = data.get("promptFeedback", {})
        if feedback.get("blockReason"):
            raise SafetyBlocked(f"provider blocked prompt: {feedback['blockReason']}")
        candidates = data.get("candidates") or []
        if not candidates:
            raise ProviderError("provider returned no candidates")
        if candidates[0].get("finishReason") == "SAFETY":
            raise SafetyBlocked("provider blocked the response on safety grounds")
        parts = candidates[0].get("content", {}).get("parts", [])
        text = "".join(p.get("text", "") for p in parts)
        if not text:
            raise ProviderError("provider returned an empty candidate")
        return text

    def embed(self, texts: Sequence[str], config: ProviderConfig) -> np.ndarray:
        url = f"{self.BASE}/{config.embedding_model}:batchEmbedContents"
        payload = {
            "requests": [
                {"model": f"models/{config.embedding_model}", "content": {"parts": [{"text": t}]}}
                for t in texts
            ]
        }
        data = self._post(url, payload, config.timeout)
        vectors = [e["values"] for e in data.get("embeddings", [])]
        if len(vectors) != len(texts):
            raise ProviderError("embedding count mismatch")
        arr = np.asarray(vectors, dtype=np.float64)
        norms = np.linalg.norm(arr, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        return arr / norms


# --------------------------------------------------------------------------
# Gateway
# --------------------------------------------------------------------------


class RateLimiter:
    """Token bucket; acquire() blocks until a token is available."""

    def __init__(self, rate_per_s: float, burst: int = 1, clock=time.monotonic, sleep=time.sleep):
        if rate_per_s <= 0:
            raise ValueError("rate must be positive")
        self.rate = rate_per_s
        self.capacity = float(burst)
        self._tokens = float(burst)
        self._updated = clock()
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()

    def acquire(self) -> None:
        while True:
            with self._lock:
                now = self._clock()
                self._tokens = min(self.capacity, self._tokens + (now - self._updated) * self.rate)
                self._updated = now
                if self._tokens >= 1.0:
                    self._tokens -= 1.0
                    return
                wait = (1.0 - self._tokens) / self.rate
            self._sleep(wait)


@dataclass
class GatewayStats:
    generate_calls: int = 0
    retries_total: int = 0
    last_attempts: int = 0
    safety_blocks: int = 0
    embedded_texts: int = 0
    stage_retries: dict = field(default_factory=dict)


class Gateway:
    """Shared front door to the provider: rate limiting, retries, stats."""

    def __init__(
        self,
        provider: Provider,
        config: ProviderConfig | None = None,
        rate_limiter: RateLimiter | None = None,
        sleep=time.sleep,
    ):
        self.provider = provider
        self.config = config or ProviderConfig()
        self.rate_limiter = rate_limiter
        self._sleep = sleep
        self.stats = GatewayStats()
        self._lock = threading.Lock()

    def generate(self, prompt: str) -> str:
        if not prompt:
            raise ValueError("prompt must be non-empty")
        with self._lock:
            self.stats.generate_calls += 1
        attempts = 0
        last_error: Exception | None = None
        while attempts <= self.config.max_retries:
            if self.rate_limiter is not None:
                self.rate_limiter.acquire()
            try:
                text = self.provider.generate(prompt, self.config)
                with self._lock:
                    self.stats.last_attempts = attempts + 1
                    self.stats.retries_total += attempts
                return text
            except SafetyBlocked:
                with self._lock:
                    self.stats.safety_blocks += 1
                raise
            except TransientProviderError as exc:
                last_error = exc
                attempts += 1
                if attempts > self.config.max_retries:
                    break
                delay = getattr(exc, "retry_after", None)
                if delay is None:
                    delay = self.config.backoff_base * (2 ** (attempts - 1))
                self._sleep(delay)
            except ProviderError:
                raise
        with self._lock:
            self.stats.last_attempts = attempts
            self.stats.retries_total += attempts - 1 if attempts else 0
        raise ProviderError(
            f"generation failed after {self.config.max_retries} retries: {last_error}"
        ) from last_error

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        if not texts:
            return np.empty((0, 0))
        for i, t in enumerate(texts):
            if not t:
                raise ValueError(f"texts[{i}] is empty")
        if self.rate_limiter is not None:
            self.rate_limiter.acquire()
        vectors = self.provider.embed(texts, self.config)
        norms = np.linalg.norm(vectors, axis=1)
        if not np.allclose(norms, 1.0, atol=1e-9):
            vectors = vectors / norms[:, None]
        with self._lock:
            self.stats.embedded_texts += len(texts)
        return vectors


def make_gateway(
    provider_name: str = "mock",
    seed: int | None = None,
    rate_per_s: float | None = None,
    catalog: Catalog | None = None,
    **config_kwargs,
) -> Gateway:
    config = ProviderConfig(seed=seed, **config_kwargs)
    provider: Provider
    if provider_name == "mock":
        provider = MockProvider(catalog=catalog)
    elif provider_name == "live":
        provider = GeminiProvider()
    else:
        raise ValueError(f"unknown provider {provider_name!r} (expected 'mock' or 'live')")
    limiter = RateLimiter(rate_per_s) if rate_per_s else None
    return Gateway(provider, config, rate_limiter=limiter)
