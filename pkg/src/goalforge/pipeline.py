"""Stage orchestration: dependency-ordered execution with per-stage
prerequisite checks and an aggregated run report."""

from __future__ import annotations

import dataclasses
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

from .analytics import (
    attribute_network,
    compare_datasets,
    cooccurrence,
    heatmap_export,
    metrics_table,
    zero_pair_report,
)
from .annotate import annotate_dataset, tag_statistics
from .catalog import Catalog, load_default_catalog
from .errors import GoalforgeError, StagePrerequisiteMissing
from .export import export_site
from .gateway import Gateway, make_gateway
from .ingest import FixtureSource, YouTubeSource, ingest_corpus
from .kgraph import extract_all, graph_totals
from .models import DATASET_WINDOWS, CorpusWindow, FORMAL_WINDOW
from .retrieval import EmbeddingIndex, build_index
from .roundtable import simulate_all
from .store import Store
from .synthesis import synthesize

log = logging.getLogger(__name__)

STAGES = ("ingest", "annotate", "index", "simulate", "extract", "synthesize", "analyze", "export")


@dataclass
class PipelineConfig:
    dataset: str = "preliminary"
    provider: str = "mock"
    seed: int | None = None
    fixtures: Path | None = None
    store_path: Path = Path("goalforge.db")
    out_dir: Path = Path("out")
    channel: str = ""
    window: CorpusWindow | None = None
    cap: int = 25
    rate_per_s: float | None = None
    page_limit: int = 100
    palette_size: int = 8
    single_only: bool = False
    min_weight: int = 1
    max_workers: int = 8
    api_key: str = ""

    def resolved_window(self) -> CorpusWindow:
        if self.window is not None:
            return self.window
        return DATASET_WINDOWS.get(self.dataset, FORMAL_WINDOW)

    def index_dir(self) -> Path:
        return Path(self.store_path).parent / "index"


@dataclass
class StageResult:
    name: str
    status: str  # "ok" | "failed" | "skipped"
    details: dict = field(default_factory=dict)
    duration_s: float = 0.0


@dataclass
class RunReport:
    stages: list[StageResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(s.status == "ok" for s in self.stages)

    def to_dict(self) -> dict:
        return {"ok": self.ok, "stages": [dataclasses.asdict(s) for s in self.stages]}


def _require(stage: str, condition: bool, missing: str) -> None:
    if not condition:
        raise StagePrerequisiteMissing(stage, missing)


class Pipeline:
    def __init__(self, config: PipelineConfig, store: Store | None = None,
                 gateway: Gateway | None = None, catalog: Catalog | None = None):
        self.config = config
        self.catalog = catalog or load_default_catalog()
        self.store = store or Store(config.store_path)
        self.gateway = gateway or make_gateway(
            config.provider, seed=config.seed, rate_per_s=config.rate_per_s, catalog=self.catalog,
        )
        self.store.migrate(config.dataset)
        self._index: EmbeddingIndex | None = None

    # -- stage bodies --------------------------------------------------------

    def stage_ingest(self) -> dict:
        cfg = self.config
        if cfg.fixtures is not None:
            source = FixtureSource(cfg.fixtures)
        else:
            _require("ingest", bool(cfg.api_key), "fixture directory or API key")
            source = YouTubeSource(cfg.api_key)
        summary = ingest_corpus(
            self.store, cfg.dataset, source, cfg.resolved_window(),
            channel=cfg.channel, page_limit=cfg.page_limit, max_workers=cfg.max_workers,
        )
        return {"collected": summary.collected, "usable": summary.usable,
                "skipped": summary.skipped_by_reason}

    def stage_annotate(self) -> dict:
        _require("annotate", self.store.talk_count(self.config.dataset, usable_only=True) > 0,
                 "no usable talks ingested")
        report = annotate_dataset(self.store, self.config.dataset, self.gateway, self.catalog,
                                  max_workers=self.config.max_workers)
        return {"annotated": report.annotated, "failed": report.failed, "blocked": report.blocked}

    def stage_index(self) -> dict:
        _require("index", self.store.annotation_count(self.config.dataset) > 0, "no annotations")
        self._index = build_index(self.store, self.config.dataset, self.gateway)
        self._index.save(self.config.index_dir(), self.config.dataset)
        return {"entries": len(self._index.ids), "dimension": self._index.dimension}

    def load_index(self) -> EmbeddingIndex:
        if self._index is None:
            manifest = self.config.index_dir() / f"{self.config.dataset}_index.json"
            _require("simulate", manifest.exists(), "embedding index not built")
            self._index = EmbeddingIndex.load(self.config.index_dir(), self.config.dataset)
        return self._index

    def stage_simulate(self) -> dict:
        _require("simulate", self.store.annotation_count(self.config.dataset) > 0, "no annotations")
        outcome = simulate_all(
            self.store, self.config.dataset, self.gateway, self.catalog,
            self.load_index(), cap=self.config.cap,
        )
        return {"transcripts": sum(1 for s in outcome.values() if s == "ok"),
                "failures": {g: s for g, s in outcome.items() if s != "ok"}}

    def stage_extract(self) -> dict:
        _require("extract", len(self.store.transcripts(self.config.dataset)) > 0, "no transcripts")
        outcome = extract_all(self.store, self.config.dataset, self.gateway)
        return {"graphs": sum(1 for s in outcome.values() if s == "ok"),
                "failures": {g: s for g, s in outcome.items() if s != "ok"}}

    def stage_synthesize(self) -> dict:
        _require("synthesize", self.store.graph_count(self.config.dataset) >= 17,
                 "17 graphs required")
        titles = {g.number: g.title for g in self.catalog.goals}
        proposals = synthesize(self.store, self.config.dataset, self.gateway, titles)
        return {"proposals": len(proposals), "numbers": [p.number for p in proposals]}

    def stage_analyze(self) -> dict:
        cfg = self.config
        _require("analyze", self.store.annotation_count(cfg.dataset) > 0, "no annotations")
        out = Path(cfg.out_dir) / "analysis"
        out.mkdir(parents=True, exist_ok=True)
        details: dict = {}

        matrix = cooccurrence(self.store, cfg.dataset, single_only=cfg.single_only)
        heatmap_export(matrix, out, stem=f"cooccurrence_{cfg.dataset}")
        stats = tag_statistics(self.store, cfg.dataset)
        network = attribute_network(matrix, min_weight=cfg.min_weight)
        zero_pairs = zero_pair_report(matrix)
        (out / f"network_{cfg.dataset}.json").write_text(json.dumps({
            "nodes": network.nodes,
            "edges": [{"i": i, "j": j, "weight": w} for i, j, w in network.edges],
            "zero_pairs": [{"i": z.goal_i, "j": z.goal_j, "count_i": z.count_i, "count_j": z.count_j}
                           for z in zero_pairs],
        }, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        details["talks"] = stats.talks
        details["total_tags"] = stats.total_tags
        details["zero_pairs"] = len(zero_pairs)

        if self.store.graph_count(cfg.dataset) > 0:
            rows = metrics_table(self.store, cfg.dataset, cfg.palette_size)
            (out / f"kg_metrics_{cfg.dataset}.json").write_text(
                json.dumps([dataclasses.asdict(r) for r in rows], indent=2, sort_keys=True) + "\n",
                encoding="utf-8")
            details["graphs"] = len(rows)
            if self.store.graph_count(cfg.dataset) >= 17:
                totals = graph_totals(self.store, cfg.dataset)
                details["graph_totals"] = dataclasses.asdict(totals)

        other = {"preliminary": "formal", "formal": "preliminary"}.get(cfg.dataset)
        if other:
            self.store.migrate(other)
        if other and self.store.graph_count(other) >= 17 and self.store.graph_count(cfg.dataset) >= 17:
            comparison = {
                metric: dataclasses.asdict(compare_datasets(self.store, metric))
                for metric in ("Nodes", "Links")
            }
            (out / "comparison.json").write_text(
                json.dumps(comparison, indent=2, sort_keys=True) + "\n", encoding="utf-8")
            details["comparison"] = {m: round(c["welch_p"], 4) for m, c in comparison.items()}
        return details

    def stage_export(self) -> dict:
        cfg = self.config
        _require("export", self.store.annotation_count(cfg.dataset) > 0, "no annotations")
        _require("export", self.store.graph_count(cfg.dataset) >= 17, "17 graphs required")
        bundle = export_site(
            self.store, cfg.dataset, Path(cfg.out_dir) / "bundle", self.catalog,
            palette_size=cfg.palette_size, seed=cfg.seed,
        )
        return {"files": len(bundle.checksums), "out_dir": str(bundle.out_dir)}

    # -- orchestration ---------------------------------------------------------

    def run(self, stages: list[str]) -> RunReport:
        unknown = [s for s in stages if s not in STAGES]
        if unknown:
            raise GoalforgeError(f"unknown stages: {unknown}")
        ordered = [s for s in STAGES if s in set(stages)]
        report = RunReport()
        for name in ordered:
            body = getattr(self, f"stage_{name}")
            started = time.perf_counter()
            try:
                details = body()
                report.stages.append(StageResult(
                    name=name, status="ok", details=details,
                    duration_s=round(time.perf_counter() - started, 3),
                ))
            except GoalforgeError as exc:
                report.stages.append(StageResult(
                    name=name, status="failed", details={"error": str(exc)},
                    duration_s=round(time.perf_counter() - started, 3),
                ))
                log.error("stage %s failed: %s", name, exc)
                break
        return report


def run_pipeline(stages: list[str], config: PipelineConfig, store: Store | None = None,
                 gateway: Gateway | None = None) -> RunReport:
    pipeline = Pipeline(config, store=store, gateway=gateway)
    return pipeline.run(stages)
