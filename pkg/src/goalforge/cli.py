"""Command-line interface for every pipeline stage plus the site exporter."""

from __future__ import annotations

import dataclasses
import json
import logging
import os
import sys
from pathlib import Path

import click

from .analytics import compare_datasets
from .annotate import tag_statistics
from .catalog import load_default_catalog
from .errors import GoalforgeError
from .fixtures import (
    load_graph_fixture,
    load_new_goals_doc,
    load_tag_fixture,
    write_mini_corpus,
    write_paper_corpus,
)
from .kgraph import graph_totals
from .models import CorpusWindow
from .pipeline import STAGES, Pipeline, PipelineConfig
from .store import Store
from .structured import parse_structured, serialize
from .synthesis import parse_proposals, proposal_stats
from .retrieval import EmbeddingIndex, select_participants
from .gateway import make_gateway


def _parse_window(value: str | None) -> CorpusWindow | None:
    if not value:
        return None
    try:
        start, end = value.split(":", 1)
        return CorpusWindow(start.strip(), end.strip())
    except ValueError as exc:
        raise click.BadParameter("window must be YYYY-MM-DD:YYYY-MM-DD") from exc


def _config(ctx: click.Context, **overrides) -> PipelineConfig:
    base = dict(ctx.obj or {})
    base.update({k: v for k, v in overrides.items() if v is not None})
    return PipelineConfig(**base)


def _run_stage(config: PipelineConfig, stage: str) -> None:
    pipeline = Pipeline(config)
    report = pipeline.run([stage])
    click.echo(json.dumps(report.to_dict(), indent=2))
    if not report.ok:
        sys.exit(1)


@click.group()
@click.option("--store", "store_path", type=click.Path(path_type=Path),
              default=Path(os.environ.get("GOALFORGE_STORE", "goalforge.db")),
              show_default=True, help="SQLite store path.")
@click.option("-v", "--verbose", is_flag=True, help="Enable info-level logging.")
@click.pass_context
def main(ctx: click.Context, store_path: Path, verbose: bool) -> None:
    """Turn a talk corpus into per-goal roundtable knowledge graphs, analyses,
    synthesized goal proposals, and a static exploration bundle."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    ctx.obj = {"store_path": store_path}


_dataset_opt = click.option("--dataset", default="preliminary", show_default=True)
_provider_opt = click.option("--provider", type=click.Choice(["mock", "live"]), default="mock", show_default=True)
_seed_opt = click.option("--seed", type=int, default=None, help="Mock-provider seed.")


@main.command()
@_dataset_opt
@click.option("--fixtures", type=click.Path(exists=True, file_okay=False, path_type=Path),
              help="Fixture corpus directory (offline mode).")
@click.option("--live", is_flag=True, help="Use the live platform API (needs YOUTUBE_API_KEY).")
@click.option("--window", help="Override window as YYYY-MM-DD:YYYY-MM-DD.")
@click.option("--channel", default="", help="Channel filter.")
@click.option("--rate", type=float, default=None, help="Max requests per second.")
@click.pass_context
def ingest(ctx, dataset, fixtures, live, window, channel, rate):
    """Fetch talk metadata and transcripts into the store."""
    if not fixtures and not live:
        raise click.UsageError("pass --fixtures DIR for offline mode or --live for the platform API")
    config = _config(ctx, dataset=dataset, fixtures=fixtures, channel=channel,
                     window=_parse_window(window), rate_per_s=rate,
                     api_key=os.environ.get("YOUTUBE_API_KEY", "") if live else "")
    _run_stage(config, "ingest")


@main.command()
@_dataset_opt
@_provider_opt
@_seed_opt
@click.option("--workers", type=int, default=8, show_default=True)
@click.pass_context
def annotate(ctx, dataset, provider, seed, workers):
    """Annotate every usable talk (summary, keywords, Q&A, goal tags)."""
    _run_stage(_config(ctx, dataset=dataset, provider=provider, seed=seed, max_workers=workers), "annotate")


@main.command()
@_dataset_opt
@_provider_opt
@_seed_opt
@click.pass_context
def index(ctx, dataset, provider, seed):
    """Build and persist the embedding index over annotations."""
    _run_stage(_config(ctx, dataset=dataset, provider=provider, seed=seed), "index")


@main.command()
@_dataset_opt
@_provider_opt
@_seed_opt
@click.option("--goal", type=click.IntRange(1, 17), required=True)
@click.option("--cap", type=int, default=25, show_default=True)
@click.pass_context
def select(ctx, dataset, provider, seed, goal, cap):
    """Show the ranked participant set for one goal."""
    config = _config(ctx, dataset=dataset, provider=provider, seed=seed, cap=cap)
    store = Store(config.store_path)
    catalog = load_default_catalog()
    gateway = make_gateway(provider, seed=seed, catalog=catalog)
    emb_index = EmbeddingIndex.load(config.index_dir(), dataset)
    participants = select_participants(goal, emb_index, catalog, cap, store, dataset, gateway)
    for vid, score in zip(participants.members, participants.scores):
        click.echo(f"{vid}\t{score:.6f}")


@main.command()
@_dataset_opt
@_provider_opt
@_seed_opt
@click.option("--goal", type=click.IntRange(1, 17), default=None, help="Simulate one goal only.")
@click.option("--cap", type=int, default=25, show_default=True)
@click.pass_context
def simulate(ctx, dataset, provider, seed, goal, cap):
    """Generate roundtable transcripts (one per goal)."""
    config = _config(ctx, dataset=dataset, provider=provider, seed=seed, cap=cap)
    if goal is None:
        _run_stage(config, "simulate")
        return
    from .roundtable import simulate_all

    pipeline = Pipeline(config)
    outcome = simulate_all(pipeline.store, dataset, pipeline.gateway, pipeline.catalog,
                           pipeline.load_index(), cap=cap, goals=[goal])
    click.echo(json.dumps(outcome, indent=2))
    if outcome.get(goal) != "ok":
        sys.exit(1)


@main.command()
@_dataset_opt
@_provider_opt
@_seed_opt
@click.pass_context
def extract(ctx, dataset, provider, seed):
    """Extract knowledge graphs from stored transcripts."""
    _run_stage(_config(ctx, dataset=dataset, provider=provider, seed=seed), "extract")


@main.command()
@_dataset_opt
@_provider_opt
@_seed_opt
@click.pass_context
def synthesize(ctx, dataset, provider, seed):
    """Mine inter-goal relationships and propose goals numbered from 18."""
    _run_stage(_config(ctx, dataset=dataset, provider=provider, seed=seed), "synthesize")


@main.command()
@_dataset_opt
@click.option("--out", "out_dir", type=click.Path(path_type=Path), default=Path("out"), show_default=True)
@click.option("--single-only", is_flag=True, help="Diagonal counts only single-tag talks.")
@click.option("--min-weight", type=int, default=1, show_default=True)
@click.option("--palette-size", type=int, default=8, show_default=True)
@click.pass_context
def analyze(ctx, dataset, out_dir, single_only, min_weight, palette_size):
    """Co-occurrence matrix, heatmap, attribute network, KG metrics, and the
    two-dataset comparison when both datasets are complete."""
    _run_stage(_config(ctx, dataset=dataset, out_dir=out_dir, single_only=single_only,
                       min_weight=min_weight, palette_size=palette_size), "analyze")


@main.command("export-site")
@_dataset_opt
@click.option("--out", "out_dir", type=click.Path(path_type=Path), default=Path("out"), show_default=True)
@click.option("--palette-size", type=int, default=8, show_default=True)
@_seed_opt
@click.pass_context
def export_site_cmd(ctx, dataset, out_dir, palette_size, seed):
    """Write the static exploration bundle (graphs, metrics, matrix, goals)."""
    _run_stage(_config(ctx, dataset=dataset, out_dir=out_dir, palette_size=palette_size, seed=seed), "export")


@main.command()
@_dataset_opt
@click.pass_context
def stats(ctx, dataset):
    """Dataset statistics: tags, graph totals, proposals, comparison."""
    config = _config(ctx, dataset=dataset)
    store = Store(config.store_path)
    store.migrate(dataset)
    out: dict = {"dataset": dataset}
    try:
        ts = tag_statistics(store, dataset)
        out["tags"] = {"talks": ts.talks, "total_tags": ts.total_tags,
                       "mean_tags_per_talk": round(ts.mean_tags_per_talk, 3),
                       "per_goal_counts": ts.per_goal_counts}
    except GoalforgeError as exc:
        out["tags"] = str(exc)
    try:
        totals = graph_totals(store, dataset)
        out["graphs"] = dataclasses.asdict(totals)
    except GoalforgeError as exc:
        out["graphs"] = str(exc)
    proposals = store.proposals(dataset)
    if proposals:
        out["proposals"] = dataclasses.asdict(proposal_stats(proposals))
    other = {"preliminary": "formal", "formal": "preliminary"}.get(dataset)
    if other:
        store.migrate(other)
        try:
            out["comparison"] = {
                metric: dataclasses.asdict(compare_datasets(store, metric))
                for metric in ("Nodes", "Links")
            }
        except GoalforgeError:
            pass
    click.echo(json.dumps(out, indent=2))


@main.command()
@click.option("--stages", default="all", show_default=True,
              help=f"Comma-separated subset of: {','.join(STAGES)}.")
@_dataset_opt
@_provider_opt
@_seed_opt
@click.option("--fixtures", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--out", "out_dir", type=click.Path(path_type=Path), default=Path("out"), show_default=True)
@click.option("--cap", type=int, default=25, show_default=True)
@click.pass_context
def run(ctx, stages, dataset, provider, seed, fixtures, out_dir, cap):
    """Run several stages in dependency order."""
    wanted = list(STAGES) if stages == "all" else [s.strip() for s in stages.split(",") if s.strip()]
    config = _config(ctx, dataset=dataset, provider=provider, seed=seed,
                     fixtures=fixtures, out_dir=out_dir, cap=cap)
    pipeline = Pipeline(config)
    report = pipeline.run(wanted)
    click.echo(json.dumps(report.to_dict(), indent=2))
    if not report.ok:
        sys.exit(1)


@main.group()
def fixtures() -> None:
    """Fixture management (reference datasets and corpora)."""


@fixtures.command("load")
@_dataset_opt
@click.option("--tags/--no-tags", default=True, show_default=True)
@click.option("--graphs/--no-graphs", default=True, show_default=True)
@click.option("--new-goals/--no-new-goals", "new_goals", default=False, show_default=True)
@click.pass_context
def fixtures_load(ctx, dataset, tags, graphs, new_goals):
    """Load the shipped reference fixtures into the store."""
    config = _config(ctx, dataset=dataset)
    store = Store(config.store_path)
    store.migrate(dataset)
    loaded = {}
    if tags:
        loaded["tags"] = load_tag_fixture(store, dataset)
    if graphs:
        loaded["graphs"] = load_graph_fixture(store, dataset)
    if new_goals:
        doc = load_new_goals_doc(dataset)
        proposals = parse_proposals(parse_structured(serialize(doc), "NewGoalsDoc"))
        for p in proposals:
            store.put_proposal(dataset, p)
        loaded["new_goals"] = len(proposals)
    click.echo(json.dumps(loaded))


@fixtures.command("corpus")
@click.option("--kind", type=click.Choice(["mini", "paper"]), default="mini", show_default=True)
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True)
def fixtures_corpus(kind, out_dir):
    """Write a fixture corpus directory for offline ingestion."""
    path = write_mini_corpus(out_dir) if kind == "mini" else write_paper_corpus(out_dir)
    click.echo(str(path))


if __name__ == "__main__":
    main()
