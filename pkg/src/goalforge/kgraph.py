"""Knowledge-graph extraction from transcripts, with bounded repair.

Repair order matters: duplicate ids are merged first (which can rescue links
that pointed at a duplicate), dangling links are dropped second, and node
orders are renumbered last so they always end up a permutation of 1..N.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import resources

from .errors import EmptyGraph, ExtractionFailed, IncompleteDataset, SchemaViolation, Unparseable
from .gateway import Gateway, load_template, prompt_hash, render
from .models import KgLink, KgNode, KnowledgeGraph, RoundtableTranscript, RunMetadata
from .store import Store
from .structured import parse_structured

log = logging.getLogger(__name__)

_CORRECTIVE_SUFFIX = (
    "\n\nYour previous response was not usable ({reason}). Re-extract the graph as a "
    "single JSON document with 'nodes' (id, order, details) and 'links' (source, "
    "target, relation). Every link's source and target must exactly match a node id."
)


def load_ontology_guide() -> str:
    return resources.files("goalforge").joinpath("prompts", "kg_guide.txt").read_text(encoding="utf-8")


@dataclass
class RepairReport:
    actions: list[dict] = field(default_factory=list)

    def add(self, kind: str, detail: str) -> None:
        self.actions.append({"kind": kind, "detail": detail})

    def count(self, kind: str) -> int:
        return sum(1 for a in self.actions if a["kind"] == kind)

    def __bool__(self) -> bool:
        return bool(self.actions)


def validate_and_repair(doc: dict) -> tuple[list[KgNode], list[KgLink], RepairReport]:
    """Turn a parsed KgDoc into an invariant-satisfying node/link set.
    Idempotent: applying it to its own output produces an empty report."""
    report = RepairReport()

    merged: dict[str, dict] = {}
    order_of: dict[str, int] = {}
    for node in doc.get("nodes", []):
        node_id = node["id"].strip()
        if node_id in merged:
            report.add("MergedDuplicateNode", node_id)
            extra = node.get("details", "")
            if extra and extra not in merged[node_id]["details"]:
                existing = merged[node_id]["details"]
                merged[node_id]["details"] = f"{existing}; {extra}" if existing else extra
            order_of[node_id] = min(order_of[node_id], node["order"])
        else:
            merged[node_id] = {"id": node_id, "details": node.get("details", "")}
            order_of[node_id] = node["order"]
    if not merged:
        raise EmptyGraph("no nodes survive validation")

    links: list[KgLink] = []
    for link in doc.get("links", []):
        source, target = link["source"].strip(), link["target"].strip()
        if source not in merged or target not in merged:
            report.add("DroppedDanglingLink", f"{source} -> {target}")
            continue
        links.append(KgLink(source=source, target=target, relation=link.get("relation", "")))

    # Renumber: stable sort on (claimed order, input position) -> 1..N.
    ordered_ids = sorted(merged, key=lambda nid: (order_of[nid], list(merged).index(nid)))
    nodes = []
    renumbered = False
    for new_order, nid in enumerate(ordered_ids, start=1):
        if order_of[nid] != new_order:
            renumbered = True
        nodes.append(KgNode(id=nid, order=new_order, details=merged[nid]["details"]))
    if renumbered:
        report.add("RenumberedOrder", f"orders normalized to 1..{len(nodes)}")
    return nodes, links, report


def extract_graph(
    transcript: RoundtableTranscript,
    gateway: Gateway,
    ontology_guide: str,
    store: Store | None = None,
) -> KnowledgeGraph:
    """Extract, validate, repair, and (optionally) persist one goal's graph.
    One corrective re-prompt is allowed for either an unparseable document or
    dangling links; anything still broken afterwards is repaired locally."""
    if not transcript.text.strip():
        raise ValueError("transcript text is empty")
    template = load_template("kg_extract")
    prompt = render(template, {
        "kg_guide": "\n\nkg_guide:\n" + ontology_guide,
        "conversation_script": "\n\nconversation_script:\n" + transcript.text,
    })

    def attempt(p: str) -> dict:
        return parse_structured(gateway.generate(p), "KgDoc")

    def dangling_links(doc: dict) -> list[dict]:
        node_ids = {n["id"].strip() for n in doc["nodes"]}
        return [l for l in doc["links"]
                if l["source"].strip() not in node_ids or l["target"].strip() not in node_ids]

    # At most one corrective re-prompt total, whether the problem was an
    # unparseable document or dangling links.
    try:
        doc = attempt(prompt)
    except (SchemaViolation, Unparseable) as first:
        log.info("goal %d extraction invalid (%s); issuing corrective re-prompt", transcript.goal, first)
        try:
            doc = attempt(prompt + _CORRECTIVE_SUFFIX.format(reason=first))
        except (SchemaViolation, Unparseable) as second:
            raise ExtractionFailed(transcript.goal, str(second)) from second
    else:
        dangling = dangling_links(doc)
        if dangling:
            log.info("goal %d: %d dangling links; issuing corrective re-prompt", transcript.goal, len(dangling))
            try:
                doc = attempt(prompt + _CORRECTIVE_SUFFIX.format(reason=f"{len(dangling)} dangling links"))
            except (SchemaViolation, Unparseable):
                pass  # keep the parseable first document; local repair handles it

    nodes, links, report = validate_and_repair(doc)
    for action in report.actions:
        log.info("goal %d repair: %s %s", transcript.goal, action["kind"], action["detail"])
    graph = KnowledgeGraph(
        goal=transcript.goal,
        dataset=transcript.dataset,
        nodes=tuple(nodes),
        links=tuple(links),
        provenance=RunMetadata(
            model=gateway.config.generation_model,
            seed=gateway.config.seed,
            timestamp=datetime.now(timezone.utc).isoformat(),
            prompt_hash=prompt_hash(prompt),
        ),
    )
    if store is not None:
        store.put_graph(transcript.dataset, graph, repairs=report.actions)
    return graph


def extract_all(store: Store, label: str, gateway: Gateway) -> dict[int, str]:
    guide = load_ontology_guide()
    outcome: dict[int, str] = {}
    for transcript in store.transcripts(label):
        try:
            extract_graph(transcript, gateway, guide, store)
            outcome[transcript.goal] = "ok"
        except ExtractionFailed as exc:
            outcome[transcript.goal] = f"ExtractionFailed: {exc}"
    return outcome


@dataclass
class GraphTotals:
    total_nodes: int
    total_links: int
    mean_nodes: float
    mean_links: float


def graph_totals(store: Store, label: str) -> GraphTotals:
    graphs = store.graphs(label)
    if len(graphs) < 17:
        raise IncompleteDataset(f"dataset {label!r} has {len(graphs)} graphs; 17 expected")
    nodes = sum(len(g.nodes) for g in graphs)
    links = sum(len(g.links) for g in graphs)
    return GraphTotals(nodes, links, nodes / len(graphs), links / len(graphs))
