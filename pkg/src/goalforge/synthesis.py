"""New-goal synthesis: overlay all 17 graphs of a dataset, ask the provider
for inter-goal relationships, and validate the resulting proposals
(numbered consecutively from 18, each citing at least two source goals)."""

from __future__ import annotations

import logging
import re
from collections import Counter
from dataclasses import dataclass, field

from .errors import IncompleteDataset, SchemaViolation, SynthesisFailed, Unparseable
from .gateway import Gateway, load_template, render
from .models import KnowledgeGraph, NewGoalProposal, SubGoal, SubGoalIndicator
from .store import Store
from .structured import parse_structured

log = logging.getLogger(__name__)

_GOAL_REF_RE = re.compile(r"Goal\s*(\d+)")
_GOAL_HEAD_RE = re.compile(r"^Goal\s*(\d+)\s*[:.]\s*(.+)$")
_CODE_RE = re.compile(r"(\d+)(?:\.(\d+))(?:\.(\d+))?")

_CORRECTIVE_SUFFIX = (
    "\n\nYour previous response was not usable ({reason}). Respond again with a single "
    "JSON document: {{\"results\": [...]}} where each result has goal (e.g. \"Goal 18: "
    "Title\"), sub_goals (code/description/indicators), source (the existing goals the "
    "relationship was found between), and description."
)


def serialize_graphs(graphs: list[KnowledgeGraph], titles: dict[int, str] | None = None) -> str:
    """kg_data slot content: per-goal sections with node and link listings in
    node order."""
    sections = []
    for g in sorted(graphs, key=lambda g: g.goal):
        title = (titles or {}).get(g.goal, "")
        lines = [f"## Goal {g.goal}:{(' ' + title) if title else ''}", "Nodes:"]
        for n in sorted(g.nodes, key=lambda n: n.order):
            lines.append(f"{n.order}. {n.id}: {n.details}")
        lines.append("Links:")
        for l in g.links:
            lines.append(f"- {l.source} -[{l.relation}]-> {l.target}")
        sections.append("\n".join(lines))
    return "\n\n".join(sections)


def _source_goals(source: list[str], description: str) -> frozenset[int]:
    """Goal numbers from the proposal's Source field, with a free-text scan of
    the rationale as fallback."""
    refs: set[int] = set()
    for s in source:
        refs.update(int(m) for m in _GOAL_REF_RE.findall(s) if 1 <= int(m) <= 17)
    if len(refs) < 2:
        refs.update(int(m) for m in _GOAL_REF_RE.findall(description) if 1 <= int(m) <= 17)
    return frozenset(refs)


def parse_proposals(doc: dict) -> list[NewGoalProposal]:
    """Typed proposals from a validated NewGoalsDoc; enforces numbering,
    code scheme, and source-goal cardinality."""
    proposals = []
    for i, item in enumerate(doc["results"]):
        path = f"results[{i}]"
        head = _GOAL_HEAD_RE.match(item["goal"].strip())
        if not head:
            raise SchemaViolation(f"{path}.goal", f"cannot parse goal header {item['goal']!r}")
        number = int(head.group(1))
        if number < 18:
            raise SchemaViolation(f"{path}.goal", f"number {number} < 18")
        title = head.group(2).strip()

        subs = []
        for j, sub in enumerate(item["sub_goals"]):
            spath = f"{path}.sub_goals[{j}]"
            code = sub["code"].strip()
            m = _CODE_RE.fullmatch(code)
            if not m or int(m.group(1)) != number or m.group(3) is not None:
                raise SchemaViolation(f"{spath}.code", f"{code!r} does not follow the {number}.k scheme")
            indicators = []
            for k, ind in enumerate(sub["indicators"]):
                icode = ind["code"].strip()
                im = _CODE_RE.fullmatch(icode)
                if not im or int(im.group(1)) != number or im.group(3) is None:
                    raise SchemaViolation(
                        f"{spath}.indicators[{k}].code",
                        f"{icode!r} does not follow the {number}.k.m scheme",
                    )
                indicators.append(SubGoalIndicator(icode, ind["description"]))
            subs.append(SubGoal(code=code, description=sub["description"], indicators=tuple(indicators)))

        sources = _source_goals(item["source"], item["description"])
        if len(sources) < 2:
            raise SchemaViolation(f"{path}.source", "a relationship needs at least 2 distinct source goals")
        proposals.append(NewGoalProposal(
            number=number, title=title, sub_goals=tuple(subs),
            source_goals=sources, rationale=item["description"],
        ))

    numbers = [p.number for p in proposals]
    expected = list(range(18, 18 + len(proposals)))
    if sorted(numbers) != expected:
        raise SchemaViolation("results", f"proposal numbers {sorted(numbers)} are not consecutive from 18")
    return sorted(proposals, key=lambda p: p.number)


def synthesize(store: Store, label: str, gateway: Gateway, titles: dict[int, str] | None = None) -> list[NewGoalProposal]:
    """One provider call over the concatenated graphs; one corrective
    re-prompt before giving up."""
    graphs = store.graphs(label)
    if len(graphs) < 17:
        raise IncompleteDataset(f"dataset {label!r} has {len(graphs)} graphs; 17 expected")
    template = load_template("new_goals")
    prompt = render(template, {"kg_data": "\n\nkg_data:\n" + serialize_graphs(graphs, titles)})

    def attempt(p: str) -> list[NewGoalProposal]:
        return parse_proposals(parse_structured(gateway.generate(p), "NewGoalsDoc"))

    try:
        proposals = attempt(prompt)
    except (SchemaViolation, Unparseable) as first:
        log.info("synthesis output invalid (%s); issuing corrective re-prompt", first)
        try:
            proposals = attempt(prompt + _CORRECTIVE_SUFFIX.format(reason=first))
        except (SchemaViolation, Unparseable) as second:
            raise SynthesisFailed(str(second)) from second

    with_graphs = {g.goal for g in graphs}
    for p in proposals:
        missing = sorted(p.source_goals - with_graphs)
        if missing:
            raise SynthesisFailed(f"proposal {p.number} cites goals without graphs: {missing}")
        store.put_proposal(label, p, seed=gateway.config.seed)
    return proposals


@dataclass
class ProposalStats:
    count: int
    source_goal_frequency: dict[int, int]
    subgoals_per_goal: dict[int, int] = field(default_factory=dict)
    indicators_per_subgoal: dict[int, int] = field(default_factory=dict)


def proposal_stats(proposals: list[NewGoalProposal]) -> ProposalStats:
    """Source-goal reference frequency plus structural histograms
    (sub-goal count -> proposals, indicator count -> sub-goals)."""
    freq: Counter[int] = Counter()
    sub_hist: Counter[int] = Counter()
    ind_hist: Counter[int] = Counter()
    for p in proposals:
        freq.update(p.source_goals)
        sub_hist[len(p.sub_goals)] += 1
        for s in p.sub_goals:
            ind_hist[len(s.indicators)] += 1
    return ProposalStats(
        count=len(proposals),
        source_goal_frequency=dict(sorted(freq.items())),
        subgoals_per_goal=dict(sorted(sub_hist.items())),
        indicators_per_subgoal=dict(sorted(ind_hist.items())),
    )
