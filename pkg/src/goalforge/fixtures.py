"""Deterministic fixture construction and loading.

Three families:

* tag fixtures: per-dataset tag assignments engineered so the aggregate
  counts (talks, total tags, per-goal counts, co-occurrence cells, zero
  pairs) reproduce the reference dataset statistics exactly;
* reference graphs: one graph per goal built to hit the reference per-goal
  node/link counts, initial/final/most-connected nodes, and arrow-direction
  trends;
* corpora: fixture directories for the ingestion layer (a small handcrafted
  set plus a generated paper-scale set).

Everything here is pure construction (no randomness), so regeneration is
byte-stable.
"""

from __future__ import annotations

import json
from datetime import date, timedelta
from importlib import resources
from pathlib import Path

from .models import (
    KgLink,
    KgNode,
    KnowledgeGraph,
    RoundtableTranscript,
    RunMetadata,
    TalkAnnotation,
    TalkRecord,
)
from .store import Store

# --------------------------------------------------------------------------
# Tag fixtures
# --------------------------------------------------------------------------

_FREE_PRELIM = [1, 2, 3, 5, 6, 7, 8, 9, 11, 12, 13, 14, 15, 17]
_FREE_FORMAL = [1, 2, 9, 11, 12, 13, 15, 17]


def preliminary_tag_sets() -> list[frozenset[int]]:
    """269 tag sets totalling 895 tags, with goal 10 on 115 talks, goal 4 on
    102, goal 16 on 99, and pair counts (10,16)=71, (4,10)=57, (4,16)=47."""
    base: list[set[int]] = []
    base += [{4, 10, 16} for _ in range(47)]
    base += [{10, 16} for _ in range(24)]
    base += [{4, 10} for _ in range(10)]
    base += [{10} for _ in range(34)]
    base += [{16} for _ in range(28)]
    base += [{4} for _ in range(45)]
    rest: list[set[int]] = [set() for _ in range(81)]

    for k, tags in enumerate(base):
        tags.add(_FREE_PRELIM[(2 * k) % 14])
        if k < 148:
            tags.add(_FREE_PRELIM[(2 * k + 1) % 14])
    for k, tags in enumerate(rest):
        for p in range(3):
            tags.add(_FREE_PRELIM[(3 * k + p) % 14])
    return [frozenset(t) for t in base + rest]


def formal_tag_sets() -> list[frozenset[int]]:
    """1127 tag sets totalling 3730 tags, reproducing the reference formal
    aggregates: goal counts 10:521, 16:427, 3:353, 4:346, 8:306, 5:147,
    7:107, 14:51, 6:12; pairs (10,16)=298, (4,10)=199, (8,10)=189; and zero
    cells at (4,14), (5,7), (5,14), (6,8)."""
    base: list[set[int]] = []
    base += [{4, 8, 10, 16} for _ in range(100)]
    base += [{3, 10, 16} for _ in range(50)]
    base += [{10, 16} for _ in range(148)]
    base += [{4, 10} for _ in range(99)]
    base += [{8, 10} for _ in range(89)]
    base += [{3, 10} for _ in range(26)]
    base += [{10} for _ in range(9)]
    base += [{3, 16} for _ in range(129)]
    base += [{4, 5} for _ in range(147)]
    base += [{7, 8} for _ in range(107)]
    base += [{8} for _ in range(10)]
    base += [{14} for _ in range(51)]
    base += [{6} for _ in range(12)]
    rest: list[set[int]] = [{3} for _ in range(148)] + [set(), set()]

    for k in range(860):
        base[k].add(_FREE_FORMAL[k % 8])
    for k, tags in enumerate(rest):
        for p in range(4):
            tags.add(_FREE_FORMAL[(4 * k + p) % 8])
    return [frozenset(t) for t in base + rest]


def tag_sets(label: str) -> list[frozenset[int]]:
    if label == "preliminary":
        return preliminary_tag_sets()
    if label == "formal":
        return formal_tag_sets()
    raise ValueError(f"no tag fixture for dataset {label!r}")


def _fixture_path(name: str) -> Path:
    return Path(str(resources.files("goalforge").joinpath("resources", "fixtures", name)))


def write_tag_fixture(label: str, path: Path) -> None:
    prefix = label[0]
    rows = [
        {"video_id": f"{prefix}{i:04d}", "sdg_types": sorted(tags)}
        for i, tags in enumerate(tag_sets(label), start=1)
    ]
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")


def load_tag_fixture(store: Store, label: str, path: Path | None = None) -> int:
    """Insert fixture talks plus minimal valid annotations carrying the
    fixture tag sets. Returns the number of talks loaded."""
    path = path or _fixture_path(f"tags_{label}.jsonl")
    mid = {"preliminary": "2023-06-15T12:00:00+00:00"}.get(label, "2022-06-15T12:00:00+00:00")
    count = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            row = json.loads(line)
            vid = row["video_id"]
            store.put_talk(label, TalkRecord(
                video_id=vid, title=f"Fixture talk {vid}", published_at=mid,
                duration=600, channel="fixture", transcript=f"Reference transcript for {vid}.",
                usable=True,
            ))
            store.put_annotation(label, TalkAnnotation(
                video_id=vid, title=f"Fixture talk {vid}",
                description="Reference corpus entry.", core_value="Reference value.",
                key_words=("reference",),
                qa=tuple((f"Q{i}?", f"A{i}.") for i in range(1, 6)),
                sdg_types=frozenset(row["sdg_types"]),
            ))
            count += 1
    return count


# --------------------------------------------------------------------------
# Reference graphs (per-goal rows of the reference metrics table)
# --------------------------------------------------------------------------

# (goal, initial, most_connected, final, trend, intricate, n_nodes, n_links)
PRELIMINARY_GRAPH_ROWS = [
    (1, "Eradicating Poverty", ["Eradicating Poverty", "Girls' Success and Empowerment"],
     "Ethical Implementation", "Outward", True, 24, 18),
    (2, "Zero Hunger", ["Zero Hunger", "Sustainable Rice Farming"],
     "Target Interventions and Humanitarian Assistance", "Inward", False, 16, 15),
    (3, "Goal 3: Good Health and Well-being", ["Goal 3: Good Health and Well-being"],
     "Environmental Issues", "Inward", False, 11, 10),
    (4, "SDG 4 - Quality Education", ["SDG 4 - Quality Education"],
     "Social-emotional learning", "Inward", False, 16, 15),
    (5, "SDG Goal 5", ["SDG Goal 5"], "Data and Evidence", "Outward", False, 16, 16),
    (6, "SDG 6: Clean Water and Sanitation", ["Sustainable Living"],
     "Decision-making Processes", "Outward", True, 26, 25),
    (7, "AI Impacts (kg_box)", ["AI Impacts (kg_box)"],
     "Explainable AI Solutions", "Outward", False, 14, 9),
    (8, "Decent Work and Economic Growth",
     ["Decent Work and Economic Growth", "Data Ownership", "Boredom", "AGI"],
     "Problem-Solving", "Inward", True, 30, 29),
    (9, "Goal 9", ["Goal 9"], "Inclusive Innovation Policies", "Inward", False, 14, 13),
    (10, "SDGs Goal 10: Reduced Inequalities", ["SDGs Goal 10: Reduced Inequalities"],
     "International Cooperation", "Inward", False, 22, 21),
    (11, "SDGs Goal 11: Sustainable Cities and Communities",
     ["SDGs Goal 11: Sustainable Cities and Communities"],
     "Promoting Social Equality in Urban Development", "Inward", False, 14, 13),
    (12, "SDGs Goal 12", ["SDGs Goal 12"], "International Cooperation", "Inward", False, 14, 13),
    (13, "SDGs Goal 13: Climate Action", ["SDGs Goal 13: Climate Action"],
     "Circular Food System", "Outward", False, 15, 14),
    (14, "SDG 14 - Life Below Water", ["SDG 14 - Life Below Water"],
     "Regenerative Ocean Farming", "Inward", False, 16, 16),
    (15, "SDG 15: Life on Land", ["SDG 15: Life on Land"], "Global collaboration", "Inward", False, 20, 19),
    (16, "SDG 16 - Peace, Justice, and Strong Institutions",
     ["SDG 16 - Peace, Justice, and Strong Institutions"], "Citizen Diplomacy", "Inward", False, 17, 16),
    (17, "SDG 17 - Partnerships for the Goals",
     ["SDG 17 - Partnerships for the Goals", "Online Communities"],
     "Global Collaboration on Mechanisms", "Inward", False, 16, 14),
]

FORMAL_GRAPH_ROWS = [
    (1, "No Poverty", ["No Poverty"], "Philanthropic Organizations", "Inward", False, 14, 16),
    (2, "Zero Hunger", ["Zero Hunger"], "Cultural Food Traditions", "Outward", False, 19, 18),
    (3, "Goal 3: Good Health and Well-being", ["Goal 3: Good Health and Well-being"],
     "Stress Reduction Techniques", "Inward", False, 15, 14),
    (4, "SDGs Goal4: Quality Education", ["White Paper"],
     "Transparency and Accountability in AI", "Outward", True, 22, 21),
    (5, "SDGs Goal 5", ["Implementation Strategies"], "International Development", "Outward", False, 15, 14),
    (6, "SDG6", ["White Paper"], "Roles and Responsibilities", "Outward", False, 13, 7),
    (7, "Goal 7: Affordable and Clean Energy",
     ["Goal 7: Affordable and Clean Energy", "Progress Measurement"],
     "Global Challenges", "Outward", False, 31, 30),
    (8, "Decent Work and Economic Growth", ["Decent Work and Economic Growth"],
     "Well-being and Sustainability", "Inward", False, 18, 17),
    (9, "Innovation", ["Innovation", "Holistic Approach", "Ethical Imperative"],
     "Environmental Stewardship", "Outward", False, 17, 15),
    (10, "Equitable Access to Quality Education", ["Individual Action"],
     "Philanthropy and Impact Investing", "Outward", False, 12, 6),
    (11, "Sustainable Cities and Communities", ["Sustainable Cities and Communities"],
     "Global Collaboration", "Inward", False, 10, 9),
    (12, "SDG 12", ["SDG 12"], "Collaboration and Partnerships", "Outward", False, 11, 10),
    (13, "Climate Change", ["Climate Change"], "Vision", "Outward", False, 40, 39),
    (14, "Goal 14: Life Below Water", ["Goal 14: Life Below Water"],
     "Harmony with the Ocean", "Outward", False, 14, 13),
    (15, "SDG 15", ["SDG 15"], "Education and Awareness", "Inward", False, 9, 8),
    (16, "SDG 16", ["Disinformation"], "White Paper", "Outward", True, 42, 29),
    (17, "Partnerships for the Goals", ["Partnerships for the Goals"],
     "Technology Serving Humanity", "Inward", True, 41, 37),
]

_FILLER_CONCEPTS = [
    "Community Voices", "Policy Levers", "Local Pilots", "Shared Metrics",
    "Public Trust", "Funding Pathways", "Open Standards", "Youth Perspectives",
    "Regional Networks", "Evidence Base", "Civic Platforms", "Long-term Stewardship",
    "Skills Transfer", "Inclusive Design", "Accountability Loops", "Storytelling",
    "Cross-border Learning", "Behavioral Nudges", "Market Incentives", "Resilient Systems",
    "Grassroots Energy", "Institutional Memory", "Participatory Budgeting", "Digital Commons",
    "Early Warning", "Cultural Context", "Measurement Gaps", "Pilot-to-Scale Paths",
    "Coalition Building", "Knowledge Brokers", "Feedback Channels", "Transition Plans",
    "Risk Pooling", "Service Delivery", "Local Ownership", "Adaptive Management",
    "Capacity Gaps", "Trust Networks", "Incentive Alignment", "Common Language",
]

_RELATIONS = ["supports", "requires", "builds on", "informs", "enables", "addresses"]


def _direction_split(n_links: int, trend: str, intricate: bool) -> tuple[int, int]:
    """(outward, inward) counts realizing the trend; intricate keeps the
    margin at 1-2 links, otherwise the majority is clear."""
    if intricate:
        major = n_links // 2 + 1
    else:
        minor = n_links // 4
        major = n_links - minor
    minor = n_links - major
    if trend == "Outward":
        return major, minor
    if trend == "Inward":
        return minor, major
    half = n_links // 2
    return half, n_links - half


def build_reference_graph(dataset: str, row: tuple) -> KnowledgeGraph:
    """Deterministic graph matching one reference per-goal row: node/link
    counts, initial (order 1) and final (max order) ids, the exact
    most-connected set, and the arrow-direction trend."""
    goal, initial, hubs, final, trend, intricate, n_nodes, n_links = row

    ids: list[str] = [initial]
    for h in hubs:
        if h not in ids:
            ids.append(h)
    filler = iter(_FILLER_CONCEPTS)
    reserved = set(ids) | {final}
    while len(ids) < n_nodes - 1:
        name = next(filler, None)
        if name is None:
            name = f"Working Concept {len(ids)}"
        if name in reserved:
            continue
        ids.append(name)
        reserved.add(name)
    ids.append(final)
    assert len(ids) == n_nodes and len(set(ids)) == n_nodes

    hub_idx = [ids.index(h) for h in hubs]
    peripheral_idx = [i for i in range(n_nodes) if i not in hub_idx]
    m = len(hubs)
    per_hub = n_links // m
    remainder = n_links - per_hub * m

    pairs: list[tuple[int, int]] = []
    p = 0
    for _ in range(per_hub):
        for h in hub_idx:
            pairs.append((h, peripheral_idx[p % len(peripheral_idx)]))
            p += 1
    for _ in range(remainder):
        a = peripheral_idx[p % len(peripheral_idx)]
        b = peripheral_idx[(p + 1) % len(peripheral_idx)]
        pairs.append((a, b))
        p += 2

    outward, _inward = _direction_split(n_links, trend, intricate)
    links = []
    for i, (a, b) in enumerate(pairs):
        lo, hi = (a, b) if a < b else (b, a)
        src, dst = (lo, hi) if i < outward else (hi, lo)
        links.append(KgLink(
            source=ids[src], target=ids[dst], relation=_RELATIONS[i % len(_RELATIONS)],
        ))

    nodes = tuple(
        KgNode(id=name, order=i + 1, details=f"{name} as raised in the goal {goal} roundtable.")
        for i, name in enumerate(ids)
    )
    graph = KnowledgeGraph(
        goal=goal, dataset=dataset, nodes=nodes, links=tuple(links),
        provenance=RunMetadata(model="fixture", seed=0, timestamp="", prompt_hash=""),
    )

    from .analytics import kg_metrics

    metrics = kg_metrics(graph)
    assert metrics.initial_node == initial and metrics.final_node == final
    assert metrics.most_connected == hubs, (goal, metrics.most_connected)
    assert metrics.direction_trend == trend and metrics.intricate == intricate
    assert metrics.n_nodes == n_nodes and metrics.n_links == n_links
    return graph


def reference_graphs(label: str) -> list[KnowledgeGraph]:
    rows = {"preliminary": PRELIMINARY_GRAPH_ROWS, "formal": FORMAL_GRAPH_ROWS}[label]
    return [build_reference_graph(label, row) for row in rows]


def write_graph_fixture(label: str, path: Path) -> None:
    doc = {
        "dataset": label,
        "graphs": [
            {
                "goal": g.goal,
                "nodes": [{"id": n.id, "order": n.order, "details": n.details} for n in g.nodes],
                "links": [{"source": l.source, "target": l.target, "relation": l.relation} for l in g.links],
            }
            for g in reference_graphs(label)
        ],
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def load_graph_fixture(store: Store, label: str, path: Path | None = None) -> int:
    """Insert fixture graphs (and placeholder transcripts to satisfy
    referential integrity). Returns the number of graphs loaded."""
    path = path or _fixture_path(f"graphs_{label}.json")
    doc = json.loads(path.read_text(encoding="utf-8"))
    for g in doc["graphs"]:
        goal = g["goal"]
        text = f"Reference roundtable for goal {goal} ({label})."
        store.put_transcript(label, RoundtableTranscript(
            goal=goal, dataset=label, participant_ids=(),
            text=text, word_count=len(text.split()),
            run_metadata=RunMetadata(model="fixture", seed=0, timestamp="", prompt_hash=""),
        ))
        store.put_graph(label, KnowledgeGraph(
            goal=goal, dataset=label,
            nodes=tuple(KgNode(n["id"], n["order"], n["details"]) for n in g["nodes"]),
            links=tuple(KgLink(l["source"], l["target"], l["relation"]) for l in g["links"]),
            provenance=RunMetadata(model="fixture", seed=0, timestamp="", prompt_hash=""),
        ))
    return len(doc["graphs"])


def load_new_goals_doc(label: str, path: Path | None = None) -> dict:
    """Raw reference NewGoalsDoc for the dataset (parse with
    structured.parse_structured / synthesis.parse_proposals)."""
    path = path or _fixture_path(f"new_goals_{label}.json")
    return json.loads(path.read_text(encoding="utf-8"))


# --------------------------------------------------------------------------
# Corpus fixture directories
# --------------------------------------------------------------------------

_MINI_VIDEOS = [
    # (video_id, title, published, duration, usable transcript theme)
    ("v001", "The hidden cost of dirty water", "2023-03-15", 600,
     "Every community deserves clean water. This talk follows engineers improving sanitation and "
     "hygiene in rapidly growing towns, showing how safe drinking water transforms public health "
     "and how simple wastewater treatment protects whole watersheds. Good health begins with the "
     "well-being that reliable water brings to families."),
    ("v002", "Teaching the world to read", "2023-05-10", 720,
     "Education unlocks everything else. From village classrooms to national curriculum reform, this "
     "talk shows how literacy programs led by a committed teacher change the trajectory of every "
     "student. It also examines why girls are still left behind, and how gender equality in school "
     "enrollment lifts the empowerment of women across generations."),
    ("v003", "Clean energy for every village", "2020-09-12", 900,
     "Affordable solar microgrids are rewriting rural economics. The speaker traces how renewable "
     "energy and reliable electricity let families escape extreme poverty, and why clean energy "
     "finance, not charity, closes the gap for poor households still burning kerosene fuel."),
    ("v004", "Oceans in crisis", "2021-06-20", 840,
     "The ocean absorbs most of the heat from our emissions. This talk dives into marine ecosystems, "
     "coral bleaching, and coastal communities confronting climate change, arguing that climate "
     "adaptation and protecting the sea must be planned together."),
    ("v005", "Members-only strategy session", "2022-02-01", 600, None),
    ("v006", "The silent lecture", "2022-03-05", 480, None),
    ("v007", "A very long conversation", "2023-08-18", 1500,
     "This extended interview runs far past the usual talk format."),
    ("v008", "Una charla en otro idioma", "2023-04-02", 600,
     "Esta charla no tiene subtitulos en ingles."),
    ("v009", "Jobs of the future", "2022-10-07", 660,
     "Decent work is more than a paycheck. The talk maps how automation reshapes employment, why "
     "labour protections and fair wages drive productivity, and how inclusion of marginalized "
     "workers reduces the income gap. Tackling inequality starts with who gets hired."),
    ("v010", "Cities that breathe", "2024-01-25", 780,
     "Urban design decides how we live. From transport corridors to affordable housing, the speaker "
     "shows how cities can cut waste through recycling and a circular economy, making responsible "
     "consumption the default for every neighborhood and community."),
    ("v012", "The talk that cannot be summarized", "2023-09-30", 600,
     "[[blocked-content]] This transcript simulates content a provider refuses to process."),
    ("v013", "Forests, food, and the future", "2021-11-11", 720,
     "Healthy land feeds us twice. This talk connects forest restoration and biodiversity to food "
     "security, showing how regenerative agriculture reduces hunger while halting deforestation. "
     "Farming with the ecosystem instead of against it ends the cycle of malnutrition."),
    ("v014", "Peace is a practice", "2020-04-14", 600,
     "Strong institutions are built, not inherited. The speaker recounts campaigns against "
     "corruption, for rule of law and accountability, and explains why global partnership and "
     "cooperation between governments and civil society keeps peace and justice durable."),
    ("v015", "The infrastructure of imagination", "2022-07-22", 660,
     "Innovation is a public good. From manufacturing floors to broadband maps, this talk argues "
     "that resilient infrastructure and industrial research capacity decide which ideas reach "
     "scale, and why technology transfer matters as much as invention."),
]

_MINI_OUT_OF_WINDOW = ("v011", "A talk from another era", "2019-05-01", 600,
                       "This one predates the collection window entirely.")


def write_mini_corpus(out_dir: str | Path) -> Path:
    """Small handcrafted fixture corpus: per-video metadata + transcript
    files, including member-only, caption-less, over-length, non-English,
    out-of-window, and safety-blocked cases."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = _MINI_VIDEOS + [_MINI_OUT_OF_WINDOW]
    for vid, title, published, duration, transcript in rows:
        meta = {
            "video_id": vid,
            "title": title,
            "published_at": f"{published}T12:00:00+00:00",
            "duration": duration,
            "channel": "TED",
            "language": "es" if vid == "v008" else "en",
            "member_only": vid == "v005",
            "has_captions": vid != "v006",
        }
        (out_dir / f"{vid}.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
        if transcript is not None and not meta["member_only"] and meta["has_captions"]:
            (out_dir / f"{vid}.txt").write_text(transcript + "\n", encoding="utf-8")
    return out_dir


def write_paper_corpus(out_dir: str | Path) -> Path:
    """Paper-scale fixture corpus: 271 videos dated 2023 (269 with usable
    transcripts) plus 861 outside 2023 within the formal window (858 usable),
    so the preliminary window collects 271/269 and the formal window yields
    1127 usable talks."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    def emit(i: int, published: str, member_only=False, captions=True, duration=600):
        vid = f"vid{i:04d}"
        meta = {
            "video_id": vid, "title": f"Corpus talk {i}",
            "published_at": f"{published}T12:00:00+00:00", "duration": duration,
            "channel": "TED", "language": "en",
            "member_only": member_only, "has_captions": captions,
        }
        (out_dir / f"{vid}.json").write_text(json.dumps(meta) + "\n", encoding="utf-8")
        if captions and not member_only:
            (out_dir / f"{vid}.txt").write_text(f"Transcript for corpus talk {i}.\n", encoding="utf-8")

    i = 1
    day = date(2023, 1, 1)
    for k in range(271):
        emit(i, day.isoformat(), member_only=(k == 0), captions=(k != 1))
        day += timedelta(days=1)
        if day.year != 2023:
            day = date(2023, 1, 1)
        i += 1

    spans = [(date(2020, 1, 1), date(2022, 12, 31)), (date(2024, 1, 1), date(2024, 4, 30))]
    day = spans[0][0]
    span = 0
    for k in range(861):
        bad = {0: {"duration": 1500}, 1: {"member_only": True}, 2: {"captions": False}}.get(k, {})
        emit(i, day.isoformat(), **bad)
        day += timedelta(days=1)
        if day > spans[span][1]:
            span = (span + 1) % len(spans)
            day = spans[span][0]
        i += 1
    return out_dir


# --------------------------------------------------------------------------
# Regeneration entry point for the checked-in fixture files
# --------------------------------------------------------------------------


def regenerate_all(resource_dir: Path | None = None, mini_dir: Path | None = None) -> None:
    resource_dir = resource_dir or _fixture_path("").parent / "fixtures"
    for label in ("preliminary", "formal"):
        write_tag_fixture(label, resource_dir / f"tags_{label}.jsonl")
        write_graph_fixture(label, resource_dir / f"graphs_{label}.json")
    if mini_dir is not None:
        write_mini_corpus(mini_dir)


if __name__ == "__main__":
    regenerate_all()
    print("fixture files regenerated")
