from __future__ import annotations

from pathlib import Path

import pytest

from goalforge.catalog import load_default_catalog
from goalforge.fixtures import write_paper_corpus
from goalforge.gateway import Gateway, MockProvider, ProviderConfig
from goalforge.models import KgLink, KgNode, KnowledgeGraph, RunMetadata
from goalforge.store import Store

REPO_ROOT = Path(__file__).resolve().parent.parent
MINI_CORPUS = REPO_ROOT / "fixtures" / "mini"
TEST_DATA = Path(__file__).resolve().parent / "data"


@pytest.fixture(scope="session")
def catalog():
    return load_default_catalog()


@pytest.fixture()
def store(tmp_path):
    with Store(tmp_path / "store.db") as s:
        s.migrate("preliminary")
        yield s


@pytest.fixture()
def mock_gateway(catalog):
    def factory(seed: int = 42, **kwargs) -> Gateway:
        config = ProviderConfig(seed=seed, backoff_base=0.0, **kwargs)
        return Gateway(MockProvider(catalog=catalog), config, sleep=lambda s: None)

    return factory


@pytest.fixture(scope="session")
def paper_corpus_dir(tmp_path_factory):
    return write_paper_corpus(tmp_path_factory.mktemp("paper_corpus"))


def make_graph(nodes, links, goal: int = 1, dataset: str = "preliminary") -> KnowledgeGraph:
    """Small graph builder: nodes as (id, order) or (id, order, details),
    links as (source, target) or (source, target, relation)."""
    return KnowledgeGraph(
        goal=goal,
        dataset=dataset,
        nodes=tuple(KgNode(*((n[0], n[1], "") if len(n) == 2 else n)) for n in nodes),
        links=tuple(KgLink(*((l[0], l[1], "") if len(l) == 2 else l)) for l in links),
        provenance=RunMetadata(model="test", seed=0, timestamp="", prompt_hash=""),
    )
