from __future__ import annotations

import json
import logging
import re

import pytest

from ideaforge import EmptyIdea, KnowledgeGraph, NodeLabel
from ideaforge.graph import EdgeType
from ideaforge.llm import Text
from ideaforge.prior_art import (
    PriorArtRecord,
    derive_query,
    parse_atom_feed,
    score_and_attach,
    search,
)

from conftest import ARXIV_FIXTURE, LEGAL_IDEA, build_fallback_graph, scripted_llm


def test_derive_query_hand_tokenization():
    # oracle: hand tokenization with the module's stopword list
    assert derive_query(LEGAL_IDEA, max_terms=5) == "voice first legal assistant hindi"


def test_derive_query_stopword_only_idea():
    with pytest.raises(EmptyIdea):
        derive_query("the of and for in")


def test_derive_query_single_token_identity():
    assert derive_query("sepsis") == "sepsis"


def test_parse_fixture_five_records():
    xml_text = ARXIV_FIXTURE.read_text(encoding="utf-8")
    records = parse_atom_feed(xml_text)
    assert len(records) == 5
    # oracle: independent extraction of titles straight from the raw XML
    raw_titles = re.findall(r"<title>([^<]+)</title>", xml_text)[1:]  # skip feed title
    assert [r.title for r in records] == [" ".join(t.split()) for t in raw_titles]
    assert all(r.abstract for r in records)
    assert all(r.source.startswith("http://arxiv.org/abs/") for r in records)
    assert all(r.similarity == 0.0 for r in records)


def test_search_fixture_mode(tmp_path):
    records = search("ignored", max_results=5, fixture_path=ARXIV_FIXTURE)
    assert len(records) == 5
    assert search("ignored", max_results=2, fixture_path=ARXIV_FIXTURE)[1].title == records[1].title


def test_search_offline_no_fixture():
    assert search("anything", offline=True) == []


def test_search_malformed_fixture(tmp_path, caplog):
    bad = tmp_path / "bad.xml"
    bad.write_text("<feed><entry><title>unclosed")
    with caplog.at_level(logging.WARNING):
        records = search("anything", fixture_path=bad)
    assert records == []
    assert any("fixture" in r.message for r in caplog.records)


def test_search_network_failure_degrades(monkeypatch, caplog):
    import requests

    def boom(*args, **kwargs):
        raise requests.ConnectionError("refused")

    monkeypatch.setattr(requests, "get", boom)
    with caplog.at_level(logging.WARNING):
        records = search("anything", offline=False)
    assert records == []
    assert any("search failed" in r.message for r in caplog.records)


# -- score_and_attach --------------------------------------------------------------


def test_zero_overlap_record():
    graph = KnowledgeGraph()
    graph.create_node(NodeLabel.CLAIM, {"text": "legal voice", "methodology": "TRIZ", "strength": 0.7})
    record = PriorArtRecord("zzzz qqqq", "wwww", "src:1")
    created = score_and_attach([record], "legal voice", graph)
    assert created == 0
    (node,) = graph.nodes(NodeLabel.PRIOR_ART)
    assert node.properties["similarity"] == 0.0
    assert graph.edges(EdgeType.CHALLENGES) == []


def test_identical_record_full_similarity():
    idea = "voice legal aid"
    graph = KnowledgeGraph()
    claim = graph.create_node(
        NodeLabel.CLAIM, {"text": idea, "methodology": "TRIZ", "strength": 0.7}
    )
    record = PriorArtRecord(idea, "", "src:1")
    created = score_and_attach([record], idea, graph)
    assert created == 1
    (node,) = graph.nodes(NodeLabel.PRIOR_ART)
    assert node.properties["similarity"] == 1.0
    (edge,) = graph.edges(EdgeType.CHALLENGES)
    assert edge.dst == claim


def test_fixture_records_on_fallback_graph():
    graph, _, _ = build_fallback_graph()
    records = search("q", fixture_path=ARXIV_FIXTURE)
    score_and_attach(records, LEGAL_IDEA, graph)
    assert len(graph.nodes(NodeLabel.PRIOR_ART)) == 5


def test_node_count_equals_record_count_regardless_of_edges():
    graph = KnowledgeGraph()
    graph.create_node(NodeLabel.CLAIM, {"text": "alpha beta", "methodology": "DT", "strength": 0.65})
    records = [PriorArtRecord(f"title {i} unrelated", "nothing shared", f"src:{i}") for i in range(4)]
    score_and_attach(records, "alpha beta", graph)
    assert len(graph.nodes(NodeLabel.PRIOR_ART)) == len(records)


def test_challenge_threshold_configurable():
    graph = KnowledgeGraph()
    graph.create_node(NodeLabel.CLAIM, {"text": "voice legal assistant", "methodology": "DT", "strength": 0.65})
    record = PriorArtRecord("voice legal aid", "", "src:1")  # claim overlap 0.5
    assert score_and_attach([record], "x", graph, challenge_threshold=0.6) == 0
    assert score_and_attach([record], "x", graph, challenge_threshold=0.5) == 1


def test_llm_similarity_refinement_overrides():
    graph = KnowledgeGraph()
    graph.create_node(NodeLabel.CLAIM, {"text": "unrelated", "methodology": "DT", "strength": 0.65})
    record = PriorArtRecord("voice legal", "", "src:1")
    llm = scripted_llm(Text(json.dumps({"similarity": 0.42})))
    score_and_attach([record], "voice legal", graph, llm=llm)
    (node,) = graph.nodes(NodeLabel.PRIOR_ART)
    assert node.properties["similarity"] == 0.42


def test_llm_similarity_out_of_range_ignored():
    graph = KnowledgeGraph()
    graph.create_node(NodeLabel.CLAIM, {"text": "unrelated", "methodology": "DT", "strength": 0.65})
    record = PriorArtRecord("voice legal", "", "src:1")
    llm = scripted_llm(Text(json.dumps({"similarity": 7.5})))
    score_and_attach([record], "voice legal", graph, llm=llm)
    (node,) = graph.nodes(NodeLabel.PRIOR_ART)
    assert node.properties["similarity"] == 1.0  # keyword overlap kept
