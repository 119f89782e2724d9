from __future__ import annotations

import pytest

from ideaforge import BrokenTrace, EmptyClaimSet, KnowledgeGraph, NodeLabel
from ideaforge.drafter import (
    DISCLAIMER,
    assemble_context,
    draft,
    render_markdown,
    trace_claims,
)
from ideaforge.llm import Text

from conftest import build_fallback_graph, offline_llm, scripted_llm

STUB_SECTIONS = """Title: Voice legal helper
Field: This relates to spoken legal guidance systems.
Background: Existing systems require literacy.
Abstract: A spoken-dialogue legal helper for low-literacy users.
Claims:
1. something the model wrote
"""


def test_assemble_context_fallback_graph(fallback_graph):
    graph, _, _ = fallback_graph
    context = assemble_context(graph, top_k=3)
    assert len(context.ranked_claims) == 3
    assert len(context.contradictions) == 1
    assert len(context.principles) == 2
    assert len(context.user_needs) == 1
    assert context.problem_statement.startswith("a voice-first legal assistant")
    # ordering matches the ranking: strongest methodology first
    assert [c.methodology for c in context.ranked_claims] == ["TRIZ", "DT", "SCAMPER"]


def test_assemble_context_no_contradictions():
    graph = KnowledgeGraph()
    graph.create_node(NodeLabel.PROBLEM, {"statement": "s", "domain": "d"})
    graph.create_node(NodeLabel.CLAIM, {"text": "bare claim", "methodology": "DT", "strength": 0.65})
    context = assemble_context(graph)
    assert context.contradictions == []
    assert context.principles == []
    assert context.problem_statement == "s"


def test_assemble_context_top_k_one(fallback_graph):
    graph, _, _ = fallback_graph
    context = assemble_context(graph, top_k=1)
    assert len(context.ranked_claims) == 1
    assert context.ranked_claims[0].methodology == "TRIZ"


def test_assemble_context_empty_graph():
    with pytest.raises(EmptyClaimSet):
        assemble_context(KnowledgeGraph())


def test_draft_fallback_has_all_sections(fallback_graph):
    graph, _, _ = fallback_graph
    context = assemble_context(graph)
    document = draft(context, offline_llm())
    assert document.title
    assert document.field_text
    assert document.background
    assert document.abstract
    assert len(document.claims) == 3
    assert document.disclaimer == DISCLAIMER


def test_draft_uses_stub_sections_verbatim(fallback_graph):
    graph, _, _ = fallback_graph
    context = assemble_context(graph)
    document = draft(context, scripted_llm(Text(STUB_SECTIONS)))
    assert document.title == "Voice legal helper"
    assert document.field_text == "This relates to spoken legal guidance systems."
    assert document.background == "Existing systems require literacy."
    assert document.abstract == "A spoken-dialogue legal helper for low-literacy users."
    # claims are renumbered from the ranking, not taken from the model
    assert [c.number for c in document.claims] == [1, 2, 3]
    assert [c.methodology for c in document.claims] == ["TRIZ", "DT", "SCAMPER"]


def test_draft_missing_abstract_falls_back(fallback_graph):
    graph, _, _ = fallback_graph
    without_abstract = "\n".join(
        line for line in STUB_SECTIONS.splitlines() if not line.startswith("Abstract")
    )
    context = assemble_context(graph)
    document = draft(context, scripted_llm(Text(without_abstract)))
    assert document.title == "Voice legal helper"
    assert document.abstract != ""
    assert "3 analysed claims" in document.abstract


def test_claim_one_is_independent_top_ranked(fallback_graph):
    graph, _, _ = fallback_graph
    context = assemble_context(graph)
    document = draft(context, offline_llm())
    first = document.claims[0]
    assert first.kind == "independent"
    assert first.depends_on is None
    top = context.ranked_claims[0]
    assert top.text.rstrip(".") in first.text
    for dependent in document.claims[1:]:
        assert dependent.kind == "dependent"
        assert dependent.depends_on == 1
        assert "claim 1" in dependent.text


def test_trace_paths_by_methodology(fallback_graph):
    graph, _, _ = fallback_graph
    context = assemble_context(graph)
    document = draft(context, offline_llm())
    table = trace_claims(document, graph)
    assert len(table) == len(document.claims)
    by_methodology = {c.methodology: c.trace for c in document.claims}
    assert [label for _, label in by_methodology["TRIZ"]] == [
        "Problem", "Contradiction", "Principle", "Claim",
    ]
    assert [label for _, label in by_methodology["DT"]] == ["UserNeed", "Problem", "Claim"]
    assert [label for _, label in by_methodology["SCAMPER"]] == ["Transformation", "Claim"]
    for _, trace in table:
        assert all(graph.has_node(node_id) for node_id, _ in trace)


def test_trace_against_wrong_graph_is_broken(fallback_graph):
    graph, _, _ = fallback_graph
    document = draft(assemble_context(graph), offline_llm())
    with pytest.raises(BrokenTrace):
        trace_claims(document, KnowledgeGraph())


def test_render_markdown_structure(fallback_graph):
    graph, _, _ = fallback_graph
    document = draft(assemble_context(graph), offline_llm())
    markdown = render_markdown(document)
    for heading in ("## Field", "## Background", "## Abstract", "## Claims", "## Claim Traceability"):
        assert heading in markdown
    assert DISCLAIMER in markdown
    assert "1. " in markdown and "2. " in markdown and "3. " in markdown
    # one trace row per numbered claim
    assert markdown.count("| ") >= len(document.claims)
    assert "Problem(" in markdown
