from __future__ import annotations

import socket
from pathlib import Path

import pytest

from ideaforge import KnowledgeGraph, LlmGateway, NodeLabel
from ideaforge.agents import run_design_thinking, run_scamper, run_triz

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
LEGAL_IDEA = "a voice-first legal assistant in Hindi for rural India"

ARXIV_FIXTURE = FIXTURES / "arxiv_legal_tech.xml"
EMBEDDING_STUB = FIXTURES / "embedding_stub_legal.json"


def offline_llm() -> LlmGateway:
    return LlmGateway(offline=True)


def scripted_llm(*outcomes) -> LlmGateway:
    """Gateway whose transport replays the given outcomes, repeating the last."""
    queue = list(outcomes)

    def transport(request):
        return queue.pop(0) if len(queue) > 1 else queue[0]

    return LlmGateway(transport=transport)


def build_fallback_graph(idea: str = LEGAL_IDEA):
    """Problem node plus all three agents on the offline fallback path."""
    graph = KnowledgeGraph()
    problem_id = graph.create_node(
        NodeLabel.PROBLEM, {"statement": idea, "domain": "legal tech"}
    )
    llm = offline_llm()
    reports = {
        "triz": run_triz(idea, problem_id, graph, llm),
        "dt": run_design_thinking(idea, problem_id, graph, llm),
        "scamper": run_scamper(idea, problem_id, graph, llm),
    }
    return graph, problem_id, reports


@pytest.fixture
def fallback_graph():
    graph, problem_id, reports = build_fallback_graph()
    return graph, problem_id, reports


@pytest.fixture
def no_network(monkeypatch):
    """Make any socket construction fail loudly."""

    def deny(*args, **kwargs):
        raise AssertionError("network access attempted in an offline test")

    monkeypatch.setattr(socket, "socket", deny)
    monkeypatch.setattr(socket, "create_connection", deny)
