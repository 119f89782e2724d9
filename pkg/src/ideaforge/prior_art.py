"""Prior-art retrieval from the arXiv Atom API and similarity attachment.

Retrieval failures of any kind (offline mode, network errors, malformed
feeds) degrade to an empty result with a logged warning: missing prior art
must never abort an analysis run.
"""

from __future__ import annotations

import logging
import time
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import requests

from .exceptions import EmptyIdea
from .graph import EdgeType, KnowledgeGraph, NodeLabel
from .llm import LlmGateway, Malformed, Unavailable
from .similarity import informative_tokens, jaccard

logger = logging.getLogger(__name__)

ARXIV_ENDPOINT = "http://export.arxiv.org/api/query"
ATOM_NS = {"atom": "http://www.w3.org/2005/Atom"}

DEFAULT_MAX_RESULTS = 5
DEFAULT_CHALLENGE_THRESHOLD = 0.2

# arXiv asks clients to leave >= 3 s between requests.
_MIN_REQUEST_INTERVAL = 3.0
_last_request_time = 0.0


@dataclass
class PriorArtRecord:
    title: str
    abstract: str
    source: str
    similarity: float = 0.0


def derive_query(idea: str, max_terms: int = 5) -> str:
    """Build a keyword query from the idea's leading informative tokens."""
    tokens = informative_tokens(idea)
    if not tokens:
        raise EmptyIdea("idea text contains no informative tokens")
    return " ".join(tokens[:max_terms])


def parse_atom_feed(xml_text: str) -> list[PriorArtRecord]:
    """Extract (title, summary, id) records from an Atom 1.0 feed."""
    root = ET.fromstring(xml_text)
    records = []
    for entry in root.findall("atom:entry", ATOM_NS):
        title = entry.findtext("atom:title", default="", namespaces=ATOM_NS)
        summary = entry.findtext("atom:summary", default="", namespaces=ATOM_NS)
        source = entry.findtext("atom:id", default="", namespaces=ATOM_NS)
        title = " ".join(title.split())
        if not title:
            continue
        records.append(PriorArtRecord(title, " ".join(summary.split()), source.strip()))
    return records


def search(
    query: str,
    max_results: int = DEFAULT_MAX_RESULTS,
    offline: bool = False,
    fixture_path: str | Path | None = None,
    timeout: float = 30.0,
) -> list[PriorArtRecord]:
    """Fetch prior-art records; never raises.

    A fixture file substitutes for the network when given; offline mode with
    no fixture returns nothing.
    """
    if fixture_path is not None:
        try:
            xml_text = Path(fixture_path).read_text(encoding="utf-8")
            return parse_atom_feed(xml_text)[:max_results]
        except Exception as exc:
            logger.warning("prior-art fixture unusable (%s); continuing without", exc)
            return []
    if offline:
        return []
    global _last_request_time
    wait = _MIN_REQUEST_INTERVAL - (time.monotonic() - _last_request_time)
    if wait > 0:
        time.sleep(wait)
    try:
        _last_request_time = time.monotonic()
        response = requests.get(
            ARXIV_ENDPOINT,
            params={"search_query": f"all:{query}", "max_results": max_results},
            timeout=timeout,
        )
        response.raise_for_status()
        return parse_atom_feed(response.text)[:max_results]
    except Exception as exc:
        logger.warning("prior-art search failed (%s); continuing without", exc)
        return []


def _llm_similarity(record: PriorArtRecord, idea: str, llm: LlmGateway) -> float | None:
    """Optional model-based refinement; None keeps the keyword-overlap score."""
    prompt = (
        "Rate how similar this published work is to the idea, from 0.0 "
        "(unrelated) to 1.0 (identical).\n\n"
        f"Idea: {idea}\n\n"
        f"Work: {record.title}. {record.abstract[:400]}\n\n"
        'Respond with a single JSON object: {"similarity": 0.0}'
    )
    result = llm.generate_json(llm.make_request(prompt), ["similarity"])
    if isinstance(result, (Malformed, Unavailable)):
        return None
    value = result.get("similarity")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return None
    if not 0.0 <= float(value) <= 1.0:
        return None
    return float(value)


def score_and_attach(
    records: list[PriorArtRecord],
    idea: str,
    graph: KnowledgeGraph,
    challenge_threshold: float = DEFAULT_CHALLENGE_THRESHOLD,
    llm: LlmGateway | None = None,
) -> int:
    """Store each record as a PriorArt node and link challenged claims.

    The node's similarity is keyword overlap between the record text and the
    idea (optionally refined by the model); a CHALLENGES edge goes to every
    claim whose own overlap with the record meets ``challenge_threshold``.
    Returns the number of CHALLENGES edges created.
    """
    claims = graph.get_claims()
    edges_created = 0
    for record in records:
        record_text = f"{record.title} {record.abstract}"
        record.similarity = jaccard(record_text, idea)
        if llm is not None:
            refined = _llm_similarity(record, idea, llm)
            if refined is not None:
                record.similarity = refined
        node_id = graph.create_node(
            NodeLabel.PRIOR_ART,
            {
                "title": record.title,
                "source": record.source,
                "similarity": record.similarity,
            },
        )
        for claim in claims:
            claim_similarity = jaccard(record_text, str(claim.properties["text"]))
            if claim_similarity >= challenge_threshold:
                graph.create_edge(node_id, claim.id, EdgeType.CHALLENGES)
                edges_created += 1
    return edges_created


def run_prior_art(
    idea: str,
    graph: KnowledgeGraph,
    max_results: int = DEFAULT_MAX_RESULTS,
    offline: bool = False,
    fixture_path: str | Path | None = None,
    challenge_threshold: float = DEFAULT_CHALLENGE_THRESHOLD,
    llm: LlmGateway | None = None,
) -> dict[str, Any]:
    """Full prior-art pass: derive query, search, score, attach."""
    try:
        query = derive_query(idea)
    except EmptyIdea:
        logger.warning("idea has no informative tokens; skipping prior art")
        return {"query": "", "records": 0, "challenges": 0}
    records = search(query, max_results, offline=offline, fixture_path=fixture_path)
    challenges = score_and_attach(
        records, idea, graph, challenge_threshold=challenge_threshold, llm=llm
    )
    return {"query": query, "records": len(records), "challenges": challenges}
