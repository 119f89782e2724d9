"""Cross-methodology convergence detection.

Claims produced by different methodologies are compared pairwise; any pair
whose text similarity meets the threshold gets (or re-counts) a CONVERGENT
edge. Similarity comes from the configured embedding provider, downgrading
to token-set Jaccard whenever the provider cannot deliver.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Protocol, Sequence

from .exceptions import ProviderUnavailable
from .graph import EdgeType, KnowledgeGraph, Node
from .similarity import EmbeddingVector, cosine, jaccard_sets, token_set

logger = logging.getLogger(__name__)

DEFAULT_THETA = 0.65


class EmbeddingProvider(Protocol):
    tag: str

    def embed(self, text: str) -> EmbeddingVector: ...
    def embed_many(self, texts: Sequence[str]) -> list[EmbeddingVector]: ...


@dataclass(frozen=True)
class ConvergenceConfig:
    """Detection parameters: threshold in (0, 1] and similarity provider.

    ``provider=None`` selects the Jaccard measure directly.
    """

    theta: float = DEFAULT_THETA
    provider: EmbeddingProvider | None = None

    def __post_init__(self):
        if not 0.0 < self.theta <= 1.0:
            raise ValueError(f"theta must be in (0, 1], got {self.theta!r}")


@dataclass(frozen=True)
class ConvergentPair:
    claim_a: str
    claim_b: str
    similarity: float
    count: int

    def to_dict(self) -> dict:
        return {
            "claim_a": self.claim_a,
            "claim_b": self.claim_b,
            "similarity": self.similarity,
            "count": self.count,
        }


def _pairwise_similarities(
    claims: list[Node], config: ConvergenceConfig
) -> dict[tuple[str, str], float]:
    """Similarity for every cross-methodology pair, keyed by (id_a, id_b).

    Pairs are enumerated in insertion order, so the result is independent of
    how claims are grouped by methodology.
    """
    texts = {c.id: str(c.properties["text"]) for c in claims}
    vectors: dict[str, EmbeddingVector] | None = None
    if config.provider is not None:
        try:
            embedded = config.provider.embed_many([texts[c.id] for c in claims])
            vectors = {c.id: v for c, v in zip(claims, embedded)}
        except ProviderUnavailable as exc:
            logger.warning("embedding provider unavailable (%s); using Jaccard", exc)
    token_sets = (
        {c.id: token_set(texts[c.id]) for c in claims} if vectors is None else {}
    )

    similarities: dict[tuple[str, str], float] = {}
    for i, first in enumerate(claims):
        for second in claims[i + 1 :]:
            if first.properties["methodology"] == second.properties["methodology"]:
                continue
            if vectors is not None:
                sim = cosine(vectors[first.id], vectors[second.id])
            else:
                sim = jaccard_sets(token_sets[first.id], token_sets[second.id])
            similarities[(first.id, second.id)] = sim
    return similarities


def detect_convergence(
    graph: KnowledgeGraph, config: ConvergenceConfig | None = None
) -> list[ConvergentPair]:
    """Create or re-count CONVERGENT edges for all qualifying claim pairs.

    Returns the pairs that qualified in this pass. Re-running is idempotent
    on the edge set: an already-linked pair only has its count incremented.
    """
    config = config or ConvergenceConfig()
    claims = graph.get_claims()
    pairs = []
    for (id_a, id_b), similarity in _pairwise_similarities(claims, config).items():
        if similarity < config.theta:
            continue
        edge_id = graph.create_edge(
            id_a, id_b, EdgeType.CONVERGENT, {"similarity": similarity, "count": 1}
        )
        edge = graph.edge(edge_id)
        pairs.append(ConvergentPair(edge.src, edge.dst, similarity, int(edge.properties["count"])))
    return pairs


def convergent_pairs(graph: KnowledgeGraph) -> list[ConvergentPair]:
    """All CONVERGENT edges currently stored, as pair records."""
    return [
        ConvergentPair(
            e.src, e.dst, float(e.properties["similarity"]), int(e.properties["count"])
        )
        for e in graph.edges(EdgeType.CONVERGENT)
    ]
