"""Weighted claim ranking.

Each claim's score combines four graph-derived signals: convergent support,
methodology diversity, the generating agent's strength, and a prior-art
challenge penalty. The count-like components are normalised by the maximum
observed over the current claim set (an empty maximum normalises to 0), so
every component lies in [0, 1]; strength already does.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exceptions import EmptyClaimSet, SchemaViolation
from .graph import EdgeType, KnowledgeGraph, NodeLabel

DEFAULT_WEIGHTS = (0.4, 0.3, 0.2, 0.1)


@dataclass(frozen=True)
class ScoreWeights:
    """Weights for convergence, diversity, strength and the challenge penalty."""

    w1: float = DEFAULT_WEIGHTS[0]
    w2: float = DEFAULT_WEIGHTS[1]
    w3: float = DEFAULT_WEIGHTS[2]
    w4: float = DEFAULT_WEIGHTS[3]

    @classmethod
    def parse(cls, text: str) -> "ScoreWeights":
        """Parse a 'w1,w2,w3,w4' string as used on the command line."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError(f"expected four comma-separated weights, got {text!r}")
        return cls(*(float(p) for p in parts))


@dataclass(frozen=True)
class ScoreBreakdown:
    claim_id: str
    convergent_count: int
    methodology_diversity: int
    claim_strength: float
    prior_art_challenges: int
    norm_convergent: float
    norm_diversity: float
    norm_strength: float
    norm_challenges: float
    total: float

    def to_dict(self) -> dict:
        return {
            "claim_id": self.claim_id,
            "convergent_count": self.convergent_count,
            "methodology_diversity": self.methodology_diversity,
            "claim_strength": self.claim_strength,
            "prior_art_challenges": self.prior_art_challenges,
            "norm_convergent": self.norm_convergent,
            "norm_diversity": self.norm_diversity,
            "norm_strength": self.norm_strength,
            "norm_challenges": self.norm_challenges,
            "total": self.total,
        }


def methodology_diversity(claim_id: str, graph: KnowledgeGraph) -> int:
    """Distinct methodologies backing a claim: its own plus those of every
    claim reachable over one CONVERGENT edge."""
    claim = graph.node(claim_id)
    methodologies = {claim.properties["methodology"]}
    for neighbor, _ in graph.convergent_neighbors(claim_id):
        methodologies.add(neighbor.properties["methodology"])
    return len(methodologies)


def _raw_components(claim_id: str, graph: KnowledgeGraph) -> tuple[int, int, float, int]:
    convergent = len(graph.incident_edges(claim_id, EdgeType.CONVERGENT, "any"))
    challenges = len(graph.incident_edges(claim_id, EdgeType.CHALLENGES, "in"))
    strength = float(graph.node(claim_id).properties["strength"])
    diversity = methodology_diversity(claim_id, graph)
    return convergent, diversity, strength, challenges


def _component_maxima(graph: KnowledgeGraph) -> tuple[int, int, int]:
    max_convergent = max_diversity = max_challenges = 0
    for claim in graph.get_claims():
        convergent, diversity, _, challenges = _raw_components(claim.id, graph)
        max_convergent = max(max_convergent, convergent)
        max_diversity = max(max_diversity, diversity)
        max_challenges = max(max_challenges, challenges)
    return max_convergent, max_diversity, max_challenges


def _normalize(value: int, maximum: int) -> float:
    return value / maximum if maximum > 0 else 0.0


def innovation_score(
    claim_id: str,
    graph: KnowledgeGraph,
    weights: ScoreWeights | None = None,
) -> ScoreBreakdown:
    """Score one claim against the current claim set."""
    weights = weights or ScoreWeights()
    node = graph.node(claim_id)
    if node.label != NodeLabel.CLAIM:
        raise SchemaViolation(f"node {claim_id} is a {node.label.value}, not a Claim")
    convergent, diversity, strength, challenges = _raw_components(claim_id, graph)
    max_convergent, max_diversity, max_challenges = _component_maxima(graph)
    norm_convergent = _normalize(convergent, max_convergent)
    norm_diversity = _normalize(diversity, max_diversity)
    norm_challenges = _normalize(challenges, max_challenges)
    total = (
        weights.w1 * norm_convergent
        + weights.w2 * norm_diversity
        + weights.w3 * strength
        - weights.w4 * norm_challenges
    )
    return ScoreBreakdown(
        claim_id=claim_id,
        convergent_count=convergent,
        methodology_diversity=diversity,
        claim_strength=strength,
        prior_art_challenges=challenges,
        norm_convergent=norm_convergent,
        norm_diversity=norm_diversity,
        norm_strength=strength,
        norm_challenges=norm_challenges,
        total=total,
    )


def rank_claims(
    graph: KnowledgeGraph, weights: ScoreWeights | None = None
) -> list[tuple[str, ScoreBreakdown]]:
    """All claims ordered by descending score.

    Ties break on higher strength, then on insertion order, so the ranking
    is deterministic for a fixed graph.
    """
    weights = weights or ScoreWeights()
    claims = graph.get_claims()
    if not claims:
        raise EmptyClaimSet("graph contains no claims to rank")
    scored = [(claim.id, innovation_score(claim.id, graph, weights)) for claim in claims]
    order = {claim.id: index for index, claim in enumerate(claims)}
    scored.sort(
        key=lambda item: (-item[1].total, -item[1].claim_strength, order[item[0]])
    )
    return scored
