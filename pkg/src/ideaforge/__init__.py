"""ideaforge: multi-methodology innovation analysis over a typed property graph.

Three methodology agents write structured analysis into a shared graph,
cross-methodology claim convergence is detected by text similarity, claims
are ranked by a weighted innovation score, and the top claims become a
traceable patent draft. Everything runs fully offline via deterministic
fallbacks.
"""

__version__ = "0.1.0"

from .agents import (
    CLAIM_STRENGTH,
    AgentReport,
    Methodology,
    run_design_thinking,
    run_scamper,
    run_triz,
)
from .convergence import (
    ConvergenceConfig,
    ConvergentPair,
    convergent_pairs,
    detect_convergence,
)
from .drafter import ContextBundle, PatentDraft, assemble_context, draft, trace_claims
from .exceptions import (
    BrokenTrace,
    CorruptSnapshot,
    DimensionMismatch,
    EmptyClaimSet,
    EmptyIdea,
    IdeaForgeError,
    ProviderUnavailable,
    SchemaViolation,
    UnknownNode,
    ZeroVector,
)
from .graph import (
    Edge,
    EdgeType,
    GraphSummary,
    KnowledgeGraph,
    Node,
    NodeLabel,
    Subgraph,
)
from .llm import (
    GenerationRequest,
    LlmGateway,
    Malformed,
    Text,
    Unavailable,
    extract_json_object,
)
from .pipeline import PipelineConfig, RunReport, run_pipeline
from .prior_art import PriorArtRecord, derive_query, score_and_attach, search
from .scoring import (
    ScoreBreakdown,
    ScoreWeights,
    innovation_score,
    methodology_diversity,
    rank_claims,
)
from .similarity import (
    EmbeddingVector,
    HttpEmbeddingProvider,
    StubEmbeddingProvider,
    cosine,
    jaccard,
    tokenize,
)

__all__ = [
    "__version__",
    "AgentReport",
    "BrokenTrace",
    "CLAIM_STRENGTH",
    "ContextBundle",
    "ConvergenceConfig",
    "ConvergentPair",
    "CorruptSnapshot",
    "DimensionMismatch",
    "Edge",
    "EdgeType",
    "EmbeddingVector",
    "EmptyClaimSet",
    "EmptyIdea",
    "GenerationRequest",
    "GraphSummary",
    "HttpEmbeddingProvider",
    "IdeaForgeError",
    "KnowledgeGraph",
    "LlmGateway",
    "Malformed",
    "Methodology",
    "Node",
    "NodeLabel",
    "PatentDraft",
    "PipelineConfig",
    "PriorArtRecord",
    "ProviderUnavailable",
    "RunReport",
    "SchemaViolation",
    "ScoreBreakdown",
    "ScoreWeights",
    "StubEmbeddingProvider",
    "Subgraph",
    "Text",
    "Unavailable",
    "UnknownNode",
    "ZeroVector",
    "assemble_context",
    "convergent_pairs",
    "cosine",
    "derive_query",
    "detect_convergence",
    "draft",
    "extract_json_object",
    "innovation_score",
    "jaccard",
    "methodology_diversity",
    "rank_claims",
    "run_design_thinking",
    "run_pipeline",
    "run_scamper",
    "run_triz",
    "score_and_attach",
    "search",
    "tokenize",
    "trace_claims",
]
