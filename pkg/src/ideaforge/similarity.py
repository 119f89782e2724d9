"""Text tokenization, similarity measures and embedding providers.

The tokenizer here is the single source of truth for every text comparison
in the package: claim convergence, prior-art scoring and query derivation
all share it so that similarity numbers are reproducible.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import requests

from .exceptions import DimensionMismatch, ProviderUnavailable, ZeroVector

_TOKEN_RE = re.compile(r"[a-z0-9]+")

# Fixed ~50-word English stopword list. Embedded (rather than pulled from an
# NLP package) so query derivation and fallback text give identical results
# on every install.
STOPWORDS = frozenset({
    "a", "an", "the", "and", "or", "but", "if", "then", "than", "so",
    "of", "in", "on", "at", "to", "for", "from", "by", "with", "via",
    "as", "is", "are", "was", "were", "be", "been", "being", "it", "its",
    "this", "that", "these", "those", "there", "their", "they", "them",
    "which", "who", "what", "when", "where", "how", "not", "no", "can",
    "will", "would", "should", "could", "may", "into", "over", "such",
    "do", "does", "did", "has", "have", "had",
})


def tokenize(text: str) -> list[str]:
    """Lowercase, split on non-alphanumeric runs, dedupe preserving order."""
    seen: dict[str, None] = {}
    for token in _TOKEN_RE.findall(text.lower()):
        seen.setdefault(token)
    return list(seen)


def token_set(text: str) -> frozenset[str]:
    return frozenset(_TOKEN_RE.findall(text.lower()))


def informative_tokens(text: str) -> list[str]:
    """Ordered deduped tokens with stopwords removed."""
    return [t for t in tokenize(text) if t not in STOPWORDS]


def idea_gist(idea: str, max_tokens: int = 8) -> str:
    """Clip ``idea`` at the end of its ``max_tokens``-th informative token.

    Keeps the original surface form (hyphens, casing, interior stopwords) so
    generated text stays readable. Leading articles are dropped because the
    gist is interpolated after one.
    """
    stripped = re.sub(r"^\s*(a|an|the)\s+", "", idea, flags=re.IGNORECASE)
    count = 0
    end = len(stripped)
    for match in re.finditer(r"[A-Za-z0-9]+", stripped):
        if match.group().lower() in STOPWORDS:
            continue
        count += 1
        if count == max_tokens:
            end = match.end()
            break
    return stripped[:end].strip().rstrip(".,;:!?")


def jaccard(a: str, b: str) -> float:
    """Token-set Jaccard similarity in [0, 1].

    Both texts empty is 1.0 by convention; exactly one empty is 0.0.
    """
    set_a, set_b = token_set(a), token_set(b)
    if not set_a and not set_b:
        return 1.0
    if not set_a or not set_b:
        return 0.0
    return len(set_a & set_b) / len(set_a | set_b)


def jaccard_sets(set_a: frozenset[str], set_b: frozenset[str]) -> float:
    """Jaccard over pre-tokenized sets; avoids re-tokenizing in O(n^2) loops."""
    if not set_a and not set_b:
        return 1.0
    if not set_a or not set_b:
        return 0.0
    return len(set_a & set_b) / len(set_a | set_b)


@dataclass(frozen=True)
class EmbeddingVector:
    """A dense text embedding plus the tag of the provider that produced it."""

    components: tuple[float, ...]
    provider_tag: str


def _unwrap(v: EmbeddingVector | Sequence[float]) -> Sequence[float]:
    return v.components if isinstance(v, EmbeddingVector) else v


def cosine(u: EmbeddingVector | Sequence[float], v: EmbeddingVector | Sequence[float]) -> float:
    """Cosine similarity dot(u,v) / (|u|*|v|), in [-1, 1]."""
    uc, vc = _unwrap(u), _unwrap(v)
    if len(uc) != len(vc):
        raise DimensionMismatch(f"vector lengths differ: {len(uc)} vs {len(vc)}")
    norm_u = math.sqrt(sum(x * x for x in uc))
    norm_v = math.sqrt(sum(x * x for x in vc))
    if norm_u == 0.0 or norm_v == 0.0:
        raise ZeroVector("cosine similarity is undefined for a zero vector")
    return sum(x * y for x, y in zip(uc, vc)) / (norm_u * norm_v)


class StubEmbeddingProvider:
    """Embedding provider backed by a JSON file mapping text to a vector.

    Used by fixture tests and the --embedding-stub CLI flag. Any text absent
    from the mapping raises ProviderUnavailable, which downgrades detection
    to the Jaccard fallback.
    """

    tag = "stub"

    def __init__(self, source: str | Path | dict[str, Sequence[float]]):
        if isinstance(source, (str, Path)):
            with open(source, encoding="utf-8") as fh:
                mapping = json.load(fh)
        else:
            mapping = dict(source)
        self._vectors: dict[str, EmbeddingVector] = {}
        for text, components in mapping.items():
            vec = tuple(float(x) for x in components)
            if text and not any(vec):
                raise ValueError(f"stub vector for {text!r} is all-zero")
            self._vectors[text] = EmbeddingVector(vec, self.tag)

    def embed(self, text: str) -> EmbeddingVector:
        try:
            return self._vectors[text]
        except KeyError:
            raise ProviderUnavailable(f"no stub vector for text: {text[:60]!r}") from None

    def embed_many(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        return [self.embed(t) for t in texts]


class HttpEmbeddingProvider:
    """Client for an external embedding service.

    Protocol: POST {endpoint} with body {"texts": [...]} returning
    {"vectors": [[...], ...]}. Any transport or shape failure raises
    ProviderUnavailable; the caller falls back to Jaccard.
    """

    tag = "http"

    def __init__(self, endpoint: str, timeout: float = 30.0):
        self.endpoint = endpoint
        self.timeout = timeout

    def embed(self, text: str) -> EmbeddingVector:
        return self.embed_many([text])[0]

    def embed_many(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        try:
            response = requests.post(
                self.endpoint, json={"texts": list(texts)}, timeout=self.timeout
            )
            response.raise_for_status()
            vectors = response.json()["vectors"]
        except Exception as exc:
            raise ProviderUnavailable(f"embedding service failed: {exc}") from exc
        if len(vectors) != len(texts):
            raise ProviderUnavailable(
                f"embedding service returned {len(vectors)} vectors for {len(texts)} texts"
            )
        return [
            EmbeddingVector(tuple(float(x) for x in vec), self.tag) for vec in vectors
        ]
