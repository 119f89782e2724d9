from __future__ import annotations

import math

import pytest
from hypothesis import given, strategies as st

from ideaforge.exceptions import DimensionMismatch, ProviderUnavailable, ZeroVector
from ideaforge.similarity import (
    STOPWORDS,
    EmbeddingVector,
    StubEmbeddingProvider,
    cosine,
    idea_gist,
    informative_tokens,
    jaccard,
    token_set,
    tokenize,
)

from conftest import LEGAL_IDEA


def test_tokenize_lowercases_splits_and_dedupes():
    assert tokenize("Voice-first LEGAL voice assistant!") == [
        "voice", "first", "legal", "assistant",
    ]


def test_tokenize_empty():
    assert tokenize("") == []
    assert tokenize("—…!!") == []


def test_informative_tokens_drop_stopwords():
    assert informative_tokens(LEGAL_IDEA) == [
        "voice", "first", "legal", "assistant", "hindi", "rural", "india",
    ]
    assert "in" in STOPWORDS and "for" in STOPWORDS


def test_idea_gist_keeps_surface_form():
    assert idea_gist(LEGAL_IDEA) == "voice-first legal assistant in Hindi for rural India"


def test_idea_gist_clips_long_ideas():
    idea = "one two three four five six seven eight nine ten"
    assert idea_gist(idea) == "one two three four five six seven eight"


def test_idea_gist_strips_leading_article_only_once():
    assert idea_gist("the the quick fix") == "the quick fix"


def test_jaccard_identity_for_nonempty():
    assert jaccard("sepsis early warning", "sepsis early warning") == 1.0


def test_jaccard_hand_enumerated():
    # {voice, legal, assistant} vs {voice, legal, aid}: 2 shared of 4 total
    assert jaccard("voice legal assistant", "voice legal aid") == 0.5


def test_jaccard_empty_conventions():
    assert jaccard("", "x") == 0.0
    assert jaccard("x", "") == 0.0
    assert jaccard("", "") == 1.0


@given(st.text(max_size=60), st.text(max_size=60))
def test_jaccard_symmetric_and_bounded(a, b):
    value = jaccard(a, b)
    assert value == jaccard(b, a)
    assert 0.0 <= value <= 1.0


@given(st.text(min_size=1, max_size=60))
def test_jaccard_reflexive(text):
    assert jaccard(text, text) == 1.0


def test_cosine_identity():
    assert cosine((1.0, 2.0, 3.0), (1.0, 2.0, 3.0)) == pytest.approx(1.0, abs=1e-9)


def test_cosine_orthogonal():
    assert cosine((1.0, 0.0), (0.0, 1.0)) == pytest.approx(0.0, abs=1e-12)


def test_cosine_hand_arithmetic():
    # 32 / (sqrt(14) * sqrt(77))
    expected = 32 / (math.sqrt(14) * math.sqrt(77))
    assert cosine((1, 2, 3), (4, 5, 6)) == pytest.approx(expected, abs=1e-9)
    assert cosine((1, 2, 3), (4, 5, 6)) == pytest.approx(0.974631846, abs=1e-9)


def test_cosine_errors():
    with pytest.raises(DimensionMismatch):
        cosine((1.0, 2.0), (1.0, 2.0, 3.0))
    with pytest.raises(ZeroVector):
        cosine((0.0, 0.0), (1.0, 2.0))


def test_cosine_accepts_embedding_vectors():
    u = EmbeddingVector((1.0, 0.0), "stub")
    v = EmbeddingVector((1.0, 0.0), "stub")
    assert cosine(u, v) == pytest.approx(1.0)


def test_stub_provider_roundtrip_and_determinism():
    provider = StubEmbeddingProvider({"alpha": [1.0, 2.0], "beta": [0.5, 0.5]})
    first = provider.embed("alpha")
    second = provider.embed("alpha")
    assert first == second
    assert first.components == (1.0, 2.0)
    assert provider.embed_many(["alpha", "beta"])[1].components == (0.5, 0.5)


def test_stub_provider_unknown_text():
    provider = StubEmbeddingProvider({"alpha": [1.0]})
    with pytest.raises(ProviderUnavailable):
        provider.embed("missing")


def test_stub_provider_rejects_zero_vector():
    with pytest.raises(ValueError):
        StubEmbeddingProvider({"alpha": [0.0, 0.0]})


def test_token_set_matches_tokenize():
    text = "Voice voice LEGAL aid"
    assert token_set(text) == frozenset(tokenize(text))
