from __future__ import annotations

import pytest

from ideaforge import EmptyClaimSet, KnowledgeGraph, NodeLabel, UnknownNode
from ideaforge.graph import EdgeType
from ideaforge.scoring import (
    ScoreWeights,
    innovation_score,
    methodology_diversity,
    rank_claims,
)


def add_claim(graph, methodology, strength, text=None):
    return graph.create_node(
        NodeLabel.CLAIM,
        {
            "text": text or f"{methodology} claim {strength}",
            "methodology": methodology,
            "strength": strength,
        },
    )


def converge(graph, a, b, similarity=0.9):
    return graph.create_edge(a, b, EdgeType.CONVERGENT, {"similarity": similarity})


def challenge(graph, claim_id, title="prior"):
    art = graph.create_node(
        NodeLabel.PRIOR_ART, {"title": title, "source": "src", "similarity": 0.5}
    )
    return graph.create_edge(art, claim_id, EdgeType.CHALLENGES)


def table_style_graph():
    """TRIZ conv=2/strength .7, DT conv=1/.65, SCAMPER conv=1/.6, no challenges."""
    graph = KnowledgeGraph()
    triz = add_claim(graph, "TRIZ", 0.7)
    dt = add_claim(graph, "DT", 0.65)
    scamper = add_claim(graph, "SCAMPER", 0.6)
    converge(graph, triz, dt)
    converge(graph, triz, scamper)
    return graph, triz, dt, scamper


# -- methodology_diversity -------------------------------------------------------


def test_diversity_isolated_claim():
    graph = KnowledgeGraph()
    claim = add_claim(graph, "TRIZ", 0.7)
    assert methodology_diversity(claim, graph) == 1


def test_diversity_three_methodologies():
    graph, triz, _, _ = table_style_graph()
    # oracle: enumerate adjacency by hand: TRIZ + {DT, SCAMPER}
    assert methodology_diversity(triz, graph) == 3


def test_diversity_duplicate_neighbor_methodology():
    graph = KnowledgeGraph()
    triz = add_claim(graph, "TRIZ", 0.7)
    dt_one = add_claim(graph, "DT", 0.65, "first dt")
    dt_two = add_claim(graph, "DT", 0.65, "second dt")
    converge(graph, triz, dt_one)
    converge(graph, triz, dt_two)
    # oracle: set cardinality {TRIZ, DT}
    assert methodology_diversity(triz, graph) == 2


def test_diversity_unknown_node():
    with pytest.raises(UnknownNode):
        methodology_diversity("404", KnowledgeGraph())


# -- innovation_score: frozen hand arithmetic ---------------------------------------


def test_score_hand_arithmetic_maximal_claim():
    graph, triz, _, _ = table_style_graph()
    breakdown = innovation_score(triz, graph)
    # conv 2 of max 2, div 3 of max 3, strength .7, no challenges:
    # 0.4*1 + 0.3*1 + 0.2*0.7 - 0 = 0.84
    assert breakdown.total == pytest.approx(0.84, abs=1e-9)
    assert breakdown.convergent_count == 2
    assert breakdown.methodology_diversity == 3
    assert breakdown.norm_convergent == 1.0
    assert breakdown.norm_diversity == 1.0


def test_score_hand_arithmetic_challenged_claim():
    # target: conv 0, div 1 (max 3), strength 0.6, challenges 1 (max 2)
    graph, triz, _, _ = table_style_graph()
    target = add_claim(graph, "SCAMPER", 0.6, "isolated scamper")
    challenge(graph, triz, "a")
    challenge(graph, triz, "b")
    challenge(graph, target, "c")
    breakdown = innovation_score(target, graph)
    # 0 + 0.3*(1/3) + 0.2*0.6 - 0.1*(1/2) = 0.17
    assert breakdown.total == pytest.approx(0.17, abs=1e-9)
    assert breakdown.prior_art_challenges == 1
    assert breakdown.norm_challenges == pytest.approx(0.5, abs=1e-12)


def test_score_hand_arithmetic_sole_claim():
    graph = KnowledgeGraph()
    claim = add_claim(graph, "TRIZ", 0.7)
    breakdown = innovation_score(claim, graph)
    # its own diversity 1 is the maximum; conv and challenge maxima are 0
    # 0.3*1 + 0.2*0.7 = 0.44
    assert breakdown.total == pytest.approx(0.44, abs=1e-9)
    assert breakdown.norm_convergent == 0.0
    assert breakdown.norm_challenges == 0.0
    assert breakdown.norm_diversity == 1.0


def test_score_components_in_unit_interval():
    graph, triz, dt, scamper = table_style_graph()
    challenge(graph, scamper)
    for claim_id in (triz, dt, scamper):
        b = innovation_score(claim_id, graph)
        for value in (b.norm_convergent, b.norm_diversity, b.norm_strength, b.norm_challenges):
            assert 0.0 <= value <= 1.0


def test_score_total_matches_weighted_identity():
    graph, triz, dt, scamper = table_style_graph()
    challenge(graph, dt)
    weights = ScoreWeights(0.5, 0.25, 0.15, 0.1)
    for claim_id in (triz, dt, scamper):
        b = innovation_score(claim_id, graph, weights)
        expected = (
            weights.w1 * b.norm_convergent
            + weights.w2 * b.norm_diversity
            + weights.w3 * b.claim_strength
            - weights.w4 * b.norm_challenges
        )
        assert b.total == pytest.approx(expected, abs=1e-12)


def test_score_unknown_claim():
    with pytest.raises(UnknownNode):
        innovation_score("404", KnowledgeGraph())


# -- rank_claims --------------------------------------------------------------------


def test_rank_order_table_style():
    graph, triz, dt, scamper = table_style_graph()
    ranking = rank_claims(graph)
    assert [claim_id for claim_id, _ in ranking] == [triz, dt, scamper]
    totals = [b.total for _, b in ranking]
    assert totals == sorted(totals, reverse=True)


def test_rank_tie_breaks_on_insertion_order():
    graph = KnowledgeGraph()
    first = add_claim(graph, "DT", 0.65, "first")
    second = add_claim(graph, "DT", 0.65, "second")
    ranking = rank_claims(graph)
    assert [claim_id for claim_id, _ in ranking] == [first, second]


def test_rank_tie_breaks_on_strength_before_order():
    graph = KnowledgeGraph()
    weaker = add_claim(graph, "SCAMPER", 0.6)
    stronger = add_claim(graph, "TRIZ", 0.7)
    # equalize totals by weighting strength to zero
    weights = ScoreWeights(0.4, 0.3, 0.0, 0.1)
    ranking = rank_claims(graph, weights)
    assert [claim_id for claim_id, _ in ranking] == [stronger, weaker]


def test_rank_single_claim():
    graph = KnowledgeGraph()
    claim = add_claim(graph, "TRIZ", 0.7)
    ranking = rank_claims(graph)
    assert len(ranking) == 1
    assert ranking[0][0] == claim


def test_rank_empty_graph():
    with pytest.raises(EmptyClaimSet):
        rank_claims(KnowledgeGraph())


def test_rank_invariant_under_positive_weight_scaling():
    graph, *_ = table_style_graph()
    base = [claim_id for claim_id, _ in rank_claims(graph, ScoreWeights(0.4, 0.3, 0.2, 0.1))]
    scaled = [claim_id for claim_id, _ in rank_claims(graph, ScoreWeights(2.0, 1.5, 1.0, 0.5))]
    assert base == scaled


def test_weights_parse():
    weights = ScoreWeights.parse("0.4, 0.3, 0.2, 0.1")
    assert weights == ScoreWeights(0.4, 0.3, 0.2, 0.1)
    with pytest.raises(ValueError):
        ScoreWeights.parse("1,2,3")
