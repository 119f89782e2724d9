"""Run reporting: delimited score tables plus matplotlib figures.

Everything here is derived from a graph snapshot alone, so reports can be
regenerated at any time after a run. Figures are rendered headless to PNG.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .convergence import convergent_pairs
from .graph import KnowledgeGraph
from .scoring import ScoreWeights, rank_claims

SCORE_FIELDS = (
    "rank",
    "claim_id",
    "methodology",
    "text",
    "convergent_count",
    "methodology_diversity",
    "claim_strength",
    "prior_art_challenges",
    "norm_convergent",
    "norm_diversity",
    "norm_strength",
    "norm_challenges",
    "total",
)


def write_scores_csv(
    graph: KnowledgeGraph, path: Path, weights: ScoreWeights | None = None
) -> Path:
    ranking = rank_claims(graph, weights)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=SCORE_FIELDS)
        writer.writeheader()
        for rank, (claim_id, breakdown) in enumerate(ranking, start=1):
            node = graph.node(claim_id)
            row = {"rank": rank, "methodology": node.properties["methodology"],
                   "text": node.properties["text"], **breakdown.to_dict()}
            writer.writerow({k: row[k] for k in SCORE_FIELDS})
    return path


def write_pairs_csv(graph: KnowledgeGraph, path: Path) -> Path:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["claim_a", "claim_b", "similarity", "count"])
        for pair in convergent_pairs(graph):
            writer.writerow([pair.claim_a, pair.claim_b, pair.similarity, pair.count])
    return path


def plot_score_breakdown(
    graph: KnowledgeGraph, path: Path, weights: ScoreWeights | None = None
) -> Path:
    """Stacked horizontal bars of the weighted score components per claim."""
    weights = weights or ScoreWeights()
    ranking = rank_claims(graph, weights)
    labels, conv, div, strength, penalty = [], [], [], [], []
    for claim_id, b in ranking:
        methodology = graph.node(claim_id).properties["methodology"]
        labels.append(f"{methodology} (claim {claim_id})")
        conv.append(weights.w1 * b.norm_convergent)
        div.append(weights.w2 * b.norm_diversity)
        strength.append(weights.w3 * b.claim_strength)
        penalty.append(-weights.w4 * b.norm_challenges)

    fig, ax = plt.subplots(figsize=(8, 1.2 + 0.7 * len(labels)))
    y = range(len(labels))
    left = [0.0] * len(labels)
    for values, name, color in (
        (conv, "convergence", "#4c72b0"),
        (div, "diversity", "#55a868"),
        (strength, "strength", "#c44e52"),
    ):
        ax.barh(y, values, left=left, label=name, color=color)
        left = [l + v for l, v in zip(left, values)]
    ax.barh(y, penalty, left=left, label="challenge penalty", color="#8172b2")
    for i, (_, b) in enumerate(ranking):
        ax.text(max(left[i] + penalty[i], left[i]) + 0.01, i, f"{b.total:.3f}", va="center")
    ax.set_yticks(list(y))
    ax.set_yticklabels(labels)
    ax.invert_yaxis()
    ax.set_xlabel("weighted score contribution")
    ax.set_title("Innovation score breakdown")
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_graph_composition(graph: KnowledgeGraph, path: Path) -> Path:
    """Bar chart of node counts by label and edge counts by type."""
    summary = graph.summary().to_dict()
    fig, (ax_nodes, ax_edges) = plt.subplots(1, 2, figsize=(11, 4))
    for ax, counts, title in (
        (ax_nodes, summary["node_counts"], f"nodes ({summary['total_nodes']})"),
        (ax_edges, summary["edge_counts"], f"edges ({summary['total_edges']})"),
    ):
        names = list(counts)
        values = [counts[n] for n in names]
        ax.bar(range(len(names)), values, color="#4c72b0")
        ax.set_xticks(range(len(names)))
        ax.set_xticklabels(names, rotation=45, ha="right", fontsize=8)
        ax.set_title(title)
        ax.yaxis.get_major_locator().set_params(integer=True)
    fig.suptitle("Graph composition")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_convergence_matrix(graph: KnowledgeGraph, path: Path) -> Path:
    """Claim-by-claim similarity heatmap from stored convergent pairs."""
    claims = graph.get_claims()
    index = {c.id: i for i, c in enumerate(claims)}
    n = len(claims)
    matrix = [[0.0] * n for _ in range(n)]
    for i in range(n):
        matrix[i][i] = 1.0
    for pair in convergent_pairs(graph):
        i, j = index[pair.claim_a], index[pair.claim_b]
        matrix[i][j] = matrix[j][i] = pair.similarity

    fig, ax = plt.subplots(figsize=(1.5 + 0.6 * n, 1.2 + 0.6 * n))
    image = ax.imshow(matrix, vmin=0.0, vmax=1.0, cmap="viridis")
    ticks = [f"{c.properties['methodology']}:{c.id}" for c in claims]
    ax.set_xticks(range(n))
    ax.set_xticklabels(ticks, rotation=45, ha="right", fontsize=8)
    ax.set_yticks(range(n))
    ax.set_yticklabels(ticks, fontsize=8)
    for i in range(n):
        for j in range(n):
            if matrix[i][j] > 0:
                ax.text(j, i, f"{matrix[i][j]:.2f}", ha="center", va="center",
                        color="white" if matrix[i][j] < 0.7 else "black", fontsize=7)
    fig.colorbar(image, ax=ax, shrink=0.8, label="similarity")
    ax.set_title("Claim convergence similarity")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def generate_report(
    graph: KnowledgeGraph,
    out_dir: str | Path,
    weights: ScoreWeights | None = None,
) -> list[Path]:
    """Write all delimited tables and figures for a graph; returns the paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [
        write_pairs_csv(graph, out_dir / "convergent_pairs.csv"),
        plot_graph_composition(graph, out_dir / "graph_composition.png"),
    ]
    if graph.get_claims():
        written += [
            write_scores_csv(graph, out_dir / "claim_scores.csv", weights),
            plot_score_breakdown(graph, out_dir / "score_breakdown.png", weights),
            plot_convergence_matrix(graph, out_dir / "convergence_matrix.png"),
        ]
    return written
