#!/usr/bin/env python3
"""Run the analysis pipeline across five demo domains and print a summary table.

Offline by default (deterministic fallback text, fixture prior art when
given); pass --online to hit a live model endpoint and the real search API.
"""

from __future__ import annotations

import argparse
import re
from pathlib import Path

from ideaforge import PipelineConfig, run_pipeline
from ideaforge.scoring import ScoreWeights

DOMAINS = [
    ("a voice-first legal assistant in Hindi for rural India", "legal tech"),
    ("sepsis early warning from wearable sensors", "healthcare AI"),
    ("adaptive tutoring for children with dyscalculia", "edtech"),
    ("drone crop disease detection with multilingual advisories", "agriculture"),
    ("sign language interpretation for video calls", "accessibility"),
]


def slugify(text: str) -> str:
    return re.sub(r"[^a-z0-9]+", "-", text.lower()).strip("-")[:40]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("runs/batch"))
    parser.add_argument("--theta", type=float, default=0.65)
    parser.add_argument("--online", action="store_true",
                        help="use the live model endpoint and search API")
    parser.add_argument("--prior-art-fixture", type=Path, default=None)
    parser.add_argument("--embedding-stub", type=Path, default=None)
    parser.add_argument("--model", default=None)
    args = parser.parse_args()

    rows = []
    for idea, domain in DOMAINS:
        config = PipelineConfig(
            idea=idea,
            domain=domain,
            theta=args.theta,
            model_name=args.model,
            offline=not args.online,
            output_dir=args.out / slugify(idea),
            prior_art_fixture=args.prior_art_fixture,
            embedding_stub=args.embedding_stub,
        )
        report = run_pipeline(config)
        top_score = report.ranking[0][1].total if report.ranking else 0.0
        rows.append(
            (
                idea[:44],
                domain,
                report.summary["total_nodes"],
                report.summary["node_counts"].get("Claim", 0),
                len(report.convergent_pairs),
                top_score,
            )
        )

    header = f"{'use case':<46}{'domain':<15}{'nodes':>6}{'claims':>8}{'pairs':>7}{'top score':>11}"
    print(header)
    print("-" * len(header))
    for idea, domain, nodes, claims, pairs, top in rows:
        print(f"{idea:<46}{domain:<15}{nodes:>6}{claims:>8}{pairs:>7}{top:>11.3f}")
    print(f"\nper-run artifacts under {args.out}/")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
