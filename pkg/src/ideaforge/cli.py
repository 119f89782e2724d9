"""Command-line interface.

Commands: run (full pipeline), serve-mcp (stdio tool server), export
(graph to JSON/DOT), score (ranked claims to stdout), report (CSV tables
and figures). Flag > environment variable > default for model, theta and
endpoints. Exit codes: 0 success, 2 usage error, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .exceptions import CorruptSnapshot
from .graph import KnowledgeGraph
from .llm import MODEL_ENV_VAR
from .mcp_server import serve
from .pipeline import THETA_ENV_VAR, PipelineConfig, run_pipeline
from .scoring import ScoreWeights, rank_claims

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3


def _weights_argument(text: str) -> ScoreWeights:
    try:
        return ScoreWeights.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _theta_argument(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"theta must be a number, got {text!r}")
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError(f"theta must be in (0, 1], got {value}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ideaforge",
        description="Multi-methodology innovation analysis over a typed property graph.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the eight-step analysis pipeline")
    idea_group = run.add_mutually_exclusive_group(required=True)
    idea_group.add_argument("--idea", help="idea text to analyse")
    idea_group.add_argument("--idea-file", type=Path, help="file containing the idea text")
    run.add_argument("--domain", default="general", help="problem domain tag")
    run.add_argument("--theta", type=_theta_argument, default=None,
                     help="convergence threshold in (0, 1] (default 0.65)")
    run.add_argument("--model", default=None, help="model name for the generation backend")
    run.add_argument("--offline", action="store_true",
                     help="no network: deterministic fallbacks everywhere")
    run.add_argument("--max-prior-art", type=_positive_int, default=5)
    run.add_argument("--top-k", type=_positive_int, default=3,
                     help="claims carried into the draft")
    run.add_argument("--weights", type=_weights_argument, default=None,
                     metavar="W1,W2,W3,W4")
    run.add_argument("--out", type=Path, default=Path("runs"), help="output directory")
    run.add_argument("--snapshot", type=Path, default=None,
                     help="graph snapshot path (default <out>/graph_snapshot.json)")
    run.add_argument("--prior-art-fixture", type=Path, default=None,
                     help="local Atom XML file substituting for the search API")
    run.add_argument("--embedding-stub", type=Path, default=None,
                     help="JSON file mapping claim text to embedding vectors")
    run.add_argument("--export", choices=("json", "dot"), default=None,
                     help="also export the final graph in this format")

    serve_cmd = sub.add_parser("serve-mcp", help="serve the five graph tools over stdio")
    serve_cmd.add_argument("--snapshot", type=Path, default=None,
                           help="snapshot to load and persist mutations to")
    serve_cmd.add_argument("--weights", type=_weights_argument, default=None,
                           metavar="W1,W2,W3,W4")

    export_cmd = sub.add_parser("export", help="export a snapshot as JSON or DOT")
    export_cmd.add_argument("--snapshot", type=Path, required=True)
    export_cmd.add_argument("--export", choices=("json", "dot"), default="json",
                            dest="format", help="output format")
    export_cmd.add_argument("--out", type=Path, default=None,
                            help="output file (default stdout)")

    score_cmd = sub.add_parser("score", help="print ranked claims for a snapshot")
    score_cmd.add_argument("--snapshot", type=Path, required=True)
    score_cmd.add_argument("--weights", type=_weights_argument, default=None,
                           metavar="W1,W2,W3,W4")

    report_cmd = sub.add_parser("report", help="write CSV tables and figures for a snapshot")
    report_cmd.add_argument("--snapshot", type=Path, required=True)
    report_cmd.add_argument("--out", type=Path, default=Path("reports"))
    report_cmd.add_argument("--weights", type=_weights_argument, default=None,
                            metavar="W1,W2,W3,W4")

    return parser


def _env_theta() -> float | None:
    raw = os.environ.get(THETA_ENV_VAR)
    if raw is None:
        return None
    try:
        value = float(raw)
    except ValueError:
        return None
    return value if 0.0 < value <= 1.0 else None


def _cmd_run(args: argparse.Namespace) -> int:
    idea = args.idea if args.idea is not None else args.idea_file.read_text(encoding="utf-8").strip()
    theta = args.theta if args.theta is not None else (_env_theta() or 0.65)
    model = args.model or os.environ.get(MODEL_ENV_VAR) or None
    config = PipelineConfig(
        idea=idea,
        domain=args.domain,
        theta=theta,
        model_name=model,
        offline=args.offline,
        max_prior_art=args.max_prior_art,
        top_k=args.top_k,
        weights=args.weights or ScoreWeights(),
        output_dir=args.out,
        snapshot_path=args.snapshot,
        prior_art_fixture=args.prior_art_fixture,
        embedding_stub=args.embedding_stub,
        export_format=args.export,
    )
    report = run_pipeline(config)
    summary = report.summary
    print(f"idea: {report.idea}")
    print(f"nodes: {summary['total_nodes']}  edges: {summary['total_edges']}")
    for label, count in summary["node_counts"].items():
        print(f"  {label}: {count}")
    print(f"convergent pairs: {len(report.convergent_pairs)}")
    print("ranking:")
    for entry in report.to_dict()["ranking"]:
        print(f"  {entry['claim_id']}: total={entry['total']:.3f}")
    print(f"draft: {report.draft_path}")
    print(f"report: {report.report_path}")
    print(f"snapshot: {report.snapshot_path}")
    return EXIT_OK


def _load_snapshot(path: Path) -> KnowledgeGraph:
    return KnowledgeGraph.snapshot_load(path)


def _cmd_serve_mcp(args: argparse.Namespace) -> int:
    if args.snapshot is not None and args.snapshot.exists():
        graph = _load_snapshot(args.snapshot)
    else:
        graph = KnowledgeGraph()
    serve(graph, weights=args.weights, snapshot_path=args.snapshot)
    return EXIT_OK


def _cmd_export(args: argparse.Namespace) -> int:
    graph = _load_snapshot(args.snapshot)
    text = graph.export(args.format)
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(text, encoding="utf-8")
        print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_score(args: argparse.Namespace) -> int:
    graph = _load_snapshot(args.snapshot)
    ranking = rank_claims(graph, args.weights)
    print(f"{'rank':<5}{'claim':<7}{'methodology':<13}{'total':<8}breakdown")
    for rank, (claim_id, b) in enumerate(ranking, start=1):
        node = graph.node(claim_id)
        print(
            f"{rank:<5}{claim_id:<7}{node.properties['methodology']:<13}"
            f"{b.total:<8.3f}conv={b.convergent_count} div={b.methodology_diversity} "
            f"strength={b.claim_strength} challenges={b.prior_art_challenges}"
        )
    return EXIT_OK


def _cmd_report(args: argparse.Namespace) -> int:
    from .report import generate_report

    graph = _load_snapshot(args.snapshot)
    written = generate_report(graph, args.out, args.weights)
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


_COMMANDS = {
    "run": _cmd_run,
    "serve-mcp": _cmd_serve_mcp,
    "export": _cmd_export,
    "score": _cmd_score,
    "report": _cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except CorruptSnapshot as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
