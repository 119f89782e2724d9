"""Eight-step analysis pipeline from idea text to ranked claims and draft.

Step order: problem capture, contradiction analysis, user-need analysis,
transformation analysis, prior art, convergence detection, scoring, draft.
A snapshot is written after every step (the last one is authoritative), and
the run ends with a machine-readable report plus a markdown draft on disk.
Offline runs perform no network activity at all.
"""

from __future__ import annotations

import json
import logging
import os
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable

from . import drafter, prior_art
from .agents import run_design_thinking, run_scamper, run_triz
from .convergence import ConvergenceConfig, ConvergentPair, detect_convergence
from .graph import KnowledgeGraph, NodeLabel
from .llm import LlmGateway
from .scoring import ScoreBreakdown, ScoreWeights, rank_claims
from .similarity import HttpEmbeddingProvider, StubEmbeddingProvider

logger = logging.getLogger(__name__)

STEP_NAMES = (
    "problem",
    "triz",
    "design_thinking",
    "scamper",
    "prior_art",
    "convergence",
    "scoring",
    "draft",
)

THETA_ENV_VAR = "IDEAFORGE_THETA"
EMBEDDING_ENDPOINT_ENV_VAR = "IDEAFORGE_EMBEDDING_ENDPOINT"


@dataclass
class PipelineConfig:
    idea: str
    domain: str = "general"
    theta: float = 0.65
    model_name: str | None = None
    llm_endpoint: str | None = None
    offline: bool = False
    max_prior_art: int = 5
    top_k: int = 3
    weights: ScoreWeights = field(default_factory=ScoreWeights)
    output_dir: Path = Path("runs")
    snapshot_path: Path | None = None
    prior_art_fixture: Path | None = None
    embedding_stub: Path | None = None
    embedding_endpoint: str | None = None
    challenge_threshold: float = prior_art.DEFAULT_CHALLENGE_THRESHOLD
    export_format: str | None = None

    def __post_init__(self):
        if not self.idea or not self.idea.strip():
            raise ValueError("idea must be non-empty")
        if not 0.0 < self.theta <= 1.0:
            raise ValueError(f"theta must be in (0, 1], got {self.theta}")
        if self.top_k < 1:
            raise ValueError(f"top_k must be >= 1, got {self.top_k}")
        self.output_dir = Path(self.output_dir)
        if self.snapshot_path is None:
            self.snapshot_path = self.output_dir / "graph_snapshot.json"
        self.snapshot_path = Path(self.snapshot_path)


@dataclass
class StepRecord:
    step: str
    duration_s: float
    nodes_created: int
    edges_created: int
    used_fallback: bool | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "step": self.step,
            "duration_s": self.duration_s,
            "nodes_created": self.nodes_created,
            "edges_created": self.edges_created,
            "used_fallback": self.used_fallback,
        }


@dataclass
class RunReport:
    idea: str
    config: dict[str, Any]
    started_at: str
    finished_at: str
    steps: list[StepRecord]
    summary: dict[str, Any]
    convergent_pairs: list[ConvergentPair]
    ranking: list[tuple[str, ScoreBreakdown]]
    draft_path: str
    report_path: str
    snapshot_path: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "idea": self.idea,
            "config": self.config,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "steps": [s.to_dict() for s in self.steps],
            "summary": self.summary,
            "convergent_pairs": [p.to_dict() for p in self.convergent_pairs],
            "ranking": [
                {"claim_id": claim_id, **breakdown.to_dict()}
                for claim_id, breakdown in self.ranking
            ],
            "draft_path": self.draft_path,
            "report_path": self.report_path,
            "snapshot_path": self.snapshot_path,
        }


def _build_gateway(config: PipelineConfig) -> LlmGateway:
    return LlmGateway(
        model_name=config.model_name,
        endpoint=config.llm_endpoint,
        offline=config.offline,
    )


def _build_embedding_provider(config: PipelineConfig):
    if config.embedding_stub is not None:
        return StubEmbeddingProvider(config.embedding_stub)
    endpoint = config.embedding_endpoint or os.environ.get(EMBEDDING_ENDPOINT_ENV_VAR)
    if endpoint and not config.offline:
        return HttpEmbeddingProvider(endpoint)
    return None


def _config_record(config: PipelineConfig) -> dict[str, Any]:
    return {
        "idea": config.idea,
        "domain": config.domain,
        "theta": config.theta,
        "model_name": config.model_name,
        "offline": config.offline,
        "max_prior_art": config.max_prior_art,
        "top_k": config.top_k,
        "weights": [config.weights.w1, config.weights.w2, config.weights.w3, config.weights.w4],
        "challenge_threshold": config.challenge_threshold,
    }


def run_pipeline(config: PipelineConfig) -> RunReport:
    """Execute all eight steps and write snapshot, draft and report files."""
    started_at = datetime.now(timezone.utc).isoformat()
    graph = KnowledgeGraph()
    llm = _build_gateway(config)
    provider = _build_embedding_provider(config)
    config.output_dir.mkdir(parents=True, exist_ok=True)

    steps: list[StepRecord] = []
    state: dict[str, Any] = {}

    def run_step(name: str, action: Callable[[], bool | None]) -> None:
        before = graph.summary()
        start = time.perf_counter()
        used_fallback = action()
        duration = time.perf_counter() - start
        after = graph.summary()
        steps.append(
            StepRecord(
                step=name,
                duration_s=round(duration, 6),
                nodes_created=after.total_nodes - before.total_nodes,
                edges_created=after.total_edges - before.total_edges,
                used_fallback=used_fallback,
            )
        )
        graph.snapshot_save(config.snapshot_path)

    def step_problem():
        state["problem_id"] = graph.create_node(
            NodeLabel.PROBLEM, {"statement": config.idea, "domain": config.domain}
        )

    def step_triz():
        return run_triz(config.idea, state["problem_id"], graph, llm).used_fallback

    def step_design_thinking():
        return run_design_thinking(config.idea, state["problem_id"], graph, llm).used_fallback

    def step_scamper():
        return run_scamper(config.idea, state["problem_id"], graph, llm).used_fallback

    def step_prior_art():
        prior_art.run_prior_art(
            config.idea,
            graph,
            max_results=config.max_prior_art,
            offline=config.offline,
            fixture_path=config.prior_art_fixture,
            challenge_threshold=config.challenge_threshold,
            llm=llm,
        )

    def step_convergence():
        state["pairs"] = detect_convergence(
            graph, ConvergenceConfig(theta=config.theta, provider=provider)
        )

    def step_scoring():
        state["ranking"] = rank_claims(graph, config.weights)

    def step_draft():
        context = drafter.assemble_context(graph, config.top_k, config.weights)
        state["draft"] = drafter.draft(context, llm)
        drafter.trace_claims(state["draft"], graph)

    run_step("problem", step_problem)
    run_step("triz", step_triz)
    run_step("design_thinking", step_design_thinking)
    run_step("scamper", step_scamper)
    run_step("prior_art", step_prior_art)
    run_step("convergence", step_convergence)
    run_step("scoring", step_scoring)
    run_step("draft", step_draft)

    finished_at = datetime.now(timezone.utc).isoformat()
    stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%S%f")

    draft_markdown = drafter.render_markdown(state["draft"])
    draft_path = config.output_dir / f"draft_{stamp}.md"
    draft_path.write_text(draft_markdown, encoding="utf-8")
    (config.output_dir / "draft_latest.md").write_text(draft_markdown, encoding="utf-8")

    if config.export_format:
        export_text = graph.export(config.export_format)
        suffix = "json" if config.export_format == "json" else "dot"
        (config.output_dir / f"graph_latest.{suffix}").write_text(
            export_text, encoding="utf-8"
        )

    report_path = config.output_dir / f"run_report_{stamp}.json"
    report = RunReport(
        idea=config.idea,
        config=_config_record(config),
        started_at=started_at,
        finished_at=finished_at,
        steps=steps,
        summary=graph.summary().to_dict(),
        convergent_pairs=state["pairs"],
        ranking=state["ranking"],
        draft_path=str(draft_path),
        report_path=str(report_path),
        snapshot_path=str(config.snapshot_path),
    )
    report_json = json.dumps(report.to_dict(), indent=2, ensure_ascii=False)
    report_path.write_text(report_json, encoding="utf-8")
    (config.output_dir / "run_report_latest.json").write_text(report_json, encoding="utf-8")
    logger.info(
        "pipeline complete: %d nodes, %d edges, %d convergent pairs",
        report.summary["total_nodes"],
        report.summary["total_edges"],
        len(report.convergent_pairs),
    )
    return report
