"""Patent draft assembly grounded in the innovation graph.

The draft's numbered claims always come from the ranked claim set, each
carrying the graph path that produced it, so the document stays traceable
no matter what the language model emits. The model contributes prose for
the title, field, background and abstract sections; any section it fails
to produce falls back to a template interpolated from graph content.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any

from .exceptions import BrokenTrace, EmptyClaimSet
from .graph import EdgeType, KnowledgeGraph, NodeLabel
from .llm import LlmGateway, Text
from .scoring import ScoreWeights, rank_claims

DEFAULT_TOP_K = 3

DISCLAIMER = (
    "This document was generated by an automated innovation-analysis "
    "prototype for research and ideation purposes only. It is not legal "
    "advice and must be reviewed by a qualified patent professional "
    "before any filing."
)

SECTION_NAMES = ("title", "field", "background", "abstract", "claims")

_SECTION_RE = re.compile(
    r"^\s*(?:#+\s*|\*\*)?(title|field|background|abstract|claims)(?:\*\*)?\s*:?\s*$"
    r"|^\s*(?:#+\s*|\*\*)?(title|field|background|abstract|claims)(?:\*\*)?\s*:\s*(.+)$",
    re.IGNORECASE,
)


@dataclass(frozen=True)
class RankedClaimContext:
    claim_id: str
    text: str
    methodology: str
    total: float
    trace: tuple[tuple[str, str], ...]  # (node id, label) path ending at the claim


@dataclass
class ContextBundle:
    problem_statement: str
    contradictions: list[tuple[str, str]] = field(default_factory=list)
    principles: list[tuple[str, int]] = field(default_factory=list)
    user_needs: list[tuple[str, str]] = field(default_factory=list)
    ranked_claims: list[RankedClaimContext] = field(default_factory=list)


@dataclass
class DraftClaim:
    number: int
    text: str
    kind: str  # "independent" or "dependent"
    depends_on: int | None
    claim_id: str
    methodology: str
    trace: tuple[tuple[str, str], ...]


@dataclass
class PatentDraft:
    title: str
    field_text: str
    background: str
    abstract: str
    claims: list[DraftClaim]
    disclaimer: str = DISCLAIMER


def _claim_trace(claim_id: str, graph: KnowledgeGraph) -> tuple[tuple[str, str], ...]:
    """Graph path ending at the claim, shaped by its methodology.

    Contradiction-driven claims trace Problem -> Contradiction -> Principle
    -> Claim; user-need claims trace UserNeed -> Problem -> Claim;
    transformation claims trace Transformation -> Claim. Missing prefix
    nodes (e.g. for claims added by hand) simply shorten the path.
    """
    claim = graph.node(claim_id)
    methodology = claim.properties["methodology"]
    path: list[tuple[str, str]] = []
    if methodology == "TRIZ":
        supports = graph.incident_edges(claim_id, EdgeType.SUPPORTS, "in")
        if supports:
            principle = graph.node(supports[0].src)
            resolved = graph.incident_edges(principle.id, EdgeType.RESOLVED_BY, "in")
            if resolved:
                contradiction = graph.node(resolved[0].src)
                has_contra = graph.incident_edges(
                    contradiction.id, EdgeType.HAS_CONTRADICTION, "in"
                )
                if has_contra:
                    problem = graph.node(has_contra[0].src)
                    path.append((problem.id, problem.label.value))
                path.append((contradiction.id, contradiction.label.value))
            path.append((principle.id, principle.label.value))
    elif methodology == "DT":
        problems = graph.nodes(NodeLabel.PROBLEM)
        if problems:
            problem = problems[0]
            motivates = graph.incident_edges(problem.id, EdgeType.MOTIVATES, "in")
            if motivates:
                need = graph.node(motivates[0].src)
                path.append((need.id, need.label.value))
            path.append((problem.id, problem.label.value))
    elif methodology == "SCAMPER":
        generates = graph.incident_edges(claim_id, EdgeType.GENERATES, "in")
        if generates:
            transformation = graph.node(generates[0].src)
            path.append((transformation.id, transformation.label.value))
    path.append((claim_id, claim.label.value))
    return tuple(path)


def assemble_context(
    graph: KnowledgeGraph,
    top_k: int = DEFAULT_TOP_K,
    weights: ScoreWeights | None = None,
) -> ContextBundle:
    """Collect the supporting material for the top-ranked claims.

    Contradictions, principles and user needs are gathered from the union of
    each top claim's supporting subgraph, deduplicated in insertion order.
    """
    ranking = rank_claims(graph, weights)[:top_k]
    if not ranking:
        raise EmptyClaimSet("no claims to draft from")

    contradictions: dict[str, tuple[str, str]] = {}
    principles: dict[str, tuple[str, int]] = {}
    user_needs: dict[str, tuple[str, str]] = {}
    problem_statement = ""
    ranked = []
    for claim_id, breakdown in ranking:
        subgraph = graph.get_supporting_subgraph(claim_id)
        for node in subgraph.nodes:
            if node.label == NodeLabel.PROBLEM and not problem_statement:
                problem_statement = str(node.properties["statement"])
            elif node.label == NodeLabel.CONTRADICTION:
                contradictions.setdefault(
                    node.id,
                    (str(node.properties["improving"]), str(node.properties["worsening"])),
                )
            elif node.label == NodeLabel.PRINCIPLE:
                principles.setdefault(
                    node.id,
                    (str(node.properties["name"]), int(node.properties["triz_number"])),
                )
            elif node.label == NodeLabel.USER_NEED:
                user_needs.setdefault(
                    node.id,
                    (str(node.properties["persona"]), str(node.properties["job_to_be_done"])),
                )
        claim = graph.node(claim_id)
        ranked.append(
            RankedClaimContext(
                claim_id=claim_id,
                text=str(claim.properties["text"]),
                methodology=str(claim.properties["methodology"]),
                total=breakdown.total,
                trace=_claim_trace(claim_id, graph),
            )
        )
    if not problem_statement:
        problems = graph.nodes(NodeLabel.PROBLEM)
        if problems:
            problem_statement = str(problems[0].properties["statement"])
    return ContextBundle(
        problem_statement=problem_statement,
        contradictions=list(contradictions.values()),
        principles=list(principles.values()),
        user_needs=list(user_needs.values()),
        ranked_claims=ranked,
    )


def _draft_prompt(context: ContextBundle) -> str:
    lines = [
        "Write a patent draft for the innovation below. Use exactly these",
        "section headers, one per line, each followed by its content:",
        "Title:", "Field:", "Background:", "Abstract:", "Claims:",
        "",
        f"Problem: {context.problem_statement}",
    ]
    for improving, worsening in context.contradictions:
        lines.append(f"Contradiction: improving {improving} while worsening {worsening}")
    for name, number in context.principles:
        lines.append(f"Inventive principle {number}: {name}")
    for persona, job in context.user_needs:
        lines.append(f"User need: {persona} wants to {job}")
    lines.append("Candidate claims, strongest first:")
    for index, claim in enumerate(context.ranked_claims, start=1):
        lines.append(f"{index}. [{claim.methodology}] {claim.text}")
    return "\n".join(lines)


def _parse_sections(text: str) -> dict[str, str]:
    """Scan headed sections out of model output, case-insensitively."""
    sections: dict[str, list[str]] = {}
    current: str | None = None
    for line in text.splitlines():
        match = _SECTION_RE.match(line)
        if match:
            name = (match.group(1) or match.group(2)).lower()
            current = name
            sections[current] = []
            inline = match.group(3)
            if inline:
                sections[current].append(inline.strip())
        elif current is not None:
            sections[current].append(line)
    return {
        name: "\n".join(body).strip()
        for name, body in sections.items()
        if "\n".join(body).strip()
    }


def _fallback_sections(context: ContextBundle) -> dict[str, str]:
    top = context.ranked_claims[0]
    contradiction_text = "; ".join(
        f"improving {imp} without worsening {wor}" for imp, wor in context.contradictions
    )
    principle_text = ", ".join(f"{name} ({number})" for name, number in context.principles)
    need_text = "; ".join(f"{persona}: {job}" for persona, job in context.user_needs)
    background = [
        f"The problem addressed is: {context.problem_statement}."
        if context.problem_statement
        else "The problem addressed is described by the analysed idea."
    ]
    if contradiction_text:
        background.append(f"The core technical tension is {contradiction_text}.")
    if principle_text:
        background.append(f"Resolution draws on the inventive principles {principle_text}.")
    if need_text:
        background.append(f"The user context includes {need_text}.")
    return {
        "title": top.text.rstrip(".") if top.text else "System and method from multi-methodology analysis",
        "field": (
            "This disclosure relates to systems and methods addressing "
            f"{context.problem_statement or 'the analysed problem domain'}."
        ),
        "background": " ".join(background),
        "abstract": (
            f"{top.text.rstrip('.')}. The approach is supported by "
            f"{len(context.ranked_claims)} analysed claims spanning "
            f"{len({c.methodology for c in context.ranked_claims})} methodologies."
        ),
    }


def _numbered_claims(context: ContextBundle) -> list[DraftClaim]:
    claims = []
    for index, ranked in enumerate(context.ranked_claims, start=1):
        if index == 1:
            text = ranked.text.rstrip(".") + "."
            kind, depends = "independent", None
        else:
            text = (
                f"The subject matter of claim 1, further characterised by "
                f"{ranked.text[0].lower() + ranked.text[1:].rstrip('.')}."
            )
            kind, depends = "dependent", 1
        claims.append(
            DraftClaim(
                number=index,
                text=text,
                kind=kind,
                depends_on=depends,
                claim_id=ranked.claim_id,
                methodology=ranked.methodology,
                trace=ranked.trace,
            )
        )
    return claims


def draft(context: ContextBundle, llm: LlmGateway) -> PatentDraft:
    """Produce a complete five-section draft for any model behaviour.

    Sections the model supplies (parsed by header) are used verbatim; every
    missing one is filled from its template. Numbered claims are always the
    ranked claims, claim 1 independent and later claims dependent on it.
    """
    if not context.ranked_claims:
        raise EmptyClaimSet("context bundle has no ranked claims")
    outcome = llm.generate(llm.make_request(_draft_prompt(context)))
    parsed = _parse_sections(outcome.content) if isinstance(outcome, Text) else {}
    fallback = _fallback_sections(context)
    sections = {name: parsed.get(name) or fallback[name] for name in fallback}
    return PatentDraft(
        title=sections["title"],
        field_text=sections["field"],
        background=sections["background"],
        abstract=sections["abstract"],
        claims=_numbered_claims(context),
    )


def trace_claims(
    draft_document: PatentDraft, graph: KnowledgeGraph
) -> list[tuple[int, tuple[tuple[str, str], ...]]]:
    """Validate and return each numbered claim's graph path.

    Raises BrokenTrace if any referenced node no longer exists (a pipeline
    bug: drafts must only be traced against the graph that produced them).
    """
    table = []
    for claim in draft_document.claims:
        for node_id, label in claim.trace:
            if not graph.has_node(node_id):
                raise BrokenTrace(
                    f"claim {claim.number} references missing node {node_id} ({label})"
                )
            if graph.node(node_id).label.value != label:
                raise BrokenTrace(
                    f"claim {claim.number} trace node {node_id} changed label"
                )
        table.append((claim.number, claim.trace))
    return table


def render_markdown(draft_document: PatentDraft) -> str:
    """Render the draft as a markdown document with a trailing trace table."""
    lines = [
        f"# {draft_document.title}",
        "",
        f"> {draft_document.disclaimer}",
        "",
        "## Field",
        "",
        draft_document.field_text,
        "",
        "## Background",
        "",
        draft_document.background,
        "",
        "## Abstract",
        "",
        draft_document.abstract,
        "",
        "## Claims",
        "",
    ]
    for claim in draft_document.claims:
        lines.append(f"{claim.number}. {claim.text}")
    lines += [
        "",
        "## Claim Traceability",
        "",
        "| Claim | Methodology | Graph path |",
        "| --- | --- | --- |",
    ]
    for claim in draft_document.claims:
        path = " -> ".join(f"{label}({node_id})" for node_id, label in claim.trace)
        lines.append(f"| {claim.number} | {claim.methodology} | {path} |")
    return "\n".join(lines) + "\n"
