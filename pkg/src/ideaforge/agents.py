"""Methodology agents: inventive-contradiction, user-need and transformation analysis.

Each agent is a fixed graph-update protocol. The model supplies the wording;
the node and edge structure it writes is constant per agent, and when the
model is unavailable or returns garbage the agent substitutes deterministic
default text built from the idea and completes anyway.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from .exceptions import SchemaViolation
from .graph import EdgeType, KnowledgeGraph, NodeLabel
from .llm import LlmGateway, Malformed, Unavailable
from .similarity import idea_gist

logger = logging.getLogger(__name__)


class Methodology(str, Enum):
    TRIZ = "TRIZ"
    DT = "DT"
    SCAMPER = "SCAMPER"


# Per-methodology claim strength, fixed across all runs: contradiction-matrix
# grounding is the most specific, persona analysis next, transformation last.
CLAIM_STRENGTH: dict[Methodology, float] = {
    Methodology.TRIZ: 0.7,
    Methodology.DT: 0.65,
    Methodology.SCAMPER: 0.6,
}

SCAMPER_TYPES = (
    "Substitute",
    "Combine",
    "Adapt",
    "Modify",
    "PutToOtherUses",
    "Eliminate",
    "Reverse",
)

# Fallback inventive principles used when the model gives none that validate.
FALLBACK_PRINCIPLES = (
    ("Segmentation", 1, "Divide the system into independent parts."),
    ("Preliminary Action", 10, "Perform required changes before they are needed."),
)


@dataclass
class AgentReport:
    methodology: Methodology
    claim_id: str
    created_node_ids: list[str] = field(default_factory=list)
    created_edge_ids: list[str] = field(default_factory=list)
    used_fallback: bool = False


def _require_problem(graph: KnowledgeGraph, problem_id: str) -> None:
    node = graph.node(problem_id)
    if node.label != NodeLabel.PROBLEM:
        raise SchemaViolation(f"node {problem_id} is a {node.label.value}, not a Problem")


def _clean_str(value: Any, default: str) -> str:
    if isinstance(value, str) and value.strip():
        return value.strip()
    return default


# -- Contradiction / inventive-principle agent --------------------------------


def _triz_prompt(idea: str) -> str:
    return (
        "You are an inventive-problem analyst. Analyse this idea for a "
        "technical contradiction.\n\n"
        f"Idea: {idea}\n\n"
        "Identify the improving parameter, the worsening parameter, exactly "
        "two inventive principles (numbered 1-40) that resolve the "
        "contradiction, and one patentable claim sentence.\n\n"
        "Respond with a single JSON object shaped like:\n"
        '{"improving": "...", "worsening": "...",\n'
        ' "principles": [{"name": "...", "number": 1, "description": "..."},\n'
        '                {"name": "...", "number": 10, "description": "..."}],\n'
        ' "claim": "..."}'
    )


def _valid_principle(entry: Any) -> tuple[str, int, str] | None:
    if not isinstance(entry, dict):
        return None
    name = entry.get("name")
    number = entry.get("number")
    if not isinstance(name, str) or not name.strip():
        return None
    if isinstance(number, bool) or not isinstance(number, int) or not 1 <= number <= 40:
        return None
    description = _clean_str(entry.get("description"), name)
    return name.strip(), number, description


def run_triz(
    idea: str, problem_id: str, graph: KnowledgeGraph, llm: LlmGateway
) -> AgentReport:
    """Contradiction analysis: 1 Contradiction, 2 Principles, 1 Claim, 5 edges."""
    _require_problem(graph, problem_id)
    gist = idea_gist(idea)
    fallback_claim = f"A method for resolving technical contradictions in a {gist}"

    improving = f"accessibility of {gist}"
    worsening = "complexity of the underlying system"
    principles = list(FALLBACK_PRINCIPLES)
    claim_text = fallback_claim
    used_fallback = True

    result = llm.generate_json(llm.make_request(_triz_prompt(idea)), ["improving", "worsening", "principles", "claim"])
    if isinstance(result, (Malformed, Unavailable)):
        logger.info("contradiction agent falling back: %s", result.reason)
    else:
        used_fallback = False
        improving = _clean_str(result.get("improving"), improving)
        worsening = _clean_str(result.get("worsening"), worsening)
        claim_text = _clean_str(result.get("claim"), fallback_claim)
        parsed = result.get("principles")
        valid = []
        if isinstance(parsed, list):
            for entry in parsed:
                checked = _valid_principle(entry)
                if checked and all(checked[1] != v[1] for v in valid):
                    valid.append(checked)
        # Out-of-range numbers or duplicates get fallback principles substituted.
        for fb in FALLBACK_PRINCIPLES:
            if len(valid) >= 2:
                break
            if all(fb[1] != v[1] for v in valid):
                valid.append(fb)
        principles = valid[:2]

    report = AgentReport(Methodology.TRIZ, claim_id="", used_fallback=used_fallback)
    contradiction_id = graph.create_node(
        NodeLabel.CONTRADICTION, {"improving": improving, "worsening": worsening}
    )
    report.created_node_ids.append(contradiction_id)
    report.created_edge_ids.append(
        graph.create_edge(problem_id, contradiction_id, EdgeType.HAS_CONTRADICTION)
    )
    principle_ids = []
    for name, number, description in principles:
        pid = graph.create_node(
            NodeLabel.PRINCIPLE,
            {"name": name, "triz_number": number, "description": description},
        )
        principle_ids.append(pid)
        report.created_node_ids.append(pid)
        report.created_edge_ids.append(
            graph.create_edge(contradiction_id, pid, EdgeType.RESOLVED_BY)
        )
    claim_id = graph.create_node(
        NodeLabel.CLAIM,
        {
            "text": claim_text,
            "methodology": Methodology.TRIZ.value,
            "strength": CLAIM_STRENGTH[Methodology.TRIZ],
        },
    )
    report.created_node_ids.append(claim_id)
    report.claim_id = claim_id
    for pid in principle_ids:
        report.created_edge_ids.append(graph.create_edge(pid, claim_id, EdgeType.SUPPORTS))
    return report


# -- User-need agent ----------------------------------------------------------


def _dt_prompt(idea: str) -> str:
    return (
        "You are a design-thinking researcher running the empathise and "
        "define stages.\n\n"
        f"Idea: {idea}\n\n"
        "Describe two user personas with their job-to-be-done and a pain "
        "level between 0 and 1, two how-might-we questions, and one "
        "user-centred claim sentence.\n\n"
        "Respond with a single JSON object shaped like:\n"
        '{"personas": [{"persona": "...", "job_to_be_done": "...", "pain_level": 0.8},\n'
        '              {"persona": "...", "job_to_be_done": "...", "pain_level": 0.6}],\n'
        ' "how_might_we": ["...", "..."], "claim": "..."}'
    )


def _normalize_pain(value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return 0.8
    level = float(value)
    if 1.0 < level <= 5.0:
        # ordinal 1-5 scale; store normalized
        level = level / 5.0
    return min(max(level, 0.0), 1.0)


def run_design_thinking(
    idea: str, problem_id: str, graph: KnowledgeGraph, llm: LlmGateway
) -> AgentReport:
    """Persona analysis: 2 UserNeeds on the model path, 1 on fallback, 1 Claim.

    How-might-we questions are kept as a claim property rather than as nodes.
    """
    _require_problem(graph, problem_id)
    gist = idea_gist(idea)
    fallback_claim = f"A user-centred system for a {gist}"
    fallback_persona = {
        "persona": f"underserved end user of a {gist}",
        "job_to_be_done": f"get reliable help from a {gist} without specialist support",
        "pain_level": 0.8,
    }

    personas: list[dict[str, Any]] = [fallback_persona]
    claim_text = fallback_claim
    hmw = f"How might we make a {gist} work for people it currently excludes?"
    used_fallback = True

    result = llm.generate_json(llm.make_request(_dt_prompt(idea)), ["personas", "claim"])
    if isinstance(result, (Malformed, Unavailable)):
        logger.info("user-need agent falling back: %s", result.reason)
    else:
        parsed = result.get("personas")
        valid = []
        if isinstance(parsed, list):
            for entry in parsed[:2]:
                if not isinstance(entry, dict):
                    continue
                persona = _clean_str(entry.get("persona"), "")
                job = _clean_str(entry.get("job_to_be_done"), "")
                if persona and job:
                    valid.append(
                        {
                            "persona": persona,
                            "job_to_be_done": job,
                            "pain_level": _normalize_pain(entry.get("pain_level")),
                        }
                    )
        if valid:
            used_fallback = False
            personas = valid
            claim_text = _clean_str(result.get("claim"), fallback_claim)
            questions = result.get("how_might_we")
            if isinstance(questions, list):
                joined = " | ".join(q.strip() for q in questions if isinstance(q, str) and q.strip())
                if joined:
                    hmw = joined
        else:
            logger.info("user-need agent falling back: no valid personas")

    report = AgentReport(Methodology.DT, claim_id="", used_fallback=used_fallback)
    for entry in personas:
        need_id = graph.create_node(NodeLabel.USER_NEED, entry)
        report.created_node_ids.append(need_id)
        report.created_edge_ids.append(
            graph.create_edge(need_id, problem_id, EdgeType.MOTIVATES)
        )
    claim_id = graph.create_node(
        NodeLabel.CLAIM,
        {
            "text": claim_text,
            "methodology": Methodology.DT.value,
            "strength": CLAIM_STRENGTH[Methodology.DT],
            "hmw": hmw,
        },
    )
    report.created_node_ids.append(claim_id)
    report.claim_id = claim_id
    return report


# -- Transformation agent -------------------------------------------------------


def _scamper_prompt(idea: str) -> str:
    return (
        "You are running a systematic transformation exercise over an idea "
        "using the operations Substitute, Combine, Adapt, Modify, "
        "PutToOtherUses, Eliminate and Reverse.\n\n"
        f"Idea: {idea}\n\n"
        "Propose three transformations with distinct operations, say which "
        "one is most promising (0-based index), and state one claim sentence "
        "derived from it.\n\n"
        "Respond with a single JSON object shaped like:\n"
        '{"transformations": [{"scamper_type": "Substitute", "description": "..."},\n'
        '                     {"scamper_type": "Combine", "description": "..."},\n'
        '                     {"scamper_type": "Adapt", "description": "..."}],\n'
        ' "most_promising": 0, "claim": "..."}'
    )


def _fallback_transformations(gist: str) -> list[dict[str, str]]:
    return [
        {
            "scamper_type": "Substitute",
            "description": f"Substitute the conventional interface of a {gist} with a more direct channel.",
        },
        {
            "scamper_type": "Combine",
            "description": f"Combine a {gist} with existing infrastructure already in users' hands.",
        },
        {
            "scamper_type": "Adapt",
            "description": f"Adapt proven interaction patterns from adjacent domains to a {gist}.",
        },
    ]


def run_scamper(
    idea: str, problem_id: str, graph: KnowledgeGraph, llm: LlmGateway
) -> AgentReport:
    """Transformation analysis: 3 Transformations with distinct operations,
    1 Claim, one GENERATES edge from the most promising transformation."""
    _require_problem(graph, problem_id)
    gist = idea_gist(idea)
    fallback_claim = f"A transformed approach combining SCAMPER principles for a {gist}"
    fallbacks = _fallback_transformations(gist)

    transformations = list(fallbacks)
    claim_text = fallback_claim
    promising_index = 0
    used_fallback = True

    result = llm.generate_json(
        llm.make_request(_scamper_prompt(idea)), ["transformations", "claim"]
    )
    if isinstance(result, (Malformed, Unavailable)):
        logger.info("transformation agent falling back: %s", result.reason)
    else:
        parsed = result.get("transformations")
        valid: list[dict[str, str]] = []
        seen_types: set[str] = set()
        if isinstance(parsed, list):
            for entry in parsed:
                if not isinstance(entry, dict):
                    continue
                stype = entry.get("scamper_type")
                if stype not in SCAMPER_TYPES or stype in seen_types:
                    continue
                seen_types.add(stype)
                valid.append(
                    {
                        "scamper_type": stype,
                        "description": _clean_str(entry.get("description"), stype),
                    }
                )
        if valid:
            used_fallback = False
            # Duplicate or unknown operations get fallback transformations
            # substituted so the set of three stays distinct.
            for fb in fallbacks:
                if len(valid) >= 3:
                    break
                if fb["scamper_type"] not in seen_types:
                    seen_types.add(fb["scamper_type"])
                    valid.append(fb)
            transformations = valid[:3]
            claim_text = _clean_str(result.get("claim"), fallback_claim)
            index = result.get("most_promising")
            if isinstance(index, int) and not isinstance(index, bool) and 0 <= index < 3:
                promising_index = index

    report = AgentReport(Methodology.SCAMPER, claim_id="", used_fallback=used_fallback)
    transformation_ids = []
    for entry in transformations:
        tid = graph.create_node(NodeLabel.TRANSFORMATION, entry)
        transformation_ids.append(tid)
        report.created_node_ids.append(tid)
    claim_id = graph.create_node(
        NodeLabel.CLAIM,
        {
            "text": claim_text,
            "methodology": Methodology.SCAMPER.value,
            "strength": CLAIM_STRENGTH[Methodology.SCAMPER],
        },
    )
    report.created_node_ids.append(claim_id)
    report.claim_id = claim_id
    report.created_edge_ids.append(
        graph.create_edge(transformation_ids[promising_index], claim_id, EdgeType.GENERATES)
    )
    return report
