"""JSON-RPC 2.0 tool server over newline-delimited stdio.

Exposes the five graph tools to external agents: get_all_claims,
get_convergent_claims, get_strongest_claims, get_kg_summary and add_claim.
One request per line in, one response per line out; notifications get no
response; EOF shuts the server down cleanly.
"""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path
from typing import Any, IO

from . import __version__
from .agents import CLAIM_STRENGTH, Methodology
from .convergence import convergent_pairs
from .graph import KnowledgeGraph, NodeLabel
from .scoring import ScoreWeights, rank_claims

logger = logging.getLogger(__name__)

_METHODOLOGY_VALUES = frozenset(m.value for m in Methodology)

PROTOCOL_VERSION = "2024-11-05"

PARSE_ERROR = -32700
INVALID_REQUEST = -32600
METHOD_NOT_FOUND = -32601
INVALID_PARAMS = -32602
INTERNAL_ERROR = -32603

TOOL_DESCRIPTORS: list[dict[str, Any]] = [
    {
        "name": "get_all_claims",
        "description": "List claim nodes, optionally filtered by methodology.",
        "inputSchema": {
            "type": "object",
            "properties": {
                "methodology": {"type": "string", "enum": ["TRIZ", "DT", "SCAMPER"]},
            },
        },
    },
    {
        "name": "get_convergent_claims",
        "description": "List cross-methodology convergent claim pairs with similarity and count.",
        "inputSchema": {"type": "object", "properties": {}},
    },
    {
        "name": "get_strongest_claims",
        "description": "List the top claims by innovation score with full breakdowns.",
        "inputSchema": {
            "type": "object",
            "properties": {"limit": {"type": "integer", "minimum": 1}},
            "required": ["limit"],
        },
    },
    {
        "name": "get_kg_summary",
        "description": "Node and edge counts for the innovation graph.",
        "inputSchema": {"type": "object", "properties": {}},
    },
    {
        "name": "add_claim",
        "description": "Add a claim node; strength defaults to the methodology's fixed value.",
        "inputSchema": {
            "type": "object",
            "properties": {
                "text": {"type": "string", "minLength": 1},
                "methodology": {"type": "string", "enum": ["TRIZ", "DT", "SCAMPER"]},
                "strength": {"type": "number", "minimum": 0, "maximum": 1},
            },
            "required": ["text", "methodology"],
        },
    },
]


class ToolError(Exception):
    """Invalid tool arguments; mapped to a JSON-RPC invalid-params error."""


class McpServer:
    def __init__(
        self,
        graph: KnowledgeGraph,
        weights: ScoreWeights | None = None,
        snapshot_path: str | Path | None = None,
    ):
        self.graph = graph
        self.weights = weights or ScoreWeights()
        self.snapshot_path = Path(snapshot_path) if snapshot_path else None

    # -- Tool implementations ------------------------------------------------

    def tool_get_all_claims(self, args: dict[str, Any]) -> dict[str, Any]:
        methodology = args.get("methodology")
        if methodology is not None and methodology not in _METHODOLOGY_VALUES:
            raise ToolError(f"unknown methodology: {methodology!r}")
        claims = self.graph.get_claims(methodology)
        return {"claims": [c.to_dict() for c in claims]}

    def tool_get_convergent_claims(self, args: dict[str, Any]) -> dict[str, Any]:
        return {"pairs": [p.to_dict() for p in convergent_pairs(self.graph)]}

    def tool_get_strongest_claims(self, args: dict[str, Any]) -> dict[str, Any]:
        limit = args.get("limit")
        if isinstance(limit, bool) or not isinstance(limit, int) or limit < 1:
            raise ToolError(f"limit must be an integer >= 1, got {limit!r}")
        if not self.graph.get_claims():
            return {"claims": []}
        ranked = rank_claims(self.graph, self.weights)[:limit]
        return {
            "claims": [
                {
                    "claim_id": claim_id,
                    "text": self.graph.node(claim_id).properties["text"],
                    "methodology": self.graph.node(claim_id).properties["methodology"],
                    "score": breakdown.to_dict(),
                }
                for claim_id, breakdown in ranked
            ]
        }

    def tool_get_kg_summary(self, args: dict[str, Any]) -> dict[str, Any]:
        return self.graph.summary().to_dict()

    def tool_add_claim(self, args: dict[str, Any]) -> dict[str, Any]:
        text = args.get("text")
        methodology = args.get("methodology")
        if not isinstance(text, str) or not text.strip():
            raise ToolError("text must be a non-empty string")
        if methodology not in _METHODOLOGY_VALUES:
            raise ToolError(f"unknown methodology: {methodology!r}")
        strength = args.get("strength")
        if strength is None:
            strength = CLAIM_STRENGTH[Methodology(methodology)]
        if isinstance(strength, bool) or not isinstance(strength, (int, float)):
            raise ToolError(f"strength must be a number, got {strength!r}")
        if not 0.0 <= float(strength) <= 1.0:
            raise ToolError(f"strength must be in [0, 1], got {strength!r}")
        claim_id = self.graph.create_node(
            NodeLabel.CLAIM,
            {"text": text.strip(), "methodology": methodology, "strength": float(strength)},
        )
        if self.snapshot_path is not None:
            self.graph.snapshot_save(self.snapshot_path)
        return {"claim_id": claim_id, "strength": float(strength)}

    # -- JSON-RPC plumbing -----------------------------------------------------

    _TOOLS = {
        "get_all_claims": tool_get_all_claims,
        "get_convergent_claims": tool_get_convergent_claims,
        "get_strongest_claims": tool_get_strongest_claims,
        "get_kg_summary": tool_get_kg_summary,
        "add_claim": tool_add_claim,
    }

    def handle_request(self, request: dict[str, Any]) -> dict[str, Any] | None:
        """Dispatch one parsed JSON-RPC request; None for notifications."""
        request_id = request.get("id")
        method = request.get("method")
        is_notification = "id" not in request

        def error(code: int, message: str) -> dict[str, Any] | None:
            if is_notification:
                return None
            return {"jsonrpc": "2.0", "id": request_id, "error": {"code": code, "message": message}}

        def result(payload: dict[str, Any]) -> dict[str, Any] | None:
            if is_notification:
                return None
            return {"jsonrpc": "2.0", "id": request_id, "result": payload}

        if not isinstance(method, str):
            return error(INVALID_REQUEST, "request has no method")
        if method == "initialize":
            return result(
                {
                    "protocolVersion": PROTOCOL_VERSION,
                    "capabilities": {"tools": {}},
                    "serverInfo": {"name": "ideaforge", "version": __version__},
                }
            )
        if method == "tools/list":
            return result({"tools": TOOL_DESCRIPTORS})
        if method == "tools/call":
            params = request.get("params") or {}
            name = params.get("name")
            handler = self._TOOLS.get(name)
            if handler is None:
                return error(METHOD_NOT_FOUND, f"unknown tool: {name!r}")
            arguments = params.get("arguments") or {}
            if not isinstance(arguments, dict):
                return error(INVALID_PARAMS, "arguments must be an object")
            try:
                payload = handler(self, arguments)
            except ToolError as exc:
                return error(INVALID_PARAMS, str(exc))
            except Exception as exc:
                logger.exception("tool %s failed", name)
                return error(INTERNAL_ERROR, f"tool failed: {exc}")
            return result(
                {"content": [{"type": "text", "text": json.dumps(payload, ensure_ascii=False)}]}
            )
        if method.startswith("notifications/"):
            return None
        return error(METHOD_NOT_FOUND, f"method not found: {method}")

    def serve(self, stdin: IO[str] | None = None, stdout: IO[str] | None = None) -> None:
        """Run the request loop until EOF on the input stream."""
        stdin = stdin if stdin is not None else sys.stdin
        stdout = stdout if stdout is not None else sys.stdout
        for line in stdin:
            line = line.strip()
            if not line:
                continue
            try:
                request = json.loads(line)
            except json.JSONDecodeError as exc:
                response: dict[str, Any] | None = {
                    "jsonrpc": "2.0",
                    "id": None,
                    "error": {"code": PARSE_ERROR, "message": f"parse error: {exc}"},
                }
            else:
                if isinstance(request, dict):
                    response = self.handle_request(request)
                else:
                    response = {
                        "jsonrpc": "2.0",
                        "id": None,
                        "error": {"code": INVALID_REQUEST, "message": "request must be an object"},
                    }
            if response is not None:
                stdout.write(json.dumps(response, ensure_ascii=False) + "\n")
                stdout.flush()


def serve(
    graph: KnowledgeGraph,
    stdin: IO[str] | None = None,
    stdout: IO[str] | None = None,
    weights: ScoreWeights | None = None,
    snapshot_path: str | Path | None = None,
) -> None:
    McpServer(graph, weights, snapshot_path).serve(stdin, stdout)
