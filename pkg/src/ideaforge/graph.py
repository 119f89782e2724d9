"""In-process typed property graph for innovation analysis.

Eight node labels and eight edge types, with endpoint constraints enforced
on every write. Storage is plain adjacency maps keyed by id; persistence is
a whole-graph JSON snapshot with a trailing checksum. A remote graph
database backend is a declared extension point (see ``GraphBackend``), not
an implementation: the semantics that matter live in the schema checks.

Concurrency contract: many concurrent readers or one exclusive writer. All
public methods serialize through a single re-entrant lock, so sharing one
instance across threads is safe; snapshot saves see a consistent view.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Protocol

from .exceptions import CorruptSnapshot, SchemaViolation, UnknownNode

Scalar = str | int | float | bool


class NodeLabel(str, Enum):
    PROBLEM = "Problem"
    CONTRADICTION = "Contradiction"
    PRINCIPLE = "Principle"
    USER_NEED = "UserNeed"
    TRANSFORMATION = "Transformation"
    ANALOGY = "Analogy"
    PRIOR_ART = "PriorArt"
    CLAIM = "Claim"


class EdgeType(str, Enum):
    HAS_CONTRADICTION = "HAS_CONTRADICTION"
    RESOLVED_BY = "RESOLVED_BY"
    SUPPORTS = "SUPPORTS"
    MOTIVATES = "MOTIVATES"
    GENERATES = "GENERATES"
    INSPIRES = "INSPIRES"
    CHALLENGES = "CHALLENGES"
    CONVERGENT = "CONVERGENT"


# Required property keys per node label.
REQUIRED_PROPERTIES: dict[NodeLabel, tuple[str, ...]] = {
    NodeLabel.PROBLEM: ("statement", "domain"),
    NodeLabel.CONTRADICTION: ("improving", "worsening"),
    NodeLabel.PRINCIPLE: ("name", "triz_number", "description"),
    NodeLabel.USER_NEED: ("persona", "job_to_be_done", "pain_level"),
    NodeLabel.TRANSFORMATION: ("scamper_type", "description"),
    NodeLabel.ANALOGY: ("source_domain", "mechanism"),
    NodeLabel.PRIOR_ART: ("title", "source", "similarity"),
    NodeLabel.CLAIM: ("text", "methodology", "strength"),
}

# Legal (source label, destination label) per edge type.
EDGE_ENDPOINTS: dict[EdgeType, tuple[NodeLabel, NodeLabel]] = {
    EdgeType.HAS_CONTRADICTION: (NodeLabel.PROBLEM, NodeLabel.CONTRADICTION),
    EdgeType.RESOLVED_BY: (NodeLabel.CONTRADICTION, NodeLabel.PRINCIPLE),
    EdgeType.SUPPORTS: (NodeLabel.PRINCIPLE, NodeLabel.CLAIM),
    EdgeType.MOTIVATES: (NodeLabel.USER_NEED, NodeLabel.PROBLEM),
    EdgeType.GENERATES: (NodeLabel.TRANSFORMATION, NodeLabel.CLAIM),
    EdgeType.INSPIRES: (NodeLabel.ANALOGY, NodeLabel.CLAIM),
    EdgeType.CHALLENGES: (NodeLabel.PRIOR_ART, NodeLabel.CLAIM),
    EdgeType.CONVERGENT: (NodeLabel.CLAIM, NodeLabel.CLAIM),
}

VALID_METHODOLOGIES = ("TRIZ", "DT", "SCAMPER")

# Edge types traversed backwards when assembling a claim's supporting subgraph.
_SUPPORT_TRAVERSAL = (
    EdgeType.SUPPORTS,
    EdgeType.RESOLVED_BY,
    EdgeType.HAS_CONTRADICTION,
    EdgeType.GENERATES,
)

SNAPSHOT_VERSION = 1

# Property used as the human-readable node caption in DOT exports.
_DISPLAY_KEY: dict[NodeLabel, str] = {
    NodeLabel.PROBLEM: "statement",
    NodeLabel.CONTRADICTION: "improving",
    NodeLabel.PRINCIPLE: "name",
    NodeLabel.USER_NEED: "persona",
    NodeLabel.TRANSFORMATION: "scamper_type",
    NodeLabel.ANALOGY: "source_domain",
    NodeLabel.PRIOR_ART: "title",
    NodeLabel.CLAIM: "text",
}


@dataclass(frozen=True)
class Node:
    id: str
    label: NodeLabel
    properties: dict[str, Scalar]

    def to_dict(self) -> dict[str, Any]:
        return {"id": self.id, "label": self.label.value, "properties": dict(self.properties)}


@dataclass(frozen=True)
class Edge:
    id: str
    src: str
    dst: str
    type: EdgeType
    properties: dict[str, Scalar]

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "src": self.src,
            "dst": self.dst,
            "type": self.type.value,
            "properties": dict(self.properties),
        }


@dataclass(frozen=True)
class GraphSummary:
    """Node and edge counts by label/type; only non-zero entries are kept."""

    node_counts: dict[NodeLabel, int]
    edge_counts: dict[EdgeType, int]
    total_nodes: int
    total_edges: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "node_counts": {k.value: v for k, v in self.node_counts.items()},
            "edge_counts": {k.value: v for k, v in self.edge_counts.items()},
            "total_nodes": self.total_nodes,
            "total_edges": self.total_edges,
        }


@dataclass
class Subgraph:
    nodes: list[Node] = field(default_factory=list)
    edges: list[Edge] = field(default_factory=list)

    @property
    def node_ids(self) -> set[str]:
        return {n.id for n in self.nodes}

    def nodes_with_label(self, label: NodeLabel) -> list[Node]:
        return [n for n in self.nodes if n.label == label]


class GraphBackend(Protocol):
    """Extension point for a remote graph store. Not implemented here."""

    def create_node(self, label: NodeLabel | str, properties: dict[str, Scalar]) -> str: ...
    def create_edge(
        self, src: str, dst: str, edge_type: EdgeType | str, properties: dict[str, Scalar]
    ) -> str: ...


def _coerce_label(label: NodeLabel | str) -> NodeLabel:
    try:
        return NodeLabel(label)
    except ValueError:
        raise SchemaViolation(f"unknown node label: {label!r}") from None


def _coerce_edge_type(edge_type: EdgeType | str) -> EdgeType:
    try:
        return EdgeType(edge_type)
    except ValueError:
        raise SchemaViolation(f"unknown edge type: {edge_type!r}") from None


def _check_scalar_properties(properties: dict[str, Any], what: str) -> dict[str, Scalar]:
    checked: dict[str, Scalar] = {}
    for key, value in properties.items():
        if not isinstance(key, str):
            raise SchemaViolation(f"{what} property key must be a string, got {key!r}")
        if not isinstance(value, (str, bool, int, float)):
            raise SchemaViolation(
                f"{what} property {key!r} must be a scalar, got {type(value).__name__}"
            )
        checked[key] = value
    return checked


def _check_number_range(properties: dict[str, Scalar], key: str, what: str) -> None:
    value = properties[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaViolation(f"{what}.{key} must be a number, got {value!r}")
    if not 0.0 <= float(value) <= 1.0:
        raise SchemaViolation(f"{what}.{key} must be in [0, 1], got {value!r}")


class KnowledgeGraph:
    """Schema-enforcing property graph with snapshot persistence."""

    def __init__(self) -> None:
        self._lock = threading.RLock()
        self._nodes: dict[str, Node] = {}
        self._edges: dict[str, Edge] = {}
        self._outgoing: dict[str, list[str]] = {}
        self._incoming: dict[str, list[str]] = {}
        # unordered claim pair -> edge id, for CONVERGENT dedup
        self._convergent_pairs: dict[frozenset[str], str] = {}
        self._next_node_id = 1
        self._next_edge_id = 1

    # -- Mutation ------------------------------------------------------------

    def create_node(self, label: NodeLabel | str, properties: dict[str, Any]) -> str:
        """Create a node, validating required properties and value ranges.

        Returns the new node id (monotonically assigned integer, rendered as
        a string). Raises SchemaViolation on any schema breach.
        """
        node_label = _coerce_label(label)
        props = _check_scalar_properties(properties, node_label.value)
        missing = [k for k in REQUIRED_PROPERTIES[node_label] if k not in props]
        if missing:
            raise SchemaViolation(
                f"{node_label.value} node missing required propert"
                f"{'ies' if len(missing) > 1 else 'y'}: {', '.join(missing)}"
            )
        if node_label is NodeLabel.CLAIM:
            methodology = props["methodology"]
            if methodology not in VALID_METHODOLOGIES:
                raise SchemaViolation(
                    f"Claim.methodology must be one of {VALID_METHODOLOGIES}, got {methodology!r}"
                )
            _check_number_range(props, "strength", "Claim")
        elif node_label is NodeLabel.PRIOR_ART:
            _check_number_range(props, "similarity", "PriorArt")
        elif node_label is NodeLabel.USER_NEED:
            _check_number_range(props, "pain_level", "UserNeed")

        with self._lock:
            node_id = str(self._next_node_id)
            self._next_node_id += 1
            self._nodes[node_id] = Node(node_id, node_label, props)
            self._outgoing[node_id] = []
            self._incoming[node_id] = []
        return node_id

    def create_edge(
        self,
        src: str,
        dst: str,
        edge_type: EdgeType | str,
        properties: dict[str, Any] | None = None,
    ) -> str:
        """Create an edge after checking the endpoint-label constraint.

        CONVERGENT edges are deduplicated per unordered claim pair: a repeat
        detection increments the existing edge's ``count`` (other properties
        stay as first detected) and returns the existing edge id.
        """
        etype = _coerce_edge_type(edge_type)
        props = _check_scalar_properties(properties or {}, etype.value)
        with self._lock:
            src_node = self.node(src)
            dst_node = self.node(dst)
            expected = EDGE_ENDPOINTS[etype]
            if (src_node.label, dst_node.label) != expected:
                raise SchemaViolation(
                    f"{etype.value} requires {expected[0].value}->{expected[1].value}, "
                    f"got {src_node.label.value}->{dst_node.label.value}"
                )
            if etype is EdgeType.CONVERGENT:
                return self._create_convergent_edge(src_node, dst_node, props)
            return self._insert_edge(src, dst, etype, props)

    def _create_convergent_edge(
        self, src_node: Node, dst_node: Node, props: dict[str, Scalar]
    ) -> str:
        if src_node.id == dst_node.id:
            raise SchemaViolation("CONVERGENT edge cannot connect a claim to itself")
        if src_node.properties["methodology"] == dst_node.properties["methodology"]:
            raise SchemaViolation(
                "CONVERGENT endpoints must come from different methodologies, "
                f"both are {src_node.properties['methodology']!r}"
            )
        if "similarity" not in props:
            raise SchemaViolation("CONVERGENT edge requires a similarity property")
        _check_number_range(props, "similarity", "CONVERGENT")
        count = props.get("count", 1)
        if isinstance(count, bool) or not isinstance(count, int) or count < 1:
            raise SchemaViolation(f"CONVERGENT.count must be an integer >= 1, got {count!r}")
        props["count"] = count

        pair = frozenset((src_node.id, dst_node.id))
        existing_id = self._convergent_pairs.get(pair)
        if existing_id is not None:
            existing = self._edges[existing_id]
            updated = dict(existing.properties)
            updated["count"] = int(updated.get("count", 1)) + 1
            self._edges[existing_id] = Edge(
                existing.id, existing.src, existing.dst, existing.type, updated
            )
            return existing_id
        edge_id = self._insert_edge(src_node.id, dst_node.id, EdgeType.CONVERGENT, props)
        self._convergent_pairs[pair] = edge_id
        return edge_id

    def _insert_edge(
        self, src: str, dst: str, etype: EdgeType, props: dict[str, Scalar]
    ) -> str:
        edge_id = f"e{self._next_edge_id}"
        self._next_edge_id += 1
        self._edges[edge_id] = Edge(edge_id, src, dst, etype, props)
        self._outgoing[src].append(edge_id)
        self._incoming[dst].append(edge_id)
        return edge_id

    # -- Queries ---------------------------------------------------------------

    def node(self, node_id: str) -> Node:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise UnknownNode(f"no node with id {node_id!r}") from None

    def has_node(self, node_id: str) -> bool:
        return node_id in self._nodes

    def edge(self, edge_id: str) -> Edge:
        try:
            return self._edges[edge_id]
        except KeyError:
            raise UnknownNode(f"no edge with id {edge_id!r}") from None

    def nodes(self, label: NodeLabel | None = None) -> list[Node]:
        with self._lock:
            if label is None:
                return list(self._nodes.values())
            return [n for n in self._nodes.values() if n.label == label]

    def edges(self, edge_type: EdgeType | None = None) -> list[Edge]:
        with self._lock:
            if edge_type is None:
                return list(self._edges.values())
            return [e for e in self._edges.values() if e.type == edge_type]

    def get_claims(self, methodology_filter: str | None = None) -> list[Node]:
        """All Claim nodes in insertion order, optionally filtered."""
        with self._lock:
            claims = [n for n in self._nodes.values() if n.label == NodeLabel.CLAIM]
            if methodology_filter is not None:
                claims = [
                    c for c in claims if c.properties["methodology"] == methodology_filter
                ]
            return claims

    def incident_edges(
        self,
        node_id: str,
        edge_type: EdgeType | None = None,
        direction: str = "any",
    ) -> list[Edge]:
        """Edges touching ``node_id``; direction is 'in', 'out' or 'any'."""
        with self._lock:
            self.node(node_id)
            edge_ids: Iterable[str]
            if direction == "in":
                edge_ids = self._incoming[node_id]
            elif direction == "out":
                edge_ids = self._outgoing[node_id]
            elif direction == "any":
                edge_ids = list(self._outgoing[node_id]) + [
                    e for e in self._incoming[node_id] if e not in self._outgoing[node_id]
                ]
            else:
                raise ValueError(f"direction must be in/out/any, got {direction!r}")
            return [self._edges[eid] for eid in edge_ids if edge_type is None or self._edges[eid].type == edge_type]

    def convergent_neighbors(self, claim_id: str) -> list[tuple[Node, Edge]]:
        """Claims linked to ``claim_id`` via CONVERGENT edges (undirected)."""
        result = []
        for edge in self.incident_edges(claim_id, EdgeType.CONVERGENT, "any"):
            other = edge.dst if edge.src == claim_id else edge.src
            result.append((self.node(other), edge))
        return result

    def get_supporting_subgraph(self, claim_id: str) -> Subgraph:
        """Nodes and edges that ground a claim.

        Walks backwards from the claim through SUPPORTS, RESOLVED_BY,
        HAS_CONTRADICTION and GENERATES edges, then pulls in every UserNeed
        that MOTIVATES a Problem already in the subgraph.
        """
        with self._lock:
            claim = self.node(claim_id)
            if claim.label != NodeLabel.CLAIM:
                raise SchemaViolation(f"node {claim_id} is a {claim.label.value}, not a Claim")
            included: dict[str, Node] = {claim_id: claim}
            edges: dict[str, Edge] = {}
            frontier = [claim_id]
            while frontier:
                current = frontier.pop()
                for eid in self._incoming[current]:
                    edge = self._edges[eid]
                    if edge.type not in _SUPPORT_TRAVERSAL:
                        continue
                    edges[eid] = edge
                    if edge.src not in included:
                        included[edge.src] = self._nodes[edge.src]
                        frontier.append(edge.src)
            problems = [n.id for n in included.values() if n.label == NodeLabel.PROBLEM]
            for problem_id in problems:
                for eid in self._incoming[problem_id]:
                    edge = self._edges[eid]
                    if edge.type is EdgeType.MOTIVATES:
                        edges[eid] = edge
                        included.setdefault(edge.src, self._nodes[edge.src])
            ordered_nodes = sorted(included.values(), key=lambda n: int(n.id))
            ordered_edges = sorted(edges.values(), key=lambda e: int(e.id.lstrip("e")))
            return Subgraph(ordered_nodes, ordered_edges)

    def summary(self) -> GraphSummary:
        with self._lock:
            node_counts: dict[NodeLabel, int] = {}
            for node in self._nodes.values():
                node_counts[node.label] = node_counts.get(node.label, 0) + 1
            edge_counts: dict[EdgeType, int] = {}
            for edge in self._edges.values():
                edge_counts[edge.type] = edge_counts.get(edge.type, 0) + 1
            return GraphSummary(
                node_counts, edge_counts, len(self._nodes), len(self._edges)
            )

    # -- Persistence -----------------------------------------------------------

    def _payload(self) -> dict[str, Any]:
        return {
            "version": SNAPSHOT_VERSION,
            "nodes": [n.to_dict() for n in self._nodes.values()],
            "edges": [e.to_dict() for e in self._edges.values()],
        }

    @staticmethod
    def _checksum(payload: dict[str, Any]) -> str:
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def snapshot_save(self, path: str | Path) -> None:
        """Write the whole graph as JSON with a trailing checksum field."""
        with self._lock:
            payload = self._payload()
        document = dict(payload)
        document["checksum"] = self._checksum(payload)
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(document, fh, ensure_ascii=False, indent=1)

    @classmethod
    def snapshot_load(cls, path: str | Path) -> "KnowledgeGraph":
        """Load a snapshot produced by snapshot_save.

        Raises CorruptSnapshot on parse failure, version mismatch or
        checksum mismatch.
        """
        try:
            with open(path, encoding="utf-8") as fh:
                document = json.load(fh)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise CorruptSnapshot(f"snapshot is not valid JSON: {exc}") from exc
        if not isinstance(document, dict):
            raise CorruptSnapshot("snapshot root must be a JSON object")
        checksum = document.pop("checksum", None)
        if checksum is None:
            raise CorruptSnapshot("snapshot has no checksum field")
        if document.get("version") != SNAPSHOT_VERSION:
            raise CorruptSnapshot(f"unsupported snapshot version: {document.get('version')!r}")
        if cls._checksum(document) != checksum:
            raise CorruptSnapshot("snapshot checksum mismatch")
        return cls._from_payload(document)

    @classmethod
    def _from_payload(cls, payload: dict[str, Any]) -> "KnowledgeGraph":
        graph = cls()
        try:
            for record in payload["nodes"]:
                node = Node(
                    str(record["id"]),
                    _coerce_label(record["label"]),
                    _check_scalar_properties(record["properties"], record["label"]),
                )
                graph._nodes[node.id] = node
                graph._outgoing[node.id] = []
                graph._incoming[node.id] = []
            for record in payload["edges"]:
                edge = Edge(
                    str(record["id"]),
                    str(record["src"]),
                    str(record["dst"]),
                    _coerce_edge_type(record["type"]),
                    _check_scalar_properties(record["properties"], record["type"]),
                )
                if edge.src not in graph._nodes or edge.dst not in graph._nodes:
                    raise CorruptSnapshot(f"edge {edge.id} references a missing node")
                graph._edges[edge.id] = edge
                graph._outgoing[edge.src].append(edge.id)
                graph._incoming[edge.dst].append(edge.id)
                if edge.type is EdgeType.CONVERGENT:
                    graph._convergent_pairs[frozenset((edge.src, edge.dst))] = edge.id
        except (KeyError, TypeError, SchemaViolation) as exc:
            raise CorruptSnapshot(f"snapshot structure invalid: {exc}") from exc
        graph._next_node_id = 1 + max((int(n) for n in graph._nodes), default=0)
        graph._next_edge_id = 1 + max(
            (int(e.lstrip("e")) for e in graph._edges), default=0
        )
        return graph

    @classmethod
    def from_export(cls, document: str | dict[str, Any]) -> "KnowledgeGraph":
        """Rebuild a graph from an export(format='json') document."""
        payload = json.loads(document) if isinstance(document, str) else document
        try:
            return cls._from_payload(payload)
        except CorruptSnapshot as exc:
            raise ValueError(str(exc)) from exc

    # -- Export ------------------------------------------------------------------

    def export(self, format: str = "json") -> str:
        """Render the graph as a document: 'json' or GraphViz 'dot'."""
        if format == "json":
            with self._lock:
                return json.dumps(self._payload(), ensure_ascii=False, indent=1)
        if format == "dot":
            return self._export_dot()
        raise ValueError(f"unsupported export format: {format!r}")

    def _export_dot(self) -> str:
        def escape(text: str) -> str:
            return text.replace("\\", "\\\\").replace('"', '\\"')

        lines = ["digraph innovation_graph {", "  rankdir=LR;"]
        with self._lock:
            for node in self._nodes.values():
                caption = str(node.properties.get(_DISPLAY_KEY[node.label], ""))
                if len(caption) > 48:
                    caption = caption[:45] + "..."
                lines.append(
                    f'  n{node.id} [label="{escape(node.label.value)}: {escape(caption)}"];'
                )
            for edge in self._edges.values():
                lines.append(
                    f'  n{edge.src} -> n{edge.dst} [label="{edge.type.value}"];'
                )
        lines.append("}")
        return "\n".join(lines) + "\n"
