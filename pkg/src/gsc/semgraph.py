"""Semantic graph model and induction of task-relevant / perceptual subgraphs.

A semantic graph is a set of labelled nodes (each sitting on one of four
hierarchy levels, low to high) plus directed, unlabelled relations between
distinct nodes.  Relevance to a task is modelled as tag membership: a node
is selected by a label set if it carries at least one of the labels.

Graphs are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

LEVEL_MIN = 1
LEVEL_MAX = 4

TASK_NARROW = "narrow"
TASK_GENERAL = "general"

_NODE_FIELDS = {"id", "label", "level", "tags"}


class GraphValidationError(ValueError):
    """Raised when an operation requires a valid graph but violations exist."""

    def __init__(self, violations: list[str]):
        super().__init__("invalid semantic graph: " + "; ".join(violations))
        self.violations = violations


@dataclass(frozen=True)
class SemanticNode:
    id: str
    label: str
    level: int
    tags: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "tags", frozenset(self.tags))


@dataclass(frozen=True)
class SemanticGraph:
    """Nodes plus directed relations, kept in construction order.

    Construction never raises on bad data; use :func:`validate_graph` to
    obtain violations as values.
    """

    nodes: tuple[SemanticNode, ...] = ()
    relations: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(
            self, "relations", tuple((str(a), str(b)) for a, b in self.relations)
        )

    def node_ids(self) -> list[str]:
        return [n.id for n in self.nodes]

    def node(self, node_id: str) -> SemanticNode:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)

    def __eq__(self, other):
        if not isinstance(other, SemanticGraph):
            return NotImplemented
        return set(self.nodes) == set(other.nodes) and set(self.relations) == set(
            other.relations
        )

    def __hash__(self):
        return hash((frozenset(self.nodes), frozenset(self.relations)))


@dataclass(frozen=True)
class TaskSpec:
    """Label predicates for task-relevant and perceptual node selection.

    A narrow task has exactly one objective label; a general task has one
    or more.  Perceptual labels may be empty, in which case the perceptual
    subgraph is empty and the pipeline degenerates to task-only operation.
    """

    kind: str
    objective_labels: frozenset[str]
    perceptual_labels: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "objective_labels", frozenset(self.objective_labels))
        object.__setattr__(self, "perceptual_labels", frozenset(self.perceptual_labels))
        if self.kind not in (TASK_NARROW, TASK_GENERAL):
            raise ValueError(f"unknown task kind {self.kind!r}")
        if self.kind == TASK_NARROW and len(self.objective_labels) != 1:
            raise ValueError("narrow task requires exactly one objective label")
        if self.kind == TASK_GENERAL and not self.objective_labels:
            raise ValueError("general task requires at least one objective label")


def validate_graph(g: SemanticGraph) -> list[str]:
    """Check graph invariants; returns one description per violation.

    An empty list means the graph is valid.  Violations are data, not
    errors: duplicate ids, out-of-range levels, relations referencing
    unknown nodes, self-loops, and duplicate relations are all reported.
    """
    violations = []
    seen: set[str] = set()
    for n in g.nodes:
        if n.id in seen:
            violations.append(f"duplicate node id {n.id}")
        seen.add(n.id)
        if not (LEVEL_MIN <= n.level <= LEVEL_MAX):
            violations.append(
                f"node {n.id} level {n.level} outside [{LEVEL_MIN},{LEVEL_MAX}]"
            )
    seen_rel: set[tuple[str, str]] = set()
    for a, b in g.relations:
        for end in (a, b):
            if end not in seen:
                violations.append(f"relation references unknown node {end}")
        if a == b:
            violations.append(f"self-loop on {a}")
        if (a, b) in seen_rel:
            violations.append(f"duplicate relation ({a}, {b})")
        seen_rel.add((a, b))
    return violations


def induce_subgraph(g: SemanticGraph, labels) -> SemanticGraph:
    """Subgraph induced by tag membership.

    Keeps nodes whose tag set intersects ``labels`` and the relations whose
    endpoints both survive.  Node and relation order follow the parent, so
    inducing with a superset of all tags returns a graph equal to ``g``.
    """
    violations = validate_graph(g)
    if violations:
        raise GraphValidationError(violations)
    labels = frozenset(labels)
    kept = [n for n in g.nodes if n.tags & labels]
    kept_ids = {n.id for n in kept}
    relations = [(a, b) for a, b in g.relations if a in kept_ids and b in kept_ids]
    return SemanticGraph(tuple(kept), tuple(relations))


def task_subgraph(g: SemanticGraph, t: TaskSpec) -> SemanticGraph:
    """Task-relevant subgraph: nodes carrying an objective label."""
    return induce_subgraph(g, t.objective_labels)


def perceptual_subgraph(g: SemanticGraph, t: TaskSpec) -> SemanticGraph:
    """Perceptual subgraph: nodes carrying a perceptual label."""
    return induce_subgraph(g, t.perceptual_labels)


def graph_to_json(g: SemanticGraph, indent: int | None = 2) -> str:
    doc = {
        "nodes": [
            {"id": n.id, "label": n.label, "level": n.level, "tags": sorted(n.tags)}
            for n in g.nodes
        ],
        "relations": [[a, b] for a, b in g.relations],
    }
    return json.dumps(doc, indent=indent)


def graph_from_json(text: str) -> tuple[SemanticGraph, list[str]]:
    """Parse the JSON graph format, strictly.

    Unknown fields are rejected: they are dropped from the result and each
    one produces a warning suitable for inclusion in validation output.
    Returns ``(graph, warnings)``.
    """
    doc = json.loads(text)
    warnings: list[str] = []
    if not isinstance(doc, dict):
        raise ValueError("graph document must be a JSON object")
    for key in doc:
        if key not in ("nodes", "relations"):
            warnings.append(f"unknown field {key!r} at document root rejected")
    nodes = []
    for i, nd in enumerate(doc.get("nodes", [])):
        if not isinstance(nd, dict):
            raise ValueError(f"nodes[{i}] must be an object")
        for key in nd:
            if key not in _NODE_FIELDS:
                warnings.append(
                    f"unknown field {key!r} on node {nd.get('id', i)!r} rejected"
                )
        try:
            nodes.append(
                SemanticNode(
                    id=str(nd["id"]),
                    label=str(nd.get("label", nd["id"])),
                    level=int(nd.get("level", LEVEL_MIN)),
                    tags=frozenset(str(t) for t in nd.get("tags", [])),
                )
            )
        except KeyError as e:
            raise ValueError(f"nodes[{i}] missing required field {e.args[0]!r}") from e
    relations = []
    for i, rel in enumerate(doc.get("relations", [])):
        if not (isinstance(rel, (list, tuple)) and len(rel) == 2):
            raise ValueError(f"relations[{i}] must be a [from, to] pair")
        relations.append((str(rel[0]), str(rel[1])))
    return SemanticGraph(tuple(nodes), tuple(relations)), warnings
