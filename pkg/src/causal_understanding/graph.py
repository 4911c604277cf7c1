"""Causal diagrams with functional controllers, ambiguous and correlational links.

A :class:`Diagram` is an immutable value. Every mutation helper returns a new
diagram, so intermediate states of a construction can be kept around freely.

Three edge flavours exist:

* ``DIRECTED``       solid arrow ``a -> b``
* ``AMBIGUOUS``      dashed undirected link, direction unknown
* ``CORRELATIONAL``  dashed bidirected link, an unobserved common cause

Functional controllers (``f``, ``g``, ``z`` and the human approximations
``f^H``, ``g^H``, ``z^H``) annotate edges; they are not nodes.
"""

from __future__ import annotations

import enum
import html
import itertools
import json
from dataclasses import dataclass, replace
from typing import Iterable, Iterator

__all__ = [
    "VariableRole",
    "EdgeKind",
    "Node",
    "Edge",
    "Diagram",
    "Violation",
    "DiagramError",
    "DuplicateRole",
    "CycleIntroduced",
    "UnknownNode",
    "SelfLoop",
    "InvalidDiagram",
    "CONTROLLERS",
    "HUMAN_COUNTERPART",
    "new_diagram",
    "add_edge",
    "validate",
    "realizations",
    "to_json",
    "from_json",
    "to_dot",
]


class DiagramError(ValueError):
    """Base class for diagram construction errors."""


class DuplicateRole(DiagramError):
    pass


class CycleIntroduced(DiagramError):
    pass


class UnknownNode(DiagramError):
    pass


class SelfLoop(DiagramError):
    pass


class InvalidDiagram(DiagramError):
    pass


class VariableRole(enum.Enum):
    INPUT = "X"
    TASK_LABEL = "Y"
    MODEL_PREDICTION = "Yhat"
    MODEL_ERROR = "Z"
    HUMAN_TASK_LABEL = "YH"
    HUMAN_MODEL_PREDICTION = "YhatH"
    HUMAN_MODEL_ERROR = "ZH"
    INTUITION = "H"
    EXPLANATION = "E"
    GENERIC = "generic"

    @property
    def default_id(self) -> str:
        if self is VariableRole.GENERIC:
            raise ValueError("generic nodes carry their own name")
        return self.value

    @property
    def symbol(self) -> str:
        return _SYMBOLS.get(self, self.value)


_SYMBOLS = {
    VariableRole.MODEL_PREDICTION: "Ŷ",
    VariableRole.HUMAN_TASK_LABEL: "Y^H",
    VariableRole.HUMAN_MODEL_PREDICTION: "Ŷ^H",
    VariableRole.HUMAN_MODEL_ERROR: "Z^H",
}

HUMAN_COUNTERPART = {
    VariableRole.TASK_LABEL: VariableRole.HUMAN_TASK_LABEL,
    VariableRole.MODEL_PREDICTION: VariableRole.HUMAN_MODEL_PREDICTION,
    VariableRole.MODEL_ERROR: VariableRole.HUMAN_MODEL_ERROR,
}

# controller tags used by the built-in diagrams; any other string is a named tag
CONTROLLERS = ("f", "g", "z", "f^H", "g^H", "z^H")


class EdgeKind(enum.Enum):
    DIRECTED = "directed"
    AMBIGUOUS = "ambiguous"
    CORRELATIONAL = "correlational"


@dataclass(frozen=True)
class Node:
    id: str
    role: VariableRole

    def __lt__(self, other: "Node") -> bool:
        return (self.id, self.role.value) < (other.id, other.role.value)

    @property
    def label(self) -> str:
        if self.role is VariableRole.GENERIC:
            return self.id
        return self.role.symbol


@dataclass(frozen=True)
class Edge:
    """An edge between two node ids.

    Undirected kinds are normalised so that ``source <= target``; equality is
    therefore order-independent for ambiguous and correlational links.
    """

    source: str
    target: str
    kind: EdgeKind = EdgeKind.DIRECTED
    controller: str | None = None

    def __post_init__(self) -> None:
        if self.kind is not EdgeKind.DIRECTED and self.source > self.target:
            a, b = self.target, self.source
            object.__setattr__(self, "source", a)
            object.__setattr__(self, "target", b)

    def __lt__(self, other: "Edge") -> bool:  # stable ordering for output
        return self._key() < other._key()

    def _key(self) -> tuple:
        return (self.source, self.target, self.kind.value, self.controller or "")

    @property
    def endpoints(self) -> tuple[str, str]:
        return (self.source, self.target)

    def touches(self, node: str) -> bool:
        return node in (self.source, self.target)

    def other(self, node: str) -> str:
        return self.target if node == self.source else self.source

    def oriented(self, source: str) -> "Edge":
        """Directed copy of an ambiguous link pointing away from ``source``."""
        return Edge(source, self.other(source), EdgeKind.DIRECTED, self.controller)


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str


@dataclass(frozen=True)
class Diagram:
    nodes: frozenset[Node] = frozenset()
    edges: frozenset[Edge] = frozenset()
    equivalences: frozenset[frozenset[str]] = frozenset()

    # -- lookups ---------------------------------------------------------
    @property
    def ids(self) -> frozenset[str]:
        return frozenset(n.id for n in self.nodes)

    def node(self, node_id: str) -> Node:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise UnknownNode(node_id)

    def has_role(self, role: VariableRole) -> bool:
        return any(n.role is role for n in self.nodes)

    def id_of(self, role: VariableRole) -> str:
        matches = [n.id for n in self.nodes if n.role is role]
        if len(matches) != 1:
            raise UnknownNode(f"diagram has {len(matches)} nodes with role {role.name}")
        return matches[0]

    def edges_of(self, kind: EdgeKind) -> list[Edge]:
        return sorted(e for e in self.edges if e.kind is kind)

    def parents(self, node_id: str) -> set[str]:
        return {
            e.source
            for e in self.edges
            if e.kind is EdgeKind.DIRECTED and e.target == node_id
        }

    def children(self, node_id: str) -> set[str]:
        return {
            e.target
            for e in self.edges
            if e.kind is EdgeKind.DIRECTED and e.source == node_id
        }

    def equivalent(self, a: str, b: str) -> bool:
        return frozenset((a, b)) in self.equivalences

    @property
    def is_realized(self) -> bool:
        return not any(e.kind is EdgeKind.AMBIGUOUS for e in self.edges)

    # -- value-style updates --------------------------------------------
    def with_edges(self, add: Iterable[Edge] = (), remove: Iterable[Edge] = ()) -> "Diagram":
        return replace(self, edges=(self.edges - frozenset(remove)) | frozenset(add))

    def with_equivalence(self, a: str, b: str) -> "Diagram":
        return replace(self, equivalences=self.equivalences | {frozenset((a, b))})

    def with_node(self, node: Node) -> "Diagram":
        if node.id in self.ids:
            raise DuplicateRole(f"node id {node.id!r} already present")
        if node.role is not VariableRole.GENERIC and self.has_role(node.role):
            raise DuplicateRole(node.role.name)
        return replace(self, nodes=self.nodes | {node})


def _as_node(item: VariableRole | str | Node) -> Node:
    if isinstance(item, Node):
        return item
    if isinstance(item, VariableRole):
        return Node(item.default_id, item)
    return Node(str(item), VariableRole.GENERIC)


def new_diagram(roles: Iterable[VariableRole | str | Node]) -> Diagram:
    """Edgeless diagram over ``roles``; plain strings become generic nodes."""
    nodes = [_as_node(r) for r in roles]
    if not nodes:
        raise DiagramError("a diagram needs at least one node")
    seen_roles: set[VariableRole] = set()
    seen_ids: set[str] = set()
    for n in nodes:
        if n.role is not VariableRole.GENERIC:
            if n.role in seen_roles:
                raise DuplicateRole(n.role.name)
            seen_roles.add(n.role)
        if n.id in seen_ids:
            raise DuplicateRole(f"node id {n.id!r} repeated")
        seen_ids.add(n.id)
    return Diagram(nodes=frozenset(nodes))


def _directed_adjacency(edges: Iterable[Edge]) -> dict[str, set[str]]:
    adj: dict[str, set[str]] = {}
    for e in edges:
        if e.kind is EdgeKind.DIRECTED:
            adj.setdefault(e.source, set()).add(e.target)
    return adj


def _reaches(adj: dict[str, set[str]], start: str, goal: str) -> bool:
    stack, seen = [start], {start}
    while stack:
        u = stack.pop()
        if u == goal:
            return True
        for v in adj.get(u, ()):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return False


def find_cycle(edges: Iterable[Edge]) -> list[str] | None:
    """Return one directed cycle as a node list, or ``None``."""
    adj = _directed_adjacency(edges)
    white, grey, black = 0, 1, 2
    colour: dict[str, int] = {}
    parent: dict[str, str] = {}
    for root in sorted(adj):
        if colour.get(root, white) != white:
            continue
        stack: list[tuple[str, Iterator[str]]] = [(root, iter(sorted(adj.get(root, ()))))]
        colour[root] = grey
        while stack:
            u, it = stack[-1]
            for v in it:
                c = colour.get(v, white)
                if c == grey:
                    cycle = [u]
                    while cycle[-1] != v:
                        cycle.append(parent[cycle[-1]])
                    return cycle[::-1]
                if c == white:
                    colour[v] = grey
                    parent[v] = u
                    stack.append((v, iter(sorted(adj.get(v, ())))))
                    break
            else:
                colour[u] = black
                stack.pop()
    return None


def add_edge(d: Diagram, e: Edge) -> Diagram:
    ids = d.ids
    for end in e.endpoints:
        if end not in ids:
            raise UnknownNode(end)
    if e.source == e.target:
        raise SelfLoop(e.source)
    if e.kind is EdgeKind.DIRECTED:
        if _reaches(_directed_adjacency(d.edges), e.target, e.source):
            raise CycleIntroduced(f"{e.source} -> {e.target}")
    return d.with_edges(add=[e])


def validate(d: Diagram) -> list[Violation]:
    """Every invariant violation of ``d``; an empty list means valid."""
    out: list[Violation] = []
    ids = [n.id for n in d.nodes]
    for dup in sorted({i for i in ids if ids.count(i) > 1}):
        out.append(Violation("DuplicateRole", f"node id {dup!r} repeated"))
    roles = [n.role for n in d.nodes if n.role is not VariableRole.GENERIC]
    for r in sorted({r for r in roles if roles.count(r) > 1}, key=lambda r: r.value):
        out.append(Violation("DuplicateRole", r.name))
    known = set(ids)
    for e in sorted(d.edges):
        for end in e.endpoints:
            if end not in known:
                out.append(Violation("UnknownNode", f"{end!r} in edge {e.source}-{e.target}"))
        if e.source == e.target:
            out.append(Violation("SelfLoop", e.source))
    cycle = find_cycle(e for e in d.edges if e.source != e.target)
    if cycle:
        out.append(Violation("CycleViolation", " -> ".join(cycle + cycle[:1])))
    by_id = {n.id: n for n in d.nodes}
    for pair in sorted(d.equivalences, key=sorted):
        members = sorted(pair)
        if len(members) != 2 or any(m not in by_id for m in members):
            out.append(Violation("BadEquivalence", f"{members}"))
            continue
        r = {by_id[m].role for m in members}
        if not any({core, human} == r for core, human in HUMAN_COUNTERPART.items()):
            out.append(Violation("BadEquivalence", f"{members} are not a core/human pair"))
    return out


def realizations(d: Diagram) -> set[Diagram]:
    """All acyclic orientations of the ambiguous links of ``d``."""
    problems = validate(d)
    if problems:
        raise InvalidDiagram("; ".join(f"{v.kind}: {v.detail}" for v in problems))
    ambiguous = d.edges_of(EdgeKind.AMBIGUOUS)
    fixed = d.edges - frozenset(ambiguous)
    out: set[Diagram] = set()
    for flips in itertools.product((False, True), repeat=len(ambiguous)):
        chosen = [
            e.oriented(e.target if flip else e.source) for e, flip in zip(ambiguous, flips)
        ]
        edges = fixed | frozenset(chosen)
        if find_cycle(edges) is None:
            out.add(replace(d, edges=edges))
    return out


def realization_label(original: Diagram, realized: Diagram) -> str:
    """Short text naming the orientation chosen for each ambiguous link."""
    parts = []
    for e in original.edges_of(EdgeKind.AMBIGUOUS):
        fwd = Edge(e.source, e.target, EdgeKind.DIRECTED, e.controller)
        parts.append(f"{e.source}->{e.target}" if fwd in realized.edges else f"{e.target}->{e.source}")
    return ",".join(parts)


# -- serialisation -------------------------------------------------------


def to_dict(d: Diagram) -> dict:
    return {
        "nodes": [{"id": n.id, "role": n.role.name} for n in sorted(d.nodes)],
        "edges": [
            {"from": e.source, "to": e.target, "kind": e.kind.value, "controller": e.controller}
            for e in sorted(d.edges)
        ],
        "equivalences": [sorted(p) for p in sorted(d.equivalences, key=sorted)],
    }


def from_dict(doc: dict) -> Diagram:
    try:
        nodes = frozenset(Node(n["id"], VariableRole[n["role"]]) for n in doc["nodes"])
        edges = frozenset(
            Edge(e["from"], e["to"], EdgeKind(e["kind"]), e.get("controller"))
            for e in doc.get("edges", [])
        )
        eqs = frozenset(frozenset(p) for p in doc.get("equivalences", []))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidDiagram(f"malformed diagram document: {exc}") from exc
    d = Diagram(nodes, edges, eqs)
    problems = validate(d)
    if problems:
        raise InvalidDiagram("; ".join(f"{v.kind}: {v.detail}" for v in problems))
    return d


def to_json(d: Diagram) -> str:
    return json.dumps(to_dict(d), indent=2, ensure_ascii=False)


def from_json(text: str) -> Diagram:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidDiagram(str(exc)) from exc
    return from_dict(doc)


def to_dot(d: Diagram, name: str = "diagram") -> str:
    """Graphviz source; equivalent nodes are drawn as one merged node."""
    merged: dict[str, str] = {n.id: n.id for n in d.nodes}
    for pair in d.equivalences:
        a, b = sorted(pair)
        keep = a if d.node(a).role in HUMAN_COUNTERPART else b
        drop = b if keep == a else a
        merged[drop] = keep
    labels: dict[str, list[str]] = {}
    for n in sorted(d.nodes):
        labels.setdefault(merged[n.id], []).append(n.label)

    lines = [f'digraph "{name}" {{', "  rankdir=LR;", "  node [shape=ellipse];"]
    for nid in sorted(labels):
        lines.append(f'  "{nid}" [label="{" ≡ ".join(labels[nid])}"];')
    for e in sorted(d.edges):
        u, v = merged[e.source], merged[e.target]
        if u == v:
            continue
        attrs = []
        if e.kind is EdgeKind.AMBIGUOUS:
            attrs += ["style=dashed", "dir=none"]
        elif e.kind is EdgeKind.CORRELATIONAL:
            attrs += ["style=dashed", "dir=both"]
        if e.controller:
            tag = html.escape(e.controller)
            attrs.append(f'label=<<TABLE BORDER="1" CELLBORDER="0"><TR><TD>{tag}</TD></TR></TABLE>>')
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f'  "{u}" -> "{v}"{suffix};')
    lines.append("}")
    return "\n".join(lines) + "\n"
