"""Graph surgery for experiment conditions and the catalog of built-in diagrams."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

from .graph import (
    Diagram,
    DiagramError,
    Edge,
    EdgeKind,
    InvalidDiagram,
    Node,
    VariableRole as R,
    CycleIntroduced,
    HUMAN_COUNTERPART,
    add_edge,
    new_diagram,
    validate,
)

__all__ = [
    "Task",
    "Prediction",
    "Explanation",
    "Intuition",
    "Condition",
    "DecisionTree",
    "MissingCounterpart",
    "UnknownVariable",
    "ExplanationAlreadyPresent",
    "UnknownDiagram",
    "NEXT_INTUITION",
    "fig2",
    "base_diagram",
    "show",
    "attach_explanation",
    "build",
    "decision_tree",
    "catalog",
    "catalog_keys",
]


class MissingCounterpart(DiagramError):
    pass


class UnknownVariable(DiagramError):
    pass


class ExplanationAlreadyPresent(DiagramError):
    pass


class UnknownDiagram(KeyError):
    pass


class Task(enum.Enum):
    EMULATION = "emulation"
    DISCOVERY = "discovery"


class Prediction(enum.Enum):
    SHOWN = "shown"
    HIDDEN = "hidden"


class Explanation(enum.Enum):
    NONE = "none"
    SHOWN = "shown"


class Intuition(enum.Enum):
    NO_ASSUMPTION = "no_assumption"
    ACTIVATES_ERROR_PRIOR = "activates_error_prior"
    EXPANDS_INTUITION = "expands_intuition"


@dataclass(frozen=True)
class Condition:
    task: Task = Task.DISCOVERY
    prediction: Prediction = Prediction.HIDDEN
    explanation: Explanation = Explanation.NONE
    intuition: Intuition = Intuition.NO_ASSUMPTION

    def __post_init__(self) -> None:
        if self.intuition is not Intuition.NO_ASSUMPTION and self.explanation is Explanation.NONE:
            raise ValueError("an intuition assumption needs the explanation to be shown")


# id of the next-timestep intuition node used by the expand-intuition variant
NEXT_INTUITION = "H_{t+1}"

_HUMAN_TAG = {
    R.HUMAN_TASK_LABEL: "f^H",
    R.HUMAN_MODEL_PREDICTION: "g^H",
    R.HUMAN_MODEL_ERROR: "z^H",
}


def _d(src: R, dst: R, tag: str | None = None) -> Edge:
    return Edge(src.default_id, dst.default_id, EdgeKind.DIRECTED, tag)


def _core_side() -> list[Edge]:
    return [
        Edge(R.INPUT.default_id, R.TASK_LABEL.default_id, EdgeKind.AMBIGUOUS, "f"),
        _d(R.INPUT, R.MODEL_PREDICTION, "g"),
        _d(R.TASK_LABEL, R.MODEL_ERROR, "z"),
        _d(R.MODEL_PREDICTION, R.MODEL_ERROR, "z"),
    ]


def _wire(d: Diagram, edges: list[Edge]) -> Diagram:
    for e in edges:
        d = add_edge(d, e)
    return d


def fig2() -> Diagram:
    """Core functions next to the human approximations, no human-side links."""
    d = new_diagram([
        R.INPUT, R.TASK_LABEL, R.MODEL_PREDICTION, R.MODEL_ERROR,
        R.HUMAN_TASK_LABEL, R.HUMAN_MODEL_PREDICTION, R.HUMAN_MODEL_ERROR, R.INTUITION,
    ])
    human = []
    for role, tag in _HUMAN_TAG.items():
        human += [_d(R.INPUT, role, tag), _d(R.INTUITION, role, tag)]
    return _wire(d, _core_side() + human)


def base_diagram() -> Diagram:
    """The fig2 skeleton plus the dashed triangle among the local human variables."""
    yh, yhh, zh = (r.default_id for r in _HUMAN_TAG)
    triangle = [
        Edge(yh, yhh, EdgeKind.AMBIGUOUS),
        Edge(yh, zh, EdgeKind.AMBIGUOUS),
        Edge(yhh, zh, EdgeKind.AMBIGUOUS),
    ]
    return _wire(fig2(), triangle)


def _shown(d: Diagram, node_id: str) -> bool:
    return any(node_id in pair for pair in d.equivalences)


def show(d: Diagram, v: R) -> Diagram:
    """Make core variable ``v`` visible to the human.

    Adds ``v -> v^H`` and declares ``v^H`` equivalent to ``v``. Directed and
    correlational links into ``v^H`` are dropped; ambiguous links touching it
    are oriented away from it, since a collapsed node can still influence the
    remaining human variables.
    """
    if v not in (R.TASK_LABEL, R.MODEL_PREDICTION):
        raise UnknownVariable(f"show is defined for Y and Ŷ, not {v.name}")
    if not d.has_role(v):
        raise UnknownVariable(v.name)
    human_role = HUMAN_COUNTERPART[v]
    if not d.has_role(human_role):
        raise MissingCounterpart(human_role.name)
    core, human = d.id_of(v), d.id_of(human_role)
    reveal = Edge(core, human, EdgeKind.DIRECTED)

    drop, add = [], [reveal]
    for e in d.edges:
        if not e.touches(human) or e == reveal:
            continue
        if e.kind is EdgeKind.AMBIGUOUS:
            drop.append(e)
            add.append(e.oriented(human))
        elif e.kind is EdgeKind.CORRELATIONAL or e.target == human:
            drop.append(e)
    out = d.with_edges(add=add, remove=drop).with_equivalence(core, human)
    if any(p.kind == "CycleViolation" for p in validate(out)):
        raise CycleIntroduced(f"show({v.name}) orients a link into a cycle")
    return out


def attach_explanation(d: Diagram, mode: Intuition = Intuition.NO_ASSUMPTION) -> Diagram:
    """Add the explanation node ``E`` generated from the model function ``g``.

    ``E`` takes the input of the ``g``-controlled link as its only parent
    (through ``g``), and feeds every human approximation that is not already
    collapsed onto a shown core variable.
    """
    if d.has_role(R.EXPLANATION):
        raise ExplanationAlreadyPresent()
    g_links = [e for e in d.edges if e.controller == "g" and e.kind is not EdgeKind.CORRELATIONAL]
    if not g_links:
        raise InvalidDiagram("no g-controlled link to derive an explanation from")
    sources = {e.source for e in g_links if e.kind is EdgeKind.DIRECTED}
    if len(sources) != 1:
        raise InvalidDiagram("explanation needs a single input feeding g")
    e_id = R.EXPLANATION.default_id
    out = d.with_node(Node(e_id, R.EXPLANATION))
    out = add_edge(out, Edge(sources.pop(), e_id, EdgeKind.DIRECTED, "g"))
    for role, tag in _HUMAN_TAG.items():
        if out.has_role(role) and not _shown(out, out.id_of(role)):
            out = add_edge(out, Edge(e_id, out.id_of(role), EdgeKind.DIRECTED, tag))

    if mode is Intuition.ACTIVATES_ERROR_PRIOR:
        if not (out.has_role(R.INTUITION) and out.has_role(R.MODEL_ERROR)):
            raise InvalidDiagram("activating an error prior needs H and Z")
        h = out.id_of(R.INTUITION)
        out = add_edge(out, Edge(e_id, h))
        out = add_edge(out, Edge(h, out.id_of(R.MODEL_ERROR), EdgeKind.CORRELATIONAL))
    elif mode is Intuition.EXPANDS_INTUITION:
        out = out.with_node(Node(NEXT_INTUITION, R.GENERIC))
        out = add_edge(out, Edge(e_id, NEXT_INTUITION))
        if out.has_role(R.INTUITION):
            out = add_edge(out, Edge(out.id_of(R.INTUITION), NEXT_INTUITION))
    return out


def build(cond: Condition) -> Diagram:
    d = base_diagram()
    if cond.task is Task.EMULATION:
        d = show(d, R.TASK_LABEL)
    if cond.prediction is Prediction.SHOWN:
        d = show(d, R.MODEL_PREDICTION)
    if cond.task is Task.EMULATION and cond.prediction is Prediction.SHOWN:
        # correlation between Y and Ŷ induced by training the model
        d = add_edge(d, Edge(R.TASK_LABEL.default_id, R.MODEL_PREDICTION.default_id,
                             EdgeKind.CORRELATIONAL))
    if cond.explanation is Explanation.SHOWN:
        d = attach_explanation(d, cond.intuition)
    return d


@dataclass(frozen=True)
class Branch:
    diagram: Diagram
    leaves: dict[Prediction, Diagram] = field(default_factory=dict)


@dataclass(frozen=True)
class DecisionTree:
    root: Diagram
    branches: dict[Task, Branch]

    @property
    def leaves(self) -> dict[tuple[Task, Prediction], Diagram]:
        return {(t, p): d for t, b in self.branches.items() for p, d in b.leaves.items()}


def decision_tree() -> DecisionTree:
    root = base_diagram()
    branches = {}
    for task in Task:
        mid = show(root, R.TASK_LABEL) if task is Task.EMULATION else root
        branches[task] = Branch(mid, {p: build(Condition(task, p)) for p in Prediction})
    return DecisionTree(root, branches)


def _fig4a() -> Diagram:
    d = new_diagram([R.INPUT, R.TASK_LABEL, R.MODEL_PREDICTION, R.MODEL_ERROR, R.EXPLANATION])
    return _wire(d, _core_side() + [_d(R.INPUT, R.EXPLANATION, "g")])


def _fig4b1() -> Diagram:
    d = new_diagram([R.INPUT, R.MODEL_PREDICTION, R.HUMAN_MODEL_PREDICTION, R.INTUITION])
    return _wire(d, [
        _d(R.INPUT, R.MODEL_PREDICTION, "g"),
        _d(R.INPUT, R.HUMAN_MODEL_PREDICTION, "g^H"),
        _d(R.INTUITION, R.HUMAN_MODEL_PREDICTION, "g^H"),
    ])


def _fig4b2() -> Diagram:
    d = _fig4b1().with_node(Node(R.EXPLANATION.default_id, R.EXPLANATION))
    return _wire(d, [
        _d(R.INPUT, R.EXPLANATION, "g"),
        _d(R.EXPLANATION, R.HUMAN_MODEL_PREDICTION, "g^H"),
    ])


_SHOWN_EXPLAINED = dict(task=Task.DISCOVERY, prediction=Prediction.SHOWN,
                        explanation=Explanation.SHOWN)

_CATALOG: dict[str, Callable[[], Diagram]] = {
    "fig2": fig2,
    "fig3a": base_diagram,
    "fig3b": lambda: show(base_diagram(), R.TASK_LABEL),
    "fig3c": base_diagram,
    "fig3d": lambda: build(Condition(Task.EMULATION, Prediction.SHOWN)),
    "fig3e": lambda: build(Condition(Task.EMULATION, Prediction.HIDDEN)),
    "fig3f": lambda: build(Condition(Task.DISCOVERY, Prediction.SHOWN)),
    "fig3g": lambda: build(Condition(Task.DISCOVERY, Prediction.HIDDEN)),
    "fig4a": _fig4a,
    "fig4b1": _fig4b1,
    "fig4b2": _fig4b2,
    "fig4c1": lambda: build(Condition(**_SHOWN_EXPLAINED)),
    "fig4c2": lambda: build(Condition(**_SHOWN_EXPLAINED,
                                      intuition=Intuition.ACTIVATES_ERROR_PRIOR)),
    "fig7": lambda: build(Condition(**_SHOWN_EXPLAINED,
                                    intuition=Intuition.EXPANDS_INTUITION)),
}


def catalog_keys() -> list[str]:
    return list(_CATALOG)


def catalog(key: str) -> Diagram:
    try:
        return _CATALOG[key]()
    except KeyError:
        raise UnknownDiagram(key) from None
