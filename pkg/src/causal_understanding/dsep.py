"""d-separation over diagrams with controllers, equivalences and dashed links.

Before any path reasoning a diagram is normalised:

* nodes declared equivalent are merged into one node (the core variable
  keeps its id),
* every correlational link ``A <-> B`` becomes ``A <- L -> B`` with a fresh
  latent ``L``,
* controller tags named in a conditioning set are treated as fixed context
  and have no graph effect.

On a diagram that still has ambiguous links every realization is evaluated;
the verdict is the common answer, or ``AMBIGUOUS`` with the per-realization
map when they disagree.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .graph import (
    CONTROLLERS,
    Diagram,
    EdgeKind,
    InvalidDiagram,
    UnknownNode,
    VariableRole,
    HUMAN_COUNTERPART,
    find_cycle,
    realization_label,
    realizations,
    validate,
)

__all__ = [
    "VerdictKind",
    "Verdict",
    "SeparationQuery",
    "OverlappingSets",
    "TooLarge",
    "ALIASES",
    "d_separated",
    "brute_force_separated",
    "Claim",
    "ClaimResult",
    "claim_suite",
    "run_claims",
    "all_queries",
    "ambiguous_queries",
]


class OverlappingSets(ValueError):
    pass


class TooLarge(ValueError):
    pass


# accepted spellings for the built-in node ids
ALIASES = {
    "Ŷ": "Yhat", "Y^H": "YH", "Ŷ^H": "YhatH", "Yhat^H": "YhatH", "Z^H": "ZH",
}


class VerdictKind(enum.Enum):
    SEPARATED = "separated"
    CONNECTED = "connected"
    AMBIGUOUS = "ambiguous"


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    realizations: Mapping[str, VerdictKind] | None = None
    context: tuple[str, ...] = ()

    @property
    def separated(self) -> bool:
        return self.kind is VerdictKind.SEPARATED

    def to_dict(self) -> dict:
        out: dict = {"verdict": self.kind.value}
        if self.realizations is not None:
            out["realizations"] = {k: v.value for k, v in sorted(self.realizations.items())}
        if self.context:
            out["context"] = list(self.context)
        return out


SEPARATED = Verdict(VerdictKind.SEPARATED)
CONNECTED = Verdict(VerdictKind.CONNECTED)


@dataclass(frozen=True)
class SeparationQuery:
    a: frozenset[str]
    b: frozenset[str]
    given: frozenset[str] = frozenset()

    @classmethod
    def of(cls, a: Iterable[str] | str, b: Iterable[str] | str,
           given: Iterable[str] | str = ()) -> "SeparationQuery":
        def norm(x):
            return frozenset([x] if isinstance(x, str) else x)
        return cls(norm(a), norm(b), norm(given))

    def swapped(self) -> "SeparationQuery":
        return SeparationQuery(self.b, self.a, self.given)

    def __str__(self) -> str:
        g = ",".join(sorted(self.given))
        return f"{','.join(sorted(self.a))} _||_ {','.join(sorted(self.b))} | {{{g}}}"


# -- normalisation ---------------------------------------------------------


@dataclass
class _Dag:
    parents: dict[str, set[str]]
    children: dict[str, set[str]]

    @property
    def nodes(self) -> set[str]:
        return set(self.parents)


def _representatives(d: Diagram) -> dict[str, str]:
    rep = {n.id: n.id for n in d.nodes}

    def find(x: str) -> str:
        while rep[x] != x:
            x = rep[x]
        return x

    core_roles = set(HUMAN_COUNTERPART)
    for pair in sorted(d.equivalences, key=sorted):
        a, b = (find(x) for x in sorted(pair))
        if a == b:
            continue
        # the core variable names the merged node
        if d.node(b).role in core_roles and d.node(a).role not in core_roles:
            a, b = b, a
        rep[b] = a
    return {x: find(x) for x in rep}


def _to_dag(d: Diagram, rep: Mapping[str, str]) -> _Dag:
    parents: dict[str, set[str]] = {v: set() for v in set(rep.values())}
    children: dict[str, set[str]] = {v: set() for v in parents}

    def link(u: str, v: str) -> None:
        parents[v].add(u)
        children[u].add(v)

    for i, e in enumerate(sorted(d.edges)):
        u, v = rep[e.source], rep[e.target]
        if u == v:
            continue
        if e.kind is EdgeKind.DIRECTED:
            link(u, v)
        elif e.kind is EdgeKind.CORRELATIONAL:
            latent = f"_L{i}[{u}~{v}]"
            parents[latent], children[latent] = set(), set()
            link(latent, u)
            link(latent, v)
        else:
            raise InvalidDiagram("diagram is not realized")
    return _Dag(parents, children)


def _resolve(d: Diagram, q: SeparationQuery, rep: Mapping[str, str]):
    ids = d.ids
    tags = set(CONTROLLERS) | {e.controller for e in d.edges if e.controller}

    def lookup(name: str) -> str:
        name = ALIASES.get(name, name)
        if name not in ids:
            raise UnknownNode(name)
        return rep[name]

    context = tuple(sorted(n for n in q.given if ALIASES.get(n, n) not in ids and n in tags))
    a = {lookup(n) for n in q.a}
    b = {lookup(n) for n in q.b}
    given = {lookup(n) for n in q.given if n not in context}
    if not a or not b:
        raise ValueError("both sides of a separation query must be non-empty")
    if a & b or a & given or b & given:
        raise OverlappingSets(str(q))
    return a, b, given, context


# -- algorithms ------------------------------------------------------------


def _ancestors(dag: _Dag, nodes: Iterable[str]) -> set[str]:
    out, stack = set(), list(nodes)
    while stack:
        v = stack.pop()
        if v not in out:
            out.add(v)
            stack.extend(dag.parents[v])
    return out


def _reachable_separated(dag: _Dag, a: set[str], b: set[str], given: set[str]) -> bool:
    """Linear-time reachability with collider handling (the Bayes-ball walk)."""
    anc = _ancestors(dag, given)
    up, down = "up", "down"
    frontier = [(x, up) for x in a]
    seen: set[tuple[str, str]] = set()
    while frontier:
        v, came = frontier.pop()
        if (v, came) in seen:
            continue
        seen.add((v, came))
        if v in b and v not in given:
            return False
        if came == up and v not in given:
            frontier += [(p, up) for p in dag.parents[v]]
            frontier += [(c, down) for c in dag.children[v]]
        elif came == down:
            if v not in given:
                frontier += [(c, down) for c in dag.children[v]]
            if v in anc:
                frontier += [(p, up) for p in dag.parents[v]]
    return True


def _descendants(dag: _Dag) -> dict[str, set[str]]:
    out: dict[str, set[str]] = {}
    for v in dag.nodes:
        seen, stack = set(), [v]
        while stack:
            u = stack.pop()
            for c in dag.children[u]:
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        out[v] = seen
    return out


def _path_open(dag: _Dag, path: list[str], given: set[str], desc: dict[str, set[str]]) -> bool:
    for prev, v, nxt in zip(path, path[1:], path[2:]):
        collider = prev in dag.parents[v] and nxt in dag.parents[v]
        if collider:
            if v not in given and not (desc[v] & given):
                return False
        elif v in given:
            return False
    return True


def _brute_separated(dag: _Dag, a: set[str], b: set[str], given: set[str]) -> bool:
    """Enumerate every simple path of the skeleton and test it literally."""
    nbrs = {v: dag.parents[v] | dag.children[v] for v in dag.nodes}
    desc = _descendants(dag)
    for start in sorted(a):
        stack = [[start]]
        while stack:
            path = stack.pop()
            end = path[-1]
            if end in b and len(path) > 1 and _path_open(dag, path, given, desc):
                return False
            if end in b and len(path) > 1:
                continue
            for n in sorted(nbrs[end]):
                if n not in path:
                    stack.append(path + [n])
    return True


def _verdict(d: Diagram, q: SeparationQuery,
             test: Callable[[_Dag, set[str], set[str], set[str]], bool]) -> Verdict:
    problems = [p for p in validate(d)]
    if problems:
        raise InvalidDiagram("; ".join(f"{p.kind}: {p.detail}" for p in problems))
    rep = _representatives(d)
    a, b, given, context = _resolve(d, q, rep)

    def one(realized: Diagram) -> VerdictKind:
        dag = _to_dag(realized, rep)
        if find_cycle_in(dag):
            raise InvalidDiagram("merging equivalent nodes created a directed cycle")
        sep = test(dag, a, b, given)
        return VerdictKind.SEPARATED if sep else VerdictKind.CONNECTED

    if d.is_realized:
        return Verdict(one(d), None, context)
    per = {realization_label(d, r): one(r) for r in realizations(d)}
    kinds = set(per.values())
    if len(kinds) == 1:
        return Verdict(kinds.pop(), None, context)
    return Verdict(VerdictKind.AMBIGUOUS, per, context)


def find_cycle_in(dag: _Dag) -> bool:
    from .graph import Edge
    return find_cycle(Edge(p, c) for c, ps in dag.parents.items() for p in ps) is not None


def d_separated(d: Diagram, q: SeparationQuery) -> Verdict:
    return _verdict(d, q, _reachable_separated)


def brute_force_separated(d: Diagram, q: SeparationQuery, max_nodes: int = 16) -> Verdict:
    """Path-enumeration oracle; only for realized diagrams of modest size."""
    if not d.is_realized:
        raise InvalidDiagram("brute force oracle needs a realized diagram")
    if len(d.nodes) > max_nodes:
        raise TooLarge(f"{len(d.nodes)} nodes > {max_nodes}")
    return _verdict(d, q, _brute_separated)


# -- claims ---------------------------------------------------------------


@dataclass(frozen=True)
class Claim:
    key: str
    query: SeparationQuery
    expected: VerdictKind
    statement: str


@dataclass(frozen=True)
class ClaimResult:
    claim: Claim
    verdict: Verdict
    oracle: tuple[VerdictKind, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return self.verdict.kind is self.claim.expected


_Q = SeparationQuery.of
_S, _C = VerdictKind.SEPARATED, VerdictKind.CONNECTED


def claim_suite() -> list[Claim]:
    core = ["Y", "Yhat", "Z"]
    human = ["YH", "YhatH", "ZH"]
    return [
        Claim("fig2", _Q("Yhat", "Y", ["X", "g"]), _S,
              "the model prediction carries no information about the true label "
              "once the input and the model are fixed"),
        Claim("fig2", _Q("Y", "Yhat", ["X", "Z"]), _C,
              "the error indicator is a collider between true label and prediction"),
        Claim("fig2", _Q(human, core, ["X"]), _S,
              "without assumptions on intuitions, human approximations are "
              "independent of the core variables given the input"),
        Claim("fig4b1", _Q("Yhat", "YhatH", ["X"]), _S,
              "without explanations the human guess of the prediction is "
              "independent of the prediction given the input"),
        Claim("fig4c1", _Q("E", ["Y", "Z"], ["X", "g"]), _S,
              "an explanation derived from the model adds nothing about the true "
              "label or the model error beyond the input and the model"),
        Claim("fig4c1", _Q("ZH", "Z", ["X", "Yhat", "g"]), _S,
              "with no intuition assumption, the human error estimate is independent "
              "of the actual error given input and shown prediction"),
        Claim("fig4c2", _Q("ZH", "Z", ["X", "Yhat", "g"]), _C,
              "an intuition activated by the explanation and correlated with the "
              "error links the human error estimate to the actual error"),
        Claim("fig3f", _Q("YH", "Yhat", ["X", "H"]), _C,
              "in discovery with the prediction shown, the decision can depend on "
              "the shown prediction beyond input and intuition"),
        Claim("fig3g", _Q("YH", "YhatH", ["X", "H", "ZH"]), _C,
              "the base diagram rules out no link among the local human variables"),
        Claim("fig3d", _Q("ZH", "X", ["Y", "Yhat", "H"]), _C,
              "emulation with the prediction shown keeps the human error estimate "
              "wired to the input through its own function"),
    ]


def run_claims(diagrams: Mapping[str, Diagram] | None = None,
               with_oracle: bool = False) -> list[ClaimResult]:
    """Evaluate every claim; ``diagrams`` overrides catalog entries by key."""
    from .conditions import catalog

    overrides = dict(diagrams or {})
    results = []
    for claim in claim_suite():
        d = overrides.get(claim.key) or catalog(claim.key)
        verdict = d_separated(d, claim.query)
        oracle: tuple[VerdictKind, ...] = ()
        if with_oracle:
            rs = [d] if d.is_realized else sorted(realizations(d), key=lambda r: sorted(r.edges))
            oracle = tuple(brute_force_separated(r, claim.query).kind for r in rs)
        results.append(ClaimResult(claim, verdict, oracle))
    return results


def all_queries(d: Diagram, max_given: int | None = None) -> Iterable[SeparationQuery]:
    """Every single-node pair with every conditioning set over the merged nodes."""
    rep = _representatives(d)
    names = sorted({rep[n.id] for n in d.nodes})
    for a, b in itertools.combinations(names, 2):
        rest = [n for n in names if n not in (a, b)]
        top = len(rest) if max_given is None else min(max_given, len(rest))
        for k in range(top + 1):
            for given in itertools.combinations(rest, k):
                yield SeparationQuery.of(a, b, given)


def ambiguous_queries(d: Diagram) -> list[SeparationQuery]:
    """Exhaustively list the single-pair queries whose realizations disagree."""
    return [q for q in all_queries(d) if d_separated(d, q).kind is VerdictKind.AMBIGUOUS]
