"""Structural causal models over realized diagrams.

Every variable is discrete: the input ``X`` is an index into an ``r x r`` grid
over the unit square and every other node is binary. A node's value is a
deterministic function of its parents XOR independent flip noise, so the
joint distribution factorises along the realized diagram and any
d-separation verdict must show up as a conditional independence in samples.

Correlational links are expanded into a latent common parent, exactly as the
separation engine does. Human nodes collapsed onto a shown core variable copy
it without noise, which keeps the data consistent with the merged graph.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import seeding
from .conditions import NEXT_INTUITION
from .dsep import SeparationQuery, VerdictKind, d_separated, _representatives
from .graph import (
    Diagram,
    DiagramError,
    Edge,
    EdgeKind,
    HUMAN_COUNTERPART,
    InvalidDiagram,
    VariableRole as R,
    new_diagram,
)

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

__all__ = [
    "ThresholdRule",
    "WorldSpec",
    "Scm",
    "Sample",
    "Dataset",
    "CiResult",
    "SoundnessEntry",
    "SoundnessReport",
    "UnboundNode",
    "EmptyStratum",
    "instantiate",
    "sample",
    "ci_test",
    "cmi_bits",
    "soundness_check",
    "random_world",
    "load_world",
    "world_to_dict",
    "world_from_dict",
]


class UnboundNode(DiagramError):
    pass


class EmptyStratum(ValueError):
    pass


_HUMAN_ROLES = set(HUMAN_COUNTERPART.values())
_TRIAD = {R.HUMAN_TASK_LABEL, R.HUMAN_MODEL_PREDICTION, R.HUMAN_MODEL_ERROR}
MIN_STRATUM = 5


@dataclass(frozen=True)
class ThresholdRule:
    """``x[feature] > threshold`` (or ``<`` when ``direction`` is ``"<"``)."""

    feature: int = 0
    threshold: float = 0.5
    direction: str = ">"

    def __post_init__(self) -> None:
        if self.feature not in (0, 1):
            raise ValueError("feature must be 0 or 1")
        if self.direction not in (">", "<"):
            raise ValueError("direction must be '>' or '<'")

    def __call__(self, coords: np.ndarray, shift: np.ndarray | float = 0.0) -> np.ndarray:
        x = coords[..., self.feature]
        t = self.threshold + shift
        return (x > t if self.direction == ">" else x < t).astype(np.int8)


@dataclass(frozen=True)
class WorldSpec:
    """Concrete functions and noise levels for the variables of a diagram.

    ``noise`` maps node ids to flip probabilities and overrides
    ``unshown_noise`` for that node. ``generic`` binds nodes with the generic
    role; anything generic and absent from it is unbound.
    """

    resolution: int = 10
    f: ThresholdRule = ThresholdRule(0, 0.5)
    g: ThresholdRule = ThresholdRule(0, 0.6)
    unshown_noise: float = 0.2
    intuition_prior: float = 0.5
    intuition_shift: float = 0.1
    explanation_band: float = 0.2
    coupling: float = 0.5
    noise: Mapping[str, float] = field(default_factory=dict)
    generic: Mapping[str, float] = field(default_factory=lambda: {NEXT_INTUITION: 0.2})

    def __post_init__(self) -> None:
        if self.resolution < 1:
            raise ValueError("resolution must be positive")
        probs = [self.unshown_noise, self.intuition_prior, self.coupling,
                 *self.noise.values(), *self.generic.values()]
        if any(not 0.0 <= p <= 1.0 for p in probs):
            raise ValueError("probabilities must lie in [0, 1]")

    def coords(self) -> np.ndarray:
        """Grid cell centres, one row per input index."""
        r = self.resolution
        idx = np.arange(r * r)
        return np.stack([(idx % r + 0.5) / r, (idx // r + 0.5) / r], axis=1)

    def p_label(self) -> float:
        return float(self.f(self.coords()).mean())


# -- structural rules ------------------------------------------------------


@dataclass(frozen=True)
class Rule:
    """How one node is computed.

    ``kind`` names the deterministic core (``input``, ``threshold``, ``xor``,
    ``copy``, ...); ``extra`` parents enter through ``table``, gated by
    ``coupling``; ``noise`` is the flip probability applied last.
    """

    kind: str
    parents: tuple[str, ...]
    extra: tuple[str, ...] = ()
    table: tuple[int, ...] = ()
    coupling: float = 1.0
    noise: float = 0.0
    params: Mapping[str, object] = field(default_factory=dict)


@dataclass(frozen=True)
class Scm:
    diagram: Diagram
    world: WorldSpec
    order: tuple[str, ...]
    rules: Mapping[str, Rule]
    seed: int

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(v for v in self.order if not _is_latent(v))


def _is_latent(v: str) -> bool:
    return v.startswith("_L")


def _graph(d: Diagram) -> tuple[dict[str, list[str]], list[str]]:
    parents: dict[str, set[str]] = {n.id: set() for n in d.nodes}
    latents = []
    for i, e in enumerate(sorted(d.edges)):
        if e.kind is EdgeKind.DIRECTED:
            parents[e.target].add(e.source)
        elif e.kind is EdgeKind.CORRELATIONAL:
            lat = f"_L{i}[{e.source}~{e.target}]"
            latents.append(lat)
            parents[lat] = set()
            parents[e.source].add(lat)
            parents[e.target].add(lat)
        else:
            raise InvalidDiagram("an SCM needs a realized diagram")
    # Kahn with sorted ties keeps the order reproducible
    order, indeg = [], {v: len(p) for v, p in parents.items()}
    kids: dict[str, set[str]] = {v: set() for v in parents}
    for v, ps in parents.items():
        for p in ps:
            kids[p].add(v)
    ready = sorted(v for v, k in indeg.items() if k == 0)
    while ready:
        v = ready.pop(0)
        order.append(v)
        for c in sorted(kids[v]):
            indeg[c] -= 1
            if indeg[c] == 0:
                ready.append(c)
        ready.sort()
    if len(order) != len(parents):
        raise InvalidDiagram("diagram has a directed cycle")
    return {v: sorted(p) for v, p in parents.items()}, order


def _table(gen: np.random.Generator, k: int) -> tuple[int, ...]:
    if k == 0:
        return ()
    while True:
        t = gen.integers(0, 2, size=2 ** k)
        if 0 < t.sum() < t.size:
            return tuple(int(b) for b in t)


def instantiate(d: Diagram, w: WorldSpec = WorldSpec(), seed: int = 0) -> Scm:
    """Bind a structural rule to every node of a realized diagram."""
    parents, order = _graph(d)
    role = {n.id: n.role for n in d.nodes}
    by_role = {n.role: n.id for n in d.nodes}
    core_of = {h: c for c, h in HUMAN_COUNTERPART.items()}
    shown = {x for pair in d.equivalences for x in pair}
    rules: dict[str, Rule] = {}

    def noise_of(v: str) -> float:
        return float(w.noise.get(v, w.unshown_noise))

    for v in order:
        ps = tuple(parents[v])
        gen = seeding.rng(seed, f"table/{v}")
        if _is_latent(v):
            rules[v] = Rule("coin", ps, params={"p": 0.5})
            continue
        rl = role[v]
        x = by_role.get(R.INPUT)
        has_x = x in ps

        def with_extra(kind: str, base: tuple[str, ...], coupling: float,
                       noise: float, **params) -> Rule:
            extra = tuple(p for p in ps if p not in base)
            return Rule(kind, base, extra, _table(gen, len(extra)), coupling, noise, params)

        if rl is R.INPUT:
            y = by_role.get(R.TASK_LABEL)
            if set(ps) - {y}:
                raise UnboundNode(f"{v}: input can only depend on the task label")
            rules[v] = Rule("input_given_label" if ps else "input", ps)
        elif rl is R.TASK_LABEL:
            if has_x:
                rules[v] = with_extra("threshold", (x,), w.coupling, 0.0, fn="f")
            else:
                rules[v] = with_extra("coin", (), w.coupling, 0.0, p=w.p_label())
        elif rl is R.MODEL_PREDICTION:
            if has_x:
                rules[v] = with_extra("threshold", (x,), w.coupling, 0.0, fn="g")
            else:
                rules[v] = with_extra("coin", (), w.coupling, 0.0, p=0.5)
        elif rl is R.MODEL_ERROR:
            y, yh = by_role.get(R.TASK_LABEL), by_role.get(R.MODEL_PREDICTION)
            if y not in ps or yh not in ps:
                raise UnboundNode(f"{v}: the error indicator needs Y and Ŷ as parents")
            rules[v] = Rule("xor", (y, yh))
        elif rl is R.EXPLANATION:
            if has_x:
                rules[v] = with_extra("band", (x,), 1.0, 0.0)
            else:
                rules[v] = with_extra("coin", (), 1.0, 0.0, p=0.5)
        elif rl is R.INTUITION:
            if ps:
                rules[v] = with_extra("none", (), 1.0, noise_of(v))
            else:
                rules[v] = Rule("coin", (), params={"p": w.intuition_prior})
        elif rl in _HUMAN_ROLES:
            core = by_role.get(core_of[rl])
            others = [by_role[r] for r in _TRIAD - {rl} if r in by_role]
            if v in shown and core in ps:
                rules[v] = Rule("copy", (core,))
            elif len(others) == 2 and all(o in ps for o in others):
                both_shown = all(o in shown for o in others)
                rules[v] = Rule("xor", tuple(sorted(others)), noise=0.0 if both_shown else noise_of(v))
            elif has_x:
                h = by_role.get(R.INTUITION)
                base = (x, h) if h in ps else (x,)
                fn = {R.HUMAN_TASK_LABEL: "f", R.HUMAN_MODEL_PREDICTION: "g",
                      R.HUMAN_MODEL_ERROR: "z"}[rl]
                rules[v] = with_extra("threshold", base, w.coupling, noise_of(v), fn=fn)
            elif ps:
                rules[v] = with_extra("none", (), 1.0, noise_of(v))
            else:
                rules[v] = Rule("coin", (), params={"p": 0.5})
        else:
            if v not in w.generic:
                raise UnboundNode(v)
            if ps:
                rules[v] = with_extra("none", (), 1.0, float(w.generic[v]))
            else:
                rules[v] = Rule("coin", (), params={"p": 0.5})
    return Scm(d, w, tuple(order), rules, seed)


# -- sampling ------------------------------------------------------------


@dataclass(frozen=True)
class Sample:
    values: Mapping[str, int]

    def __getitem__(self, node: str) -> int:
        return self.values[node]


@dataclass(frozen=True)
class Dataset:
    """Column store of samples, one integer array per observed node."""

    columns: Mapping[str, np.ndarray]

    def __len__(self) -> int:
        return len(next(iter(self.columns.values())))

    def __getitem__(self, node: str) -> np.ndarray:
        return self.columns[node]

    @property
    def names(self) -> list[str]:
        return list(self.columns)

    def row(self, i: int) -> Sample:
        return Sample({k: int(v[i]) for k, v in self.columns.items()})

    def rows(self) -> list[Sample]:
        return [self.row(i) for i in range(len(self))]

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(self.names)
            out.writerows(zip(*(self.columns[k].tolist() for k in self.names)))

    @classmethod
    def from_csv(cls, path: str | Path) -> "Dataset":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        header, body = rows[0], np.array(rows[1:], dtype=np.int64).reshape(-1, len(rows[0]))
        return cls({h: body[:, i] for i, h in enumerate(header)})


def _bits_index(cols: Sequence[np.ndarray]) -> np.ndarray:
    idx = np.zeros(len(cols[0]), dtype=np.int64)
    for i, c in enumerate(cols):
        idx |= c.astype(np.int64) << i
    return idx


def sample(s: Scm, n: int, seed: int = 0, keep_latents: bool = False) -> Dataset:
    """Draw ``n`` i.i.d. samples; every node has its own derived noise stream."""
    if n < 1:
        raise ValueError("n must be at least 1")
    w = s.world
    coords = w.coords()
    fns = {"f": w.f, "g": w.g}
    vals: dict[str, np.ndarray] = {}
    for v in s.order:
        rule = s.rules[v]
        gen = seeding.rng(seed, f"sample/{v}")
        if rule.kind == "input":
            out = gen.integers(0, coords.shape[0], size=n)
        elif rule.kind == "input_given_label":
            y = vals[rule.parents[0]]
            labels = w.f(coords)
            out = np.empty(n, dtype=np.int64)
            for lab in (0, 1):
                cells = np.flatnonzero(labels == lab)
                mask = y == lab
                if mask.any() and cells.size == 0:
                    raise UnboundNode(f"{v}: no input has label {lab}")
                out[mask] = cells[gen.integers(0, max(cells.size, 1), size=int(mask.sum()))]
        elif rule.kind == "coin":
            out = (gen.random(n) < rule.params["p"]).astype(np.int8)
        elif rule.kind == "none":
            out = np.zeros(n, dtype=np.int8)
        elif rule.kind in ("xor", "copy"):
            out = np.zeros(n, dtype=np.int8)
            for p in rule.parents:
                out ^= vals[p].astype(np.int8)
        elif rule.kind == "band":
            x = coords[vals[rule.parents[0]]]
            out = (np.abs(x[:, w.g.feature] - w.g.threshold) < w.explanation_band).astype(np.int8)
        elif rule.kind == "threshold":
            x = coords[vals[rule.parents[0]]]
            shift = 0.0
            if len(rule.parents) > 1:
                shift = np.where(vals[rule.parents[1]] == 1, w.intuition_shift, -w.intuition_shift)
            fn = rule.params["fn"]
            if fn == "z":
                out = w.f(x, shift) ^ w.g(x, shift)
            else:
                out = fns[fn](x, shift)
        else:  # pragma: no cover
            raise AssertionError(rule.kind)
        if rule.extra:
            t = np.asarray(rule.table, dtype=np.int8)[_bits_index([vals[p] for p in rule.extra])]
            gate = (gen.random(n) < rule.coupling).astype(np.int8)
            out = out ^ (t & gate)
        if rule.noise > 0:
            out = out ^ (gen.random(n) < rule.noise).astype(np.int8)
        vals[v] = out
    cols = {v: vals[v].astype(np.int64) for v in s.order if keep_latents or not _is_latent(v)}
    return Dataset(cols)


# -- conditional independence --------------------------------------------


@dataclass(frozen=True)
class CiResult:
    statistic: float
    p: float
    alpha: float
    permutations: int

    @property
    def dependent(self) -> bool:
        return self.p < self.alpha

    @property
    def independent(self) -> bool:
        return not self.dependent


def _codes(data: Dataset, names: str | Iterable[str]) -> tuple[np.ndarray, int]:
    names = [names] if isinstance(names, str) else sorted(names)
    if not names:
        return np.zeros(len(data), dtype=np.int64), 1
    code = np.zeros(len(data), dtype=np.int64)
    for v in names:
        col = np.asarray(data[v], dtype=np.int64)
        code = code * (int(col.max()) + 1) + col
    _, inv = np.unique(code, return_inverse=True)
    return inv.reshape(-1), int(inv.max()) + 1


def _cmi_from_counts(counts: np.ndarray) -> np.ndarray:
    """Plug-in CMI in bits of ``counts[..., s, a, b]`` (leading axes batched)."""
    counts = counts.astype(np.float64)
    total = counts.sum(axis=(-3, -2, -1), keepdims=True)
    n_s = counts.sum(axis=(-2, -1), keepdims=True)
    n_sa = counts.sum(axis=-1, keepdims=True)
    n_sb = counts.sum(axis=-2, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        term = counts * np.log2(counts * n_s / (n_sa * n_sb))
    term = np.where(counts > 0, term, 0.0)
    return np.maximum(term.sum(axis=(-3, -2, -1)) / total[..., 0, 0, 0], 0.0)


def cmi_bits(data: Dataset, a: str | Iterable[str], b: str | Iterable[str],
             given: str | Iterable[str] = ()) -> float:
    ca, ka = _codes(data, a)
    cb, kb = _codes(data, b)
    cs, ks = _codes(data, given)
    counts = np.zeros((ks, ka, kb), dtype=np.int64)
    np.add.at(counts, (cs, ca, cb), 1)
    return float(_cmi_from_counts(counts))


def _null_tables(counts: np.ndarray, reps: int, gen: np.random.Generator) -> np.ndarray:
    """Contingency tables of ``reps`` within-stratum permutations of ``b``.

    Permuting ``b`` inside a stratum keeps both margins and makes the table a
    multivariate hypergeometric draw row by row, so it is sampled directly.
    """
    ks, ka, kb = counts.shape
    rows = counts.sum(axis=2)
    cols_left = np.broadcast_to(counts.sum(axis=1), (reps, ks, kb)).copy()
    out = np.zeros((reps, ks, ka, kb), dtype=np.int64)
    for i in range(ka - 1):
        need = np.broadcast_to(rows[:, i], (reps, ks)).copy()
        for j in range(kb - 1):
            rest = cols_left[..., j + 1:].sum(axis=-1)
            draw = gen.hypergeometric(cols_left[..., j], rest, need)
            out[:, :, i, j] = draw
            need -= draw
            cols_left[..., j] -= draw
        out[:, :, i, kb - 1] = need
        cols_left[..., kb - 1] -= need
    out[:, :, ka - 1, :] = cols_left
    return out


def ci_test(data: Dataset, a: Iterable[str] | str, b: Iterable[str] | str,
            given: Iterable[str] | str = (), alpha: float = 0.01,
            permutations: int = 1000, seed: int = 0,
            stop_above: float | None = None) -> CiResult:
    """Stratified permutation test of conditional mutual information.

    ``stop_above`` enables sequential early stopping: once the p-value can no
    longer drop below it, the remaining permutations are skipped. The
    decision at any level ``alpha <= stop_above`` equals the full run's.
    """
    a, b, given = ([x] if isinstance(x, str) else list(x) for x in (a, b, given))
    if permutations < 200:
        raise ValueError("at least 200 permutations are required")
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    ca, ka = _codes(data, a)
    cb, kb = _codes(data, b)
    cs, ks = _codes(data, given)
    sizes = np.bincount(cs, minlength=ks)
    if sizes.min() < MIN_STRATUM:
        raise EmptyStratum(f"a configuration of {sorted(given)} has {sizes.min()} samples")
    counts = np.zeros((ks, ka, kb), dtype=np.int64)
    np.add.at(counts, (cs, ca, cb), 1)
    stat = float(_cmi_from_counts(counts))
    if stat <= 1e-12:
        return CiResult(0.0, 1.0, alpha, 0)

    gen = np.random.default_rng(seed)
    cap = max(1, int(2e7 // max(counts.size, 1)))
    chunk = 200 if stop_above is not None else permutations
    done = exceed = 0
    while done < permutations:
        reps = min(chunk, cap, permutations - done)
        chunk *= 2
        null = _cmi_from_counts(_null_tables(counts, reps, gen))
        exceed += int((null >= stat - 1e-12).sum())
        done += reps
        if stop_above is not None and (1 + exceed) / (1 + permutations) >= stop_above:
            break
    return CiResult(stat, (1 + exceed) / (1 + done), alpha, done)


# -- soundness -------------------------------------------------------------


@dataclass(frozen=True)
class SoundnessEntry:
    world: str
    query: SeparationQuery
    verdict: VerdictKind
    result: CiResult | None
    asserted: bool

    @property
    def failed(self) -> bool:
        return self.asserted and self.result is not None and self.result.dependent


@dataclass(frozen=True)
class SoundnessReport:
    entries: tuple[SoundnessEntry, ...]
    alpha: float

    @property
    def failures(self) -> list[SoundnessEntry]:
        return [e for e in self.entries if e.failed]

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def extra_independencies(self) -> list[SoundnessEntry]:
        """Connected verdicts that tested independent (faithfulness gaps)."""
        return [e for e in self.entries
                if e.verdict is VerdictKind.CONNECTED and e.result is not None and e.result.independent]

    def __add__(self, other: "SoundnessReport") -> "SoundnessReport":
        return SoundnessReport(self.entries + other.entries, min(self.alpha, other.alpha))


def _query_ok(d: Diagram, q: SeparationQuery) -> bool:
    rep = _representatives(d)
    a, b, g = ({rep[x] for x in s} for s in (q.a, q.b, q.given))
    return not (a & b or a & g or b & g)


def default_queries(d: Diagram, max_given: int = 1) -> list[SeparationQuery]:
    names = sorted(d.ids)
    out = []
    for a, b in itertools.combinations(names, 2):
        rest = [n for n in names if n not in (a, b)]
        for k in range(max_given + 1):
            for g in itertools.combinations(rest, k):
                q = SeparationQuery.of(a, b, g)
                if _query_ok(d, q):
                    out.append(q)
    return out


def soundness_check(d: Diagram, w: WorldSpec, queries: Sequence[SeparationQuery] | None = None,
                    n: int = 50_000, seed: int = 0, alpha: float = 0.01,
                    permutations: int | None = None, name: str = "world",
                    test_connected: bool = False) -> SoundnessReport:
    """Check separated ⇒ independent on data sampled from ``d``.

    Separated queries are tested at ``alpha`` Bonferroni-corrected over their
    number, with enough permutations for a rejection to be reachable.
    Connected verdicts are only tested when ``test_connected`` is set and are
    never counted as failures.
    """
    if not d.is_realized:
        raise InvalidDiagram("soundness is checked on realized diagrams")
    queries = list(default_queries(d) if queries is None else queries)
    verdicts = [d_separated(d, q).kind for q in queries]
    m = max(1, sum(v is VerdictKind.SEPARATED for v in verdicts))
    level = alpha / m
    perms = permutations or max(1000, math.ceil(2 / level))
    data = sample(instantiate(d, w, seed), n, seed)
    entries = []
    for i, (q, v) in enumerate(zip(queries, verdicts)):
        result = None
        if v is VerdictKind.SEPARATED or test_connected:
            ctx = {t for t in q.given if t not in data.columns}
            result = ci_test(data, q.a, q.b, q.given - ctx, level, perms,
                             seed=int(seeding.derive_seed(seed, f"ci/{name}", i).generate_state(1)[0]),
                             stop_above=level)
        entries.append(SoundnessEntry(name, q, v, result, v is VerdictKind.SEPARATED))
    return SoundnessReport(tuple(entries), alpha)


def random_world(seed: int, n_nodes: int = 5, edge_prob: float = 0.4,
                 noise: float = 0.2) -> tuple[Diagram, WorldSpec]:
    """A random DAG of generic binary nodes with a matching world spec."""
    gen = seeding.rng(seed, "random-world")
    names = [f"V{i}" for i in range(n_nodes)]
    d = new_diagram(names)
    edges = [Edge(names[i], names[j]) for i, j in itertools.combinations(range(n_nodes), 2)
             if gen.random() < edge_prob]
    d = d.with_edges(add=edges)
    return d, WorldSpec(generic={v: noise for v in names})


# -- config ----------------------------------------------------------------


def world_to_dict(w: WorldSpec) -> dict:
    rule = lambda r: {"feature": r.feature, "threshold": r.threshold, "direction": r.direction}
    return {
        "resolution": w.resolution, "f": rule(w.f), "g": rule(w.g),
        "unshown_noise": w.unshown_noise, "intuition_prior": w.intuition_prior,
        "intuition_shift": w.intuition_shift, "explanation_band": w.explanation_band,
        "coupling": w.coupling, "noise": dict(w.noise), "generic": dict(w.generic),
    }


def world_from_dict(doc: Mapping) -> WorldSpec:
    doc = dict(doc.get("world", doc))
    doc.pop("seed", None)
    known = set(world_to_dict(WorldSpec()))
    unknown = set(doc) - known
    if unknown:
        raise ValueError(f"unknown world keys: {sorted(unknown)}")
    for key in ("f", "g"):
        if key in doc:
            doc[key] = ThresholdRule(**doc[key])
    return WorldSpec(**doc)


def load_world(path: str | Path) -> tuple[WorldSpec, int | None]:
    """Read a world spec (and optional seed) from TOML or JSON."""
    path = Path(path)
    raw = path.read_bytes()
    doc = tomllib.loads(raw.decode()) if path.suffix == ".toml" else json.loads(raw)
    seed = doc.get("seed", doc.get("world", {}).get("seed"))
    return world_from_dict(doc), seed
