"""Between-arm agreement study with simulated participants.

Two arms see the same sixteen instances: the regular arm with named features,
the anonymized arm with encoded ones. Each participant is assigned one of two
age-balanced data groups and sees its eight instances (one per letter A-H)
in random order. Agreement is tabulated per identifier letter and compared
with t-tests.
"""

from __future__ import annotations

import csv
import enum
import hashlib
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from scipy import stats

from . import seeding
from .agents import (
    AgentProfile,
    Feature,
    Instance,
    Label,
    agree_probability,
    anonymize,
    decide,
    holds_assumed_intuitions,
)

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

__all__ = [
    "LETTERS",
    "HYPOTHESES",
    "builtin_instances",
    "PopulationEntry",
    "StudyConfig",
    "TrialRecord",
    "TestResult",
    "StudyResult",
    "DegenerateVariance",
    "UnsupportedFormat",
    "ConfigError",
    "t_independent",
    "t_paired",
    "run_study",
    "expected_agreement",
    "verdict_of",
    "expectations_met",
    "report",
    "load_config",
    "config_hash",
]

LETTERS = "ABCDEFGH"
REGULAR, ANONYMIZED = "regular", "anonymized"
# each hypothesis compares the AB pair against another pair of letters
HYPOTHESES = {"H2a": "CD", "H2b": "EF", "H2c": "GH"}
VERDICTS = ("supported", "direction", "not_supported", "reversed")


class DegenerateVariance(ValueError):
    pass


class UnsupportedFormat(ValueError):
    pass


class ConfigError(ValueError):
    pass


_TABLE = [
    ("Masters", 25, 0.85, 0.13, ">", "Education", "A1"),
    ("Masters", 24, 0.85, 0.10, ">", "Education", "A2"),
    ("Middle school", 46, 0.15, 0.83, "<", "Education", "B1"),
    ("Middle school", 49, 0.15, 0.93, "<", "Education", "B2"),
    ("Masters", 26, 0.85, 0.17, "<", "Age", "C1"),
    ("Masters", 23, 0.85, 0.07, "<", "Age", "C2"),
    ("Middle school", 48, 0.15, 0.90, ">", "Age", "D1"),
    ("Middle school", 47, 0.15, 0.87, ">", "Age", "D2"),
    ("Masters", 23, 0.85, 0.07, "<", "Education", "E1"),
    ("Masters", 26, 0.85, 0.17, "<", "Education", "E2"),
    ("Middle school", 47, 0.15, 0.87, ">", "Education", "F1"),
    ("Middle school", 48, 0.15, 0.90, ">", "Education", "F2"),
    ("Masters", 24, 0.85, 0.10, ">", "Age", "G1"),
    ("Masters", 25, 0.85, 0.13, ">", "Age", "G2"),
    ("Middle school", 49, 0.15, 0.93, "<", "Age", "H1"),
    ("Middle school", 46, 0.15, 0.83, "<", "Age", "H2"),
]


def builtin_instances() -> list[Instance]:
    """The sixteen study instances, in table order."""
    return [
        Instance(edu, age, fa, fb, Label(p + "50K"), Feature(expl), ident)
        for edu, age, fa, fb, p, expl, ident in _TABLE
    ]


# -- statistics ------------------------------------------------------------


@dataclass(frozen=True)
class TestResult:
    statistic: float
    df: float
    p: float
    kind: str

    __test__ = False  # not a pytest class

    def to_dict(self) -> dict:
        return {"statistic": self.statistic, "df": self.df, "p": self.p, "kind": self.kind}


def _finish(diff: float, se: float, df: float, kind: str, on_degenerate: str) -> TestResult:
    if se == 0.0 or not np.isfinite(se):
        if on_degenerate == "raise":
            raise DegenerateVariance("zero variance in both samples")
        warnings.warn("degenerate variance; reporting a conventional value", RuntimeWarning)
        if diff == 0.0:
            return TestResult(0.0, df, 1.0, kind)
        return TestResult(math.copysign(math.inf, diff), df, 0.0, kind)
    t = diff / se
    p = float(2.0 * stats.t.sf(abs(t), df))
    return TestResult(float(t), float(df), min(max(p, 0.0), 1.0), kind)


def _check(x: Sequence[float], y: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.ndim != 1 or y.ndim != 1 or len(x) < 2 or len(y) < 2:
        raise ValueError("each sample needs at least two values")
    return x, y


def t_independent(x: Sequence[float], y: Sequence[float], welch: bool = False,
                  on_degenerate: str = "raise") -> TestResult:
    """Two-sample t-test, pooled variance unless ``welch``; two-sided p."""
    x, y = _check(x, y)
    n1, n2 = len(x), len(y)
    v1, v2 = x.var(ddof=1), y.var(ddof=1)
    diff = float(x.mean() - y.mean())
    if welch:
        a, b = v1 / n1, v2 / n2
        se = math.sqrt(a + b)
        df = (a + b) ** 2 / (a * a / (n1 - 1) + b * b / (n2 - 1)) if a + b > 0 else n1 + n2 - 2
        return _finish(diff, se, df, "independent-welch", on_degenerate)
    pooled = ((n1 - 1) * v1 + (n2 - 1) * v2) / (n1 + n2 - 2)
    se = math.sqrt(pooled * (1.0 / n1 + 1.0 / n2))
    return _finish(diff, se, n1 + n2 - 2, "independent", on_degenerate)


def t_paired(x: Sequence[float], y: Sequence[float], on_degenerate: str = "raise") -> TestResult:
    x, y = _check(x, y)
    if len(x) != len(y):
        raise ValueError("paired samples must have equal length")
    d = x - y
    se = math.sqrt(d.var(ddof=1) / len(d))
    return _finish(float(d.mean()), se, len(d) - 1, "paired", on_degenerate)


# -- configuration -----------------------------------------------------------


@dataclass(frozen=True)
class PopulationEntry:
    weight: float
    profile: AgentProfile

    def to_dict(self) -> dict:
        return {"weight": self.weight, **self.profile.to_dict()}

    @classmethod
    def from_dict(cls, doc: Mapping) -> "PopulationEntry":
        doc = dict(doc)
        weight = float(doc.pop("weight", 1.0))
        for key in ("relevance", "mechanism"):
            if key in doc and not doc[key]:
                doc[key] = None  # TOML has no null; an empty value means "no intuition"
        return cls(weight, AgentProfile.from_dict(doc))


def _default_regular() -> tuple[PopulationEntry, ...]:
    return (
        PopulationEntry(70, AgentProfile()),
        PopulationEntry(33, AgentProfile(relevance=(Feature.AGE, Feature.EDUCATION))),
        PopulationEntry(33, AgentProfile(mechanism={Feature.EDUCATION: +1, Feature.AGE: -1})),
    )


def _default_anonymized() -> tuple[PopulationEntry, ...]:
    return (PopulationEntry(1, AgentProfile(relevance=None, mechanism=None)),)


DEFAULT_EXPECTATIONS = {"H1": "supported", "H2a": "supported", "H2b": "direction", "H2c": "direction"}


@dataclass(frozen=True)
class StudyConfig:
    n_regular: int = 136
    n_anonymized: int = 106
    regular_population: tuple[PopulationEntry, ...] = field(default_factory=_default_regular)
    anonymized_population: tuple[PopulationEntry, ...] = field(default_factory=_default_anonymized)
    data_group: str = "random"
    alpha: float = 0.05
    welch: bool = False
    expectations: Mapping[str, str] = field(default_factory=lambda: dict(DEFAULT_EXPECTATIONS))
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.n_regular < 2 or self.n_anonymized < 2:
            raise ConfigError("each arm needs at least two participants")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError("alpha must lie in (0, 1)")
        if self.data_group not in ("random", "balanced"):
            raise ConfigError("data_group must be 'random' or 'balanced'")
        for pop in (self.regular_population, self.anonymized_population):
            if not pop or any(e.weight < 0 for e in pop) or sum(e.weight for e in pop) <= 0:
                raise ConfigError("population weights must be non-negative with a positive sum")
        for key, val in self.expectations.items():
            if key not in ("H1", *HYPOTHESES) or val not in VERDICTS:
                raise ConfigError(f"bad expectation {key}={val}")

    def to_dict(self) -> dict:
        out = {
            "n_regular": self.n_regular,
            "n_anonymized": self.n_anonymized,
            "regular_population": [e.to_dict() for e in self.regular_population],
            "anonymized_population": [e.to_dict() for e in self.anonymized_population],
            "data_group": self.data_group,
            "alpha": self.alpha,
            "welch": self.welch,
            "expectations": dict(sorted(self.expectations.items())),
        }
        if self.seed is not None:
            out["seed"] = self.seed
        return out

    @classmethod
    def from_dict(cls, doc: Mapping) -> "StudyConfig":
        doc = dict(doc.get("study", doc))
        known = {f for f in cls.__dataclass_fields__}
        if set(doc) - known:
            raise ConfigError(f"unknown config keys: {sorted(set(doc) - known)}")
        try:
            for key in ("regular_population", "anonymized_population"):
                if key in doc:
                    doc[key] = tuple(PopulationEntry.from_dict(e) for e in doc[key])
            return cls(**doc)
        except (TypeError, ValueError, KeyError) as err:
            raise ConfigError(str(err)) from err


def load_config(path: str | Path) -> StudyConfig:
    path = Path(path)
    try:
        text = path.read_text()
        doc = tomllib.loads(text) if path.suffix == ".toml" else json.loads(text)
    except (OSError, ValueError) as err:
        raise ConfigError(f"cannot read {path}: {err}") from err
    return StudyConfig.from_dict(doc)


def config_hash(cfg: StudyConfig) -> str:
    blob = json.dumps(cfg.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


# -- running -------------------------------------------------------------------


@dataclass(frozen=True)
class TrialRecord:
    agent: int
    arm: str
    identifier: str
    position: int
    predicted_label: Label
    agree: bool
    holder: bool

    def to_dict(self) -> dict:
        return {"agent": self.agent, "arm": self.arm, "identifier": self.identifier,
                "position": self.position, "predicted_label": self.predicted_label.value,
                "agree": self.agree, "holder": self.holder}

    @classmethod
    def from_dict(cls, doc: Mapping) -> "TrialRecord":
        return cls(doc["agent"], doc["arm"], doc["identifier"], doc["position"],
                   Label(doc["predicted_label"]), doc["agree"], doc["holder"])


@dataclass(frozen=True)
class StudyResult:
    seed: int
    config: StudyConfig
    records: tuple[TrialRecord, ...]
    agreement: Mapping[str, Mapping[str, float]]
    arm_means: Mapping[str, float]
    tests: Mapping[str, TestResult]
    verdicts: Mapping[str, str]

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "config_hash": config_hash(self.config),
            "config": self.config.to_dict(),
            "agreement": {k: dict(v) for k, v in self.agreement.items()},
            "arm_means": dict(self.arm_means),
            "tests": {k: v.to_dict() for k, v in self.tests.items()},
            "verdicts": dict(self.verdicts),
            "records": [r.to_dict() for r in self.records],
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "StudyResult":
        return cls(
            doc["seed"],
            StudyConfig.from_dict(doc["config"]),
            tuple(TrialRecord.from_dict(r) for r in doc["records"]),
            doc["agreement"],
            doc["arm_means"],
            {k: TestResult(**v) for k, v in doc["tests"].items()},
            doc["verdicts"],
        )


def _allocate(pop: Sequence[PopulationEntry], n: int) -> list[int]:
    """Entry index for each of ``n`` agents, counts by largest remainder."""
    w = np.array([e.weight for e in pop], dtype=float)
    exact = w / w.sum() * n
    counts = np.floor(exact).astype(int)
    for i in np.argsort(-(exact - counts), kind="stable")[: n - counts.sum()]:
        counts[i] += 1
    return [i for i, c in enumerate(counts) for _ in range(c)]


def _groups(cfg: StudyConfig, n: int, gen: np.random.Generator) -> np.ndarray:
    if cfg.data_group == "balanced":
        g = np.arange(n) % 2 + 1
        gen.shuffle(g)
        return g
    return gen.integers(1, 3, size=n)


def run_study(cfg: StudyConfig, seed: int | None = None) -> StudyResult:
    seed = cfg.seed if seed is None else seed
    if seed is None:
        raise ConfigError("a seed is required")
    by_id = {i.identifier: i for i in builtin_instances()}
    records: list[TrialRecord] = []
    agent_id = 0
    for arm, n, pop in ((REGULAR, cfg.n_regular, cfg.regular_population),
                        (ANONYMIZED, cfg.n_anonymized, cfg.anonymized_population)):
        gen = seeding.rng(seed, f"study/assign/{arm}")
        slots = np.array(_allocate(pop, n))
        gen.shuffle(slots)
        groups = _groups(cfg, n, gen)
        for k in range(n):
            profile = pop[slots[k]].profile
            agent_gen = seeding.rng(seed, f"study/agent/{arm}", k)
            order = agent_gen.permutation(len(LETTERS))
            for pos, li in enumerate(order):
                inst = by_id[f"{LETTERS[li]}{groups[k]}"]
                shown = anonymize(inst) if arm == ANONYMIZED else inst
                dec = decide(profile, shown, anonymized=arm == ANONYMIZED, seed=agent_gen)
                records.append(TrialRecord(agent_id, arm, inst.identifier, pos,
                                           dec.predicted_label, dec.agree,
                                           holds_assumed_intuitions(profile)))
            agent_id += 1
    return _analyse(cfg, seed, tuple(records))


def _per_agent(records: Sequence[TrialRecord], letters: str | None = None) -> dict[int, float]:
    hits: dict[int, list[bool]] = {}
    for r in records:
        if letters is None or r.identifier[0] in letters:
            hits.setdefault(r.agent, []).append(r.agree)
    return {a: float(np.mean(v)) for a, v in sorted(hits.items())}


def verdict_of(test: TestResult, alpha: float) -> str:
    if test.statistic > 0:
        return "supported" if test.p < alpha else "direction"
    if test.statistic < 0 and test.p < alpha:
        return "reversed"
    return "not_supported"


def _analyse(cfg: StudyConfig, seed: int, records: tuple[TrialRecord, ...]) -> StudyResult:
    reg = [r for r in records if r.arm == REGULAR]
    anon = [r for r in records if r.arm == ANONYMIZED]
    holders = [r for r in reg if r.holder]

    def table(rs):
        return {L: float(np.mean([r.agree for r in rs if r.identifier[0] == L])) if any(
            r.identifier[0] == L for r in rs) else float("nan") for L in LETTERS}

    agreement = {REGULAR: table(holders), ANONYMIZED: table(anon), "regular_all": table(reg)}
    arm_means = {REGULAR: float(np.mean([r.agree for r in reg])),
                 ANONYMIZED: float(np.mean([r.agree for r in anon])),
                 "regular_holders": float(np.mean([r.agree for r in holders])) if holders else float("nan")}

    tests = {"H1": t_independent(list(_per_agent(anon).values()), list(_per_agent(reg).values()),
                                 welch=cfg.welch, on_degenerate="zero")}
    if len({r.agent for r in holders}) >= 2:
        ab = _per_agent(holders, "AB")
        for name, pair in HYPOTHESES.items():
            other = _per_agent(holders, pair)
            tests[name] = t_paired([ab[a] for a in ab], [other[a] for a in ab], on_degenerate="zero")
    verdicts = {k: verdict_of(t, cfg.alpha) for k, t in tests.items()}
    return StudyResult(seed, cfg, records, agreement, arm_means, tests, verdicts)


def expectations_met(result: StudyResult) -> dict[str, bool]:
    """Whether each configured expectation holds; ``direction`` accepts a significant result too."""
    out = {}
    for key, want in result.config.expectations.items():
        got = result.verdicts.get(key)
        out[key] = got == want or (want == "direction" and got == "supported")
    return out


def expected_agreement(profile: AgentProfile, anonymized: bool = False) -> dict[str, float]:
    """Closed-form agreement per letter, averaged over both data groups."""
    out: dict[str, list[float]] = {L: [] for L in LETTERS}
    for inst in builtin_instances():
        shown = anonymize(inst) if anonymized else inst
        out[inst.letter].append(agree_probability(profile, shown, anonymized))
    return {L: float(np.mean(v)) for L, v in out.items()}


# -- reporting -------------------------------------------------------------


def _pct(x: float) -> str:
    return f"{100 * x:.2f}"


def report(result: StudyResult, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(result.to_dict(), indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["identifier", REGULAR, ANONYMIZED])
        for L in LETTERS:
            out.writerow([L, _pct(result.agreement[REGULAR][L]), _pct(result.agreement[ANONYMIZED][L])])
        return buf.getvalue()
    if fmt == "records":
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(list(result.records[0].to_dict()) if result.records else [])
        for r in result.records:
            out.writerow(list(r.to_dict().values()))
        return buf.getvalue()
    if fmt != "text":
        raise UnsupportedFormat(fmt)
    met = expectations_met(result)
    lines = [
        "agreement study",
        f"seed: {result.seed}",
        f"config hash: {config_hash(result.config)}",
        f"participants: {result.config.n_regular} regular, {result.config.n_anonymized} anonymized",
        "",
        "identifier  regular(holders)  anonymized",
    ]
    for L in LETTERS:
        lines.append(f"{L:<10}  {_pct(result.agreement[REGULAR][L]):>16}  "
                     f"{_pct(result.agreement[ANONYMIZED][L]):>10}")
    lines += [
        "",
        f"mean agreement: regular {_pct(result.arm_means[REGULAR])}%, "
        f"anonymized {_pct(result.arm_means[ANONYMIZED])}%",
        "",
    ]
    for key, t in result.tests.items():
        want = result.config.expectations.get(key, "-")
        status = "" if key not in met else ("  [ok]" if met[key] else "  [MISMATCH]")
        lines.append(f"{key}: t={t.statistic:.3f} df={t.df:.1f} p={t.p:.3g} "
                     f"verdict={result.verdicts[key]} expected={want}{status}")
    return "\n".join(lines) + "\n"
