"""Simulated participants for the income-prediction study.

An agent may hold a relevance intuition (which feature matters more) and a
mechanism intuition (the sign linking each feature to income). Its chance of
agreeing with a shown prediction depends on whether the prediction matches
the label its intuitions imply and on whether the highlighted explanation is
consistent with those intuitions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

__all__ = [
    "Feature",
    "Label",
    "Instance",
    "AgentProfile",
    "Decision",
    "AnonymizedInstance",
    "NoIntuition",
    "alice",
    "no_intuition",
    "anonymize",
    "feature_is_high",
    "alignment_R",
    "alignment_M",
    "intuitive_label",
    "agree_probability",
    "decide",
    "holds_assumed_intuitions",
    "AGE_HIGH",
    "AGE_LOW",
]


class AnonymizedInstance(ValueError):
    pass


class NoIntuition(ValueError):
    pass


class Feature(enum.Enum):
    EDUCATION = "Education"
    AGE = "Age"


class Label(enum.Enum):
    HIGH = ">50K"
    LOW = "<50K"

    def flipped(self) -> "Label":
        return Label.LOW if self is Label.HIGH else Label.HIGH


MASTERS = "Masters"
MIDDLE_SCHOOL = "Middle school"
# the dataset only has ages 23-26 and 46-49, so these bounds split it cleanly
AGE_HIGH = 46
AGE_LOW = 26


@dataclass(frozen=True)
class Instance:
    education: str | None
    age: int | None
    feature_a: float
    feature_b: float
    prediction: Label
    explanation: Feature
    identifier: str

    @property
    def anonymized(self) -> bool:
        return self.education is None

    @property
    def letter(self) -> str:
        return self.identifier[0]

    @property
    def group(self) -> int:
        return int(self.identifier[1:])


def anonymize(inst: Instance) -> Instance:
    """Hide the feature names; the encodings, prediction and highlight stay."""
    return replace(inst, education=None, age=None)


def feature_is_high(inst: Instance, feature: Feature) -> bool:
    if inst.anonymized:
        raise AnonymizedInstance(inst.identifier)
    if feature is Feature.EDUCATION:
        if inst.education not in (MASTERS, MIDDLE_SCHOOL):
            raise ValueError(f"unknown education level {inst.education!r}")
        return inst.education == MASTERS
    if inst.age >= AGE_HIGH:
        return True
    if inst.age <= AGE_LOW:
        return False
    raise ValueError(f"age {inst.age} is neither high nor low for this dataset")


def _implied(high: bool, sign: int) -> Label:
    return Label.HIGH if high == (sign > 0) else Label.LOW


def alignment_R(inst: Instance) -> bool:
    """Does the explanation highlight education, the feature assumed to matter most?"""
    if inst.anonymized:
        raise AnonymizedInstance(inst.identifier)
    return inst.explanation is Feature.EDUCATION


def alignment_M(inst: Instance) -> bool:
    """Is the prediction what a positive link from the highlighted feature implies?"""
    return _implied(feature_is_high(inst, inst.explanation), +1) is inst.prediction


@dataclass(frozen=True)
class AgentProfile:
    """Intuitions and decision parameters of one simulated participant.

    ``q_base`` and ``q_conflict`` are agreement probabilities when the shown
    prediction matches or contradicts the agent's own intuitive label; both
    are keyed by the predicted label. ``explanation_weight`` moves agreement
    toward certainty when the explanation fits both intuitions and the
    prediction matches them; ``coherence_weight`` does the same, more weakly,
    for a conflicting prediction whose highlighted feature still points the
    way the agent's mechanism says.
    """

    relevance: tuple[Feature, Feature] | None = (Feature.EDUCATION, Feature.AGE)
    mechanism: Mapping[Feature, int] | None = field(
        default_factory=lambda: {Feature.EDUCATION: +1, Feature.AGE: +1})
    follow_rate_no_intuition: float = 0.7064
    explanation_weight: float = 0.44
    coherence_weight: float = 0.035
    q_base: Mapping[Label, float] = field(
        default_factory=lambda: {Label.HIGH: 0.743, Label.LOW: 0.927})
    q_conflict: Mapping[Label, float] = field(
        default_factory=lambda: {Label.HIGH: 0.150, Label.LOW: 0.295})

    def __post_init__(self) -> None:
        probs = [self.follow_rate_no_intuition, self.explanation_weight, self.coherence_weight,
                 *self.q_base.values(), *self.q_conflict.values()]
        if any(not 0.0 <= p <= 1.0 for p in probs):
            raise ValueError("profile probabilities must lie in [0, 1]")
        if self.relevance is not None and set(self.relevance) != set(Feature):
            raise ValueError("relevance must rank every feature exactly once")
        if self.mechanism is not None:
            if set(self.mechanism) != set(Feature) or any(s not in (-1, 1) for s in self.mechanism.values()):
                raise ValueError("mechanism needs a sign of +1 or -1 for every feature")
        if set(self.q_base) != set(Label) or set(self.q_conflict) != set(Label):
            raise ValueError("q_base and q_conflict need a value per label")

    @property
    def has_intuition(self) -> bool:
        return self.relevance is not None and self.mechanism is not None

    def to_dict(self) -> dict:
        return {
            "relevance": None if self.relevance is None else [f.value for f in self.relevance],
            "mechanism": None if self.mechanism is None
            else {f.value: s for f, s in sorted(self.mechanism.items(), key=lambda kv: kv[0].value)},
            "follow_rate_no_intuition": self.follow_rate_no_intuition,
            "explanation_weight": self.explanation_weight,
            "coherence_weight": self.coherence_weight,
            "q_base": {k.value: v for k, v in self.q_base.items()},
            "q_conflict": {k.value: v for k, v in self.q_conflict.items()},
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "AgentProfile":
        doc = dict(doc)
        known = set(cls().to_dict())
        if set(doc) - known:
            raise ValueError(f"unknown profile keys: {sorted(set(doc) - known)}")
        if "relevance" in doc:
            doc["relevance"] = None if doc["relevance"] is None else tuple(Feature(f) for f in doc["relevance"])
        if "mechanism" in doc:
            doc["mechanism"] = None if doc["mechanism"] is None else {
                Feature(k): int(v) for k, v in doc["mechanism"].items()}
        for key in ("q_base", "q_conflict"):
            if key in doc:
                doc[key] = {Label(k): float(v) for k, v in doc[key].items()}
        return cls(**doc)


def alice(**overrides) -> AgentProfile:
    """Holder of the assumed intuitions: education over age, both positive."""
    return AgentProfile(**overrides)


def no_intuition(**overrides) -> AgentProfile:
    return AgentProfile(relevance=None, mechanism=None, **overrides)


def holds_assumed_intuitions(p: AgentProfile) -> bool:
    return (p.relevance is not None and p.relevance[0] is Feature.EDUCATION
            and p.mechanism is not None and all(s > 0 for s in p.mechanism.values()))


def intuitive_label(p: AgentProfile, inst: Instance) -> Label:
    """Label implied by the agent's top-ranked feature and its sign."""
    if not p.has_intuition:
        raise NoIntuition()
    top = p.relevance[0]
    return _implied(feature_is_high(inst, top), p.mechanism[top])


def _own_alignment(p: AgentProfile, inst: Instance) -> tuple[bool, bool]:
    """Relevance and mechanism consistency judged by the agent's own intuitions."""
    rel = inst.explanation is p.relevance[0]
    shown = inst.explanation
    mech = _implied(feature_is_high(inst, shown), p.mechanism[shown]) is inst.prediction
    return rel, mech


def agree_probability(p: AgentProfile, inst: Instance, anonymized: bool = False,
                      explanation_shown: bool = True) -> float:
    if anonymized or inst.anonymized or not p.has_intuition:
        return p.follow_rate_no_intuition
    match = intuitive_label(p, inst) is inst.prediction
    q = (p.q_base if match else p.q_conflict)[inst.prediction]
    if not explanation_shown:
        return q
    rel, mech = _own_alignment(p, inst)
    if match and rel and mech:
        w = p.explanation_weight
    elif not match and mech:
        w = p.coherence_weight
    else:
        w = 0.0
    return q + w * (1.0 - q)


@dataclass(frozen=True)
class Decision:
    predicted_label: Label
    agree: bool


def decide(p: AgentProfile, inst: Instance, anonymized: bool = False,
           seed: int | np.random.Generator = 0, explanation_shown: bool = True) -> Decision:
    """One decision on one instance; deterministic given the seed."""
    gen = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    agree = bool(gen.random() < agree_probability(p, inst, anonymized, explanation_shown))
    label = inst.prediction if agree else inst.prediction.flipped()
    return Decision(label, agree)
