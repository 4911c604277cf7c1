import numpy as np
import pytest
from hypothesis import given, strategies as st

from causal_understanding.agents import (
    AgentProfile,
    AnonymizedInstance,
    Decision,
    Feature,
    Instance,
    Label,
    NoIntuition,
    agree_probability,
    alice,
    alignment_M,
    alignment_R,
    anonymize,
    decide,
    holds_assumed_intuitions,
    intuitive_label,
    no_intuition,
)
from causal_understanding.study import builtin_instances

EXPECTED_MARKS = {  # letter -> (relevance, mechanism)
    "A": (True, True), "B": (True, True), "C": (False, True), "D": (False, True),
    "E": (True, False), "F": (True, False), "G": (False, False), "H": (False, False),
}
HIGH, LOW = Label.HIGH, Label.LOW


def inst(edu, age, pred=HIGH, expl=Feature.EDUCATION):
    return Instance(edu, age, 0.5, 0.5, pred, expl, "Z1")


@pytest.mark.parametrize("row", builtin_instances(), ids=lambda r: r.identifier)
def test_alignment_marks(row):
    assert (alignment_R(row), alignment_M(row)) == EXPECTED_MARKS[row.letter]


def test_anonymize():
    row1 = builtin_instances()[0]
    a = anonymize(row1)
    assert (a.feature_a, a.feature_b) == (0.85, 0.13)
    assert a.education is None and a.age is None
    assert a.prediction is row1.prediction and a.explanation is row1.explanation
    assert anonymize(a) == a
    with pytest.raises(AnonymizedInstance):
        alignment_R(a)
    with pytest.raises(AnonymizedInstance):
        alignment_M(a)


def test_intuitive_labels():
    assert intuitive_label(alice(), inst("Masters", 25)) is HIGH
    assert intuitive_label(alice(), inst("Middle school", 48)) is LOW
    age_first = AgentProfile(relevance=(Feature.AGE, Feature.EDUCATION))
    assert intuitive_label(age_first, inst("Masters", 25)) is LOW
    with pytest.raises(NoIntuition):
        intuitive_label(no_intuition(), inst("Masters", 25))


@pytest.mark.parametrize("edu,age", [("Masters", 49), ("Masters", 23),
                                     ("Middle school", 49), ("Middle school", 23)])
def test_quadrant_corners(edu, age):
    # the education axis decides the colour for the assumed intuition
    want = HIGH if edu == "Masters" else LOW
    assert intuitive_label(alice(), inst(edu, age)) is want
    age_first = AgentProfile(relevance=(Feature.AGE, Feature.EDUCATION))
    assert intuitive_label(age_first, inst(edu, age)) is (HIGH if age >= 46 else LOW)


def test_mid_range_age_is_rejected():
    with pytest.raises(ValueError):
        alignment_M(inst("Masters", 36, expl=Feature.AGE))


def test_decide_is_deterministic_and_consistent():
    rows = builtin_instances()
    for row in rows:
        d1, d2 = decide(alice(), row, seed=7), decide(alice(), row, seed=7)
        assert d1 == d2
        assert d1.agree == (d1.predicted_label is row.prediction)


def test_follow_rate_one_always_agrees():
    p = no_intuition(follow_rate_no_intuition=1.0)
    gen = np.random.default_rng(0)
    assert all(decide(p, anonymize(r), anonymized=True, seed=gen).agree for r in builtin_instances())


def test_no_intuition_follow_rate_long_run():
    gen = np.random.default_rng(1)
    rows = [anonymize(r) for r in builtin_instances()]
    hits = [decide(no_intuition(), rows[i % 16], anonymized=True, seed=gen).agree for i in range(20_000)]
    assert abs(np.mean(hits) - 0.7064) <= 0.01


def test_agreement_converges_to_configured_probability():
    gen = np.random.default_rng(2)
    for row in builtin_instances()[::3]:
        p = agree_probability(alice(), row)
        hits = np.mean([decide(alice(), row, seed=gen).agree for _ in range(10_000)])
        assert abs(hits - p) < 4 * np.sqrt(p * (1 - p) / 10_000) + 1e-9


def pair_means(profile):
    by = {}
    for r in builtin_instances():
        by.setdefault(r.letter, []).append(agree_probability(profile, r))
    m = {k: np.mean(v) for k, v in by.items()}
    return {k: (m[k[0]] + m[k[1]]) / 2 for k in ("AB", "CD", "EF", "GH")}


def test_default_profile_ordering_in_expectation():
    m = pair_means(alice())
    assert m["AB"] >= m["GH"] >= max(m["CD"], m["EF"])


prob = st.floats(0.01, 0.99)


@given(qb_hi=prob, qb_lo=prob, qc_hi=prob, qc_lo=prob, ew=st.floats(0.01, 1.0), frac=st.floats(0, 0.999))
def test_ordering_holds_for_parameter_family(qb_hi, qb_lo, qc_hi, qc_lo, ew, frac):
    qc_hi, qc_lo = min(qc_hi, qb_hi * 0.99), min(qc_lo, qb_lo * 0.99)
    # a coherence boost larger than the base/conflict gap would overturn GH vs CD
    bound = min((qb_hi - qc_hi) / (1 - qc_hi), (qb_lo - qc_lo) / (1 - qc_lo))
    p = alice(q_base={HIGH: qb_hi, LOW: qb_lo}, q_conflict={HIGH: qc_hi, LOW: qc_lo},
              explanation_weight=ew, coherence_weight=frac * bound)
    m = pair_means(p)
    assert m["AB"] >= m["GH"] - 1e-12
    assert m["GH"] >= max(m["CD"], m["EF"]) - 1e-12


def test_ordering_holds_empirically():
    gen = np.random.default_rng(3)
    by = {"AB": [], "CD": [], "EF": [], "GH": []}
    rows = builtin_instances()
    for i in range(10_000):
        r = rows[i % 16]
        key = next(k for k in by if r.letter in k)
        by[key].append(decide(alice(), r, seed=gen).agree)
    m = {k: np.mean(v) for k, v in by.items()}
    assert m["AB"] > m["GH"] > max(m["CD"], m["EF"])


def test_explanation_only_matters_with_intuitions():
    for r in builtin_instances():
        assert agree_probability(no_intuition(), r, explanation_shown=True) == \
            agree_probability(no_intuition(), r, explanation_shown=False)
    a = [r for r in builtin_instances() if r.letter == "A"][0]
    assert agree_probability(alice(), a) > agree_probability(alice(), a, explanation_shown=False)


def test_profile_validation_and_round_trip():
    with pytest.raises(ValueError):
        AgentProfile(explanation_weight=1.5)
    with pytest.raises(ValueError):
        AgentProfile(relevance=(Feature.AGE, Feature.AGE))
    with pytest.raises(ValueError):
        AgentProfile(mechanism={Feature.AGE: 1})
    for p in (alice(), no_intuition(), AgentProfile(mechanism={Feature.EDUCATION: 1, Feature.AGE: -1})):
        assert AgentProfile.from_dict(p.to_dict()) == p


def test_intuition_filter():
    assert holds_assumed_intuitions(alice())
    assert not holds_assumed_intuitions(no_intuition())
    assert not holds_assumed_intuitions(AgentProfile(relevance=(Feature.AGE, Feature.EDUCATION)))
    assert not holds_assumed_intuitions(AgentProfile(mechanism={Feature.EDUCATION: 1, Feature.AGE: -1}))


def test_decision_type():
    d = decide(alice(), builtin_instances()[0], seed=0)
    assert isinstance(d, Decision) and isinstance(d.predicted_label, Label)
