import copy
import json

import pytest

from gogcalc.backends.base import SearchExhausted
from gogcalc.certificates import ReplayError, evidence_plan, replay, run_query, with_budget
from gogcalc.dsl import parse_query
from gogcalc.presets import load_preset

QUERIES = {
    "trefoil": [
        "reduce(K: q1 q2)",
        "equal(K: q1 q1, K: h^-1)",
        "commute(K: q1, K: q2)",
        "divisibility(K: h^-1)",
        "classify(K: h, K: q1)",
        "centralizer(K: q1)",
        "validate",
    ],
    "fig8": ["centralizer(F: a)", "malnormal(F.T0, F: b, F: a)", "divisibility(F: a b)"],
    "graph_manifold": [
        "reduce(A: x1 ; e ; h ; ~e ; 1)",
        "centralizer(A: 1 ; e ; h ; ~e ; 1)",
        "classify(A: x1 ; e ; x2 ; ~e ; 1, A: x1 ; e ; x2 ; ~e ; x1 ; e ; x2 ; ~e ; 1)",
        "conjclass(A: h)",
    ],
    "mixed": [
        "malnormal(W.T1, K: q1 ; e ; b ; ~e ; 1, K: 1 ; e ; b ; ~e ; 1)",
        "divisibility(K: q1 ; e ; b ; ~e ; 1)",
    ],
    "hnn_bundle": ["divisibility(A: x1 ; t ; x2 ; ~t ; 1 ; t ; 1)"],
}
CASES = [(name, q) for name, qs in QUERIES.items() for q in qs]


def certify(name, text, trace=True):
    gog = load_preset(name)
    return run_query(gog, parse_query(text, gog), trace=trace)


@pytest.mark.parametrize("name, text", CASES)
def test_certificates_replay(name, text):
    cert = certify(name, text)
    assert replay(json.loads(json.dumps(cert)))


@pytest.mark.parametrize("name, text", CASES[:6])
def test_untraced_certificates_replay(name, text):
    cert = certify(name, text, trace=False)
    assert all("steps" not in c for c in cert["checks"])
    assert replay(cert)


def test_certificate_document():
    cert = certify("trefoil", "divisibility(K: h^-1)")
    assert cert["format_version"] == 1
    assert cert["answer"]["max_n"] == 3 and cert["answer"]["root"] == "K: q2"
    assert cert["complete"] is True
    assert [c["claim"] for c in cert["checks"]] == ["cyclically_reduced", "trivial"]


def test_evidence_plan_is_derived_from_the_answer():
    gog = load_preset("trefoil")
    plan = evidence_plan(gog, "equal", ["K: h", "K: h"], {"equal": True}, None)
    assert plan == [{"claim": "trivial", "factors": [["K: h", 1], ["K: h", -1]]}]


TRACED = certify("graph_manifold", "reduce(A: x1 ; e ; h ; ~e ; 1)")


def mutate(fn):
    doc = copy.deepcopy(TRACED)
    fn(doc)
    return doc


@pytest.mark.parametrize(
    "change, message",
    [
        (lambda d: d["checks"][0]["steps"][0].update(witness=[1, 1]), "witness does not map"),
        (lambda d: d["checks"][0]["steps"][0].update(replacement="h"), "replacement differs"),
        (lambda d: d["checks"][0]["steps"][0].update(index=2), "out of range"),
        (lambda d: d["checks"][0]["steps"].pop(), "stops before the path is reduced"),
        (lambda d: d["checks"][0].update(result="A: x1"), "stated result differs"),
        (lambda d: d["answer"].update(reduced="A: x1 h"), "stated reduced path differs"),
        (lambda d: d.update(format_version=7), "format version"),
        (lambda d: d["checks"].pop(), "does not cover"),
        (lambda d: d["checks"][0].update(claim="trivial"), "does not match the evidence plan"),
        (
            lambda d: d.update(manifold=d["manifold"].replace("[[0, 1], [1, 0]]", "[[1, 0], [0, 1]]")),
            "witness does not map",
        ),
    ],
)
def test_tampering_is_detected(change, message):
    with pytest.raises(ReplayError, match=message):
        replay(mutate(change))


def test_wrong_answers_are_rejected():
    cert = certify("trefoil", "divisibility(K: h^-1)")
    cert["answer"]["max_n"] = 2
    with pytest.raises(ReplayError):
        replay(cert)
    cert = certify("trefoil", "commute(K: q1, K: q2)")
    cert["answer"]["commute"] = True
    with pytest.raises(ReplayError):
        replay(cert)


def test_budget_is_recorded_and_can_run_out():
    gog = with_budget(load_preset("fig8"), 3)
    cert = run_query(gog, parse_query("centralizer(F: a)", gog))
    assert cert["budget"]["kleinian_word_length"] == 3
    tiny = with_budget(load_preset("fig8"), 0)
    cert = run_query(tiny, parse_query("divisibility(F: a b a b)", tiny))
    assert cert["complete"] is False
    assert replay(cert)
    with pytest.raises(SearchExhausted):
        run_query(tiny, parse_query("centralizer(F: b^3 a b^-3)", tiny))
