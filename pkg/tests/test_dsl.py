import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gogcalc.dsl import (
    ParseError,
    emit_manifold,
    format_path,
    parse_element,
    parse_manifold,
    parse_path,
    parse_query,
    tokenize,
)
from gogcalc.paths import equal
from gogcalc.presets import load_preset, preset_names

GRAPH = """\
manifold two_pieces   # a comment
vertex A : circle_bundle(k=2)
vertex B : circle_bundle(k=2);
edge e : A.T0 -> B.T0 [[0, 1], [1, 0]]
base A
"""


def error_at(text):
    with pytest.raises(ParseError) as info:
        parse_manifold(text)
    return info.value.line, info.value.column, info.value.message


def test_tokens_carry_positions():
    toks = tokenize("edge e : A.T0 -> B.T0\n  [[-1")
    assert [(t.kind, t.text, t.line, t.column) for t in toks[:4]] == [
        ("IDENT", "edge", 1, 1),
        ("IDENT", "e", 1, 6),
        ("PUNCT", ":", 1, 8),
        ("IDENT", "A", 1, 10),
    ]
    assert ("->", 1, 15) in [(t.text, t.line, t.column) for t in toks]
    assert ("-1", 2, 5) in [(t.text, t.line, t.column) for t in toks]


def test_parse_manifold():
    gog = parse_manifold(GRAPH)
    assert gog.name == "two_pieces"
    assert gog.graph.vertices == ("A", "B")
    assert gog.edge_maps["e"].matrix == ((0, 1), (1, 0))
    assert gog.edge_maps["~e"].matrix == ((1, 0), (0, 1))
    assert gog.base_vertex == "A"


def test_kleinian_backend_round_trip():
    text = emit_manifold(load_preset("mixed"))
    assert "kleinian(" in text
    assert emit_manifold(parse_manifold(text)) == text


@pytest.mark.parametrize("name", preset_names())
def test_presets_round_trip(name):
    text = emit_manifold(load_preset(name))
    again = parse_manifold(text)
    assert emit_manifold(again) == text
    assert again.edge_maps == load_preset(name).edge_maps


@pytest.mark.parametrize(
    "text, where, message",
    [
        ("manifold m\nvertex A : circle_bundle(k=1)\n", (2, 12), "free rank must be between 2 and 16"),
        ("manifold m\nvertex A : cone_sfs(alpha=[1], beta=[1])", (2, 12), "cone order must be ≥ 2"),
        ("manifold m\nvertex A : nope()", (2, 12), "expected one of free_abelian, circle_bundle, cone_sfs, kleinian, found 'nope'"),
        ("manifold m\nvertex A : circle_bundle(k=2)\nedge e : A.T0 -> A.T9 [[1,0],[0,1]]\n", (3, 20), "vertex A has no torus T9"),
        ("manifold m\nvertex A : circle_bundle(k=2)\nedge e : A.T0 -> A.T1 [[1,2],[2,4]]\n", (3, 6), "edge map not injective"),
        ("manifold m\nvertex A : circle_bundle(k=2)\nbase B\n", (3, 6), "unknown vertex 'B'"),
        ("manifold m\nvertex A : circle_bundle(k=2)\nvertex A : circle_bundle(k=2)\n", (3, 8), "duplicate or invalid vertex 'A'"),
        (b"manifold \xff", (1, 10), "invalid UTF-8 byte"),
        ("", (1, 1), "expected at least one vertex declaration, found 'end of input'"),
    ],
)
def test_manifold_errors_are_positioned(text, where, message):
    line, column, msg = error_at(text)
    assert (line, column) == where
    assert msg == message


def test_paths_and_elements():
    gog = load_preset("graph_manifold")
    p = parse_path("A: x1 h^-2 ; e ; x2 ; ~e ; 1", gog)
    assert p.edges == ("e", "~e")
    assert format_path(p) == "A: x1 h^-2 ; e ; x2 ; ~e ; 1"
    vg = gog.vg("A")
    assert parse_element("1", vg) == vg.identity()
    assert equal(parse_path("A: x1 x1", gog), parse_path("A: x1^2", gog))
    with pytest.raises(ParseError, match="does not start"):
        parse_path("A: 1 ; ~e ; 1", gog)


def test_queries():
    gog = load_preset("mixed")
    q = parse_query("malnormal(W.T1, K: q1, K: 1 ; e ; b ; ~e ; 1)", gog)
    assert q.kind == "malnormal" and q.torus == ("W", 1) and len(q.paths) == 2
    assert parse_query("validate", gog).paths == ()
    assert parse_query("classify(K: q1, K: h^2)", gog).kind == "classify"


@pytest.mark.parametrize(
    "text, column, message",
    [
        ("divisibility(K: zz)", 17, "unknown generator 'zz'"),
        ("frob(K: h)", 1, "unknown query 'frob'"),
        ("equal(K: h)", 11, "expected ',', found ')'"),
        ("reduce(K: h^1001)", 11, "expected exponent of reasonable size"),
    ],
)
def test_query_errors_are_positioned(text, column, message):
    with pytest.raises(ParseError) as info:
        parse_query(text, load_preset("trefoil"))
    assert (info.value.line, info.value.column, info.value.message) == (1, column, message)


@settings(max_examples=300, deadline=None)
@given(st.binary(max_size=80))
def test_arbitrary_bytes_parse_or_fail_with_a_position(data):
    for parse in (parse_manifold, lambda d: parse_query(d, load_preset("mixed"))):
        try:
            parse(data)
        except ParseError as exc:
            assert exc.line >= 1 and exc.column >= 1


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(preset_names()), st.data())
def test_mutated_presets_parse_or_fail_with_a_position(name, data):
    text = emit_manifold(load_preset(name))
    k = data.draw(st.integers(0, len(text)))
    junk = data.draw(st.text(alphabet="[](),;:.=^<>~-0123456789 \nabT", max_size=4))
    try:
        parse_manifold(text[:k] + junk + text[k:])
    except ParseError as exc:
        assert exc.line >= 1 and exc.column >= 1
