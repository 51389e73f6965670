import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gogcalc.dsl import format_path, parse_path
from gogcalc.harness import enumerate_elements, reduce_rightmost
from gogcalc.paths import (
    PathError,
    PathWord,
    canonical_key,
    concat,
    conjugate,
    cyclic_length,
    cyclic_reduce,
    edge_path,
    equal,
    invert,
    is_cyclically_reduced,
    is_reduced,
    is_trivial,
    power,
    rebase,
    reduce,
    reduced,
    vertex_conjugator,
    vertex_path,
)
from gogcalc.presets import load_preset

PRESETS = ["trefoil", "fig8", "graph_manifold", "hnn_bundle", "mixed"]


def _walk(draw, gog, max_edges=5):
    """A loop at the base vertex: a walk with short vertex elements, closed along the tree."""
    v = gog.base_vertex
    elems, edges = [], []
    for _ in range(draw(st.integers(0, max_edges))):
        out = gog.graph.out_edges(v)
        if not out:
            break
        elems.append(draw(st.sampled_from(gog.vg(v).ball(1))))
        e = draw(st.sampled_from(out))
        edges.append(e)
        v = gog.terminus(e)
    elems.append(draw(st.sampled_from(gog.vg(v).ball(1))))
    walk = PathWord(gog, gog.base_vertex, tuple(elems), tuple(edges))
    return concat(walk, gog.base_path(v))


@st.composite
def loops(draw):
    return _walk(draw, load_preset(draw(st.sampled_from(PRESETS))))


@st.composite
def loop_pairs(draw):
    gog = load_preset(draw(st.sampled_from(PRESETS)))
    return _walk(draw, gog), _walk(draw, gog)


def test_trefoil_values():
    gog = load_preset("trefoil")
    assert format_path(reduced(parse_path("K: q1 q1", gog))) == "K: h^-1"
    assert is_trivial(parse_path("K: q2^3 h", gog))
    assert not is_trivial(parse_path("K: q1 q2", gog))


def test_graph_manifold_reduction_and_trace():
    gog = load_preset("graph_manifold")
    p = parse_path("A: x1 ; e ; h ; ~e ; 1", gog)
    r, tr = reduce(p)
    assert format_path(r) == "A: x1^2"
    assert [(s.index, s.edge, s.witness) for s in tr.steps] == [(1, "e", (1, 0))]
    q = parse_path("A: 1 ; e ; x2 ; ~e ; 1", gog)
    assert is_reduced(q) and reduced(q) == q


def test_hnn_backtrack_through_the_other_torus():
    gog = load_preset("hnn_bundle")
    p = parse_path("A: 1 ; t ; h ; ~t ; 1", gog)
    assert reduced(p).length == 0
    # x1 is the boundary curve of T0, so it rotates across the ends
    assert cyclic_length(parse_path("A: x1 ; t ; x2 ; ~t ; 1", gog)) == 0
    assert cyclic_length(parse_path("A: x1 ; t ; x2 ; t ; 1", gog)) == 2


def test_concat_and_power_preconditions():
    gog = load_preset("graph_manifold")
    e = edge_path(gog, "e")
    with pytest.raises(PathError, match="endpoint mismatch"):
        concat(e, e)
    with pytest.raises(PathError, match="loop"):
        power(e, 2)
    with pytest.raises(PathError):
        PathWord(gog, "A", (), ())
    with pytest.raises(PathError):
        equal(e, vertex_path(gog, "A"))


def test_rebase_and_conjugate():
    gog = load_preset("mixed")
    w = gog.vg("W")
    at_w = vertex_path(gog, "W", w.generator("a"))
    based = rebase(at_w)
    assert based.start == gog.base_vertex == based.end
    assert equal(based, conjugate(invert(gog.base_path("W")), at_w))


@settings(max_examples=150, deadline=None)
@given(loops())
def test_reduction_orders_agree(p):
    left, right = reduced(p), reduce_rightmost(p)
    assert left.length == right.length
    assert equal(left, right)
    assert is_reduced(left) and reduced(left) == left


@settings(max_examples=150, deadline=None)
@given(loops())
def test_inverse_and_identity(p):
    assert is_trivial(concat(p, invert(p)))
    assert equal(invert(invert(p)), p)
    assert equal(power(p, 0), vertex_path(p.gog, p.start))


@settings(max_examples=100, deadline=None)
@given(loop_pairs())
def test_canonical_key_decides_equality(pair):
    p, q = pair
    assert (canonical_key(p) == canonical_key(q)) == equal(p, q)
    assert canonical_key(p) == canonical_key(concat(concat(p, q), invert(q)))


@settings(max_examples=100, deadline=None)
@given(loops(), st.integers(1, 4))
def test_cyclic_length_of_powers(p, n):
    s, c = cyclic_reduce(p)
    assert is_cyclically_reduced(s)
    assert equal(conjugate(c, s), p)
    assert cyclic_length(power(p, n)) == n * s.length


@settings(max_examples=100, deadline=None)
@given(loop_pairs())
def test_cyclic_length_is_a_conjugacy_invariant(pair):
    p, h = pair
    assert cyclic_length(conjugate(h, p)) == cyclic_length(p)


def test_vertex_conjugator_finds_a_conjugating_element():
    gog = load_preset("graph_manifold")
    s = reduced(parse_path("A: x1 ; e ; x2 ; ~e ; x2", gog))
    z = gog.vg("A").generator("x2")
    t = reduced(conjugate(vertex_path(gog, "A", z), s))
    found = vertex_conjugator(s, t)
    assert found is not None
    assert equal(conjugate(vertex_path(gog, "A", found), s), t)


def test_cyclic_reducedness_tests_membership_not_conjugacy():
    # the junction x2 x1 x2^-1 is conjugate into the edge torus but not in it,
    # and no conjugate of the loop is shorter
    gog = load_preset("graph_manifold")
    s = parse_path("A: x2 x1 x2^-1 ; e ; x2 ; ~e ; 1", gog)
    assert is_cyclically_reduced(s)
    assert cyclic_length(s) == 2
    assert min(reduced(conjugate(h, s)).length for h in enumerate_elements(gog, 4)) == 2


def test_cyclically_reduced_loops_are_shortest_among_small_conjugates():
    gog = load_preset("hnn_bundle")
    conjugators = enumerate_elements(gog, 2)
    for g in enumerate_elements(gog, 3):
        s, _ = cyclic_reduce(g)
        assert all(reduced(conjugate(h, s)).length >= s.length for h in conjugators)
