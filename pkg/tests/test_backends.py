import itertools

import pytest

from gogcalc.backends.abelian import FreeAbelian
from gogcalc.backends.base import IdentityElement
from gogcalc.backends.seifert import CircleBundle, ConeSFS
from gogcalc.dsl import parse_element
from gogcalc.presets import figure_eight_group, letters, trefoil_group, whitehead_group


def groups():
    return [
        ("free_abelian", FreeAbelian(2)),
        ("circle_bundle", CircleBundle(2)),
        ("circle_bundle_3", CircleBundle(3)),
        ("trefoil", trefoil_group()),
        ("cone_235", ConeSFS((2, 3, 5), (1, 1, -1))),
        ("fig8", figure_eight_group()),
        ("whitehead", whitehead_group()),
    ]


@pytest.fixture(params=groups(), ids=lambda p: p[0])
def vg(request):
    return request.param[1]


def test_group_axioms_on_a_ball(vg):
    ball = vg.ball(2)[:25]
    e = vg.identity()
    for a in ball:
        assert vg.mul(a, e) == a or vg.is_identity(vg.mul(vg.mul(a, e), vg.inv(a)))
        assert vg.is_identity(vg.mul(a, vg.inv(a)))
    for a, b, c in itertools.islice(itertools.product(ball, repeat=3), 0, 4000, 7):
        left = vg.mul(vg.mul(a, b), c)
        right = vg.mul(a, vg.mul(b, c))
        assert vg.is_identity(vg.mul(left, vg.inv(right)))


def test_ball_is_graded_by_complexity(vg):
    assert vg.is_identity(vg.ball(0)[0])
    for g in vg.ball(2):
        assert vg.complexity(g) <= 2
    for name in vg.generator_names():
        assert vg.complexity(vg.generator(name)) == 1


def test_format_parses_back(vg):
    for g in vg.ball(2):
        assert vg.is_identity(vg.mul(parse_element(vg.format(g), vg), vg.inv(g)))


def test_tori_are_abelian_and_coordinates_round_trip(vg):
    for i in range(len(vg.tori)):
        for coords in ((1, 0), (0, 1), (2, -3), (0, 0)):
            g = vg.torus_elem(i, coords)
            assert vg.peripheral_membership(i, g) == coords
        a, b = vg.torus_elem(i, (1, 0)), vg.torus_elem(i, (0, 1))
        assert vg.commute(a, b)


def test_centralizer_contains_brute_commuting_elements(vg):
    ball = vg.ball(2)
    for g in ball[1:12]:
        desc = vg.centralizer(g)
        for h in ball:
            if vg.commute(g, h):
                assert vg.centralizer_contains(desc, h)


def test_max_divisor_matches_ball_search(vg):
    ball = vg.ball(2)
    targets = {}
    for y in ball[1:]:
        for n in range(1, 7):
            targets.setdefault(vg.format(vg.power(y, n)), []).append(n)
    for g in ball[1:15]:
        md = vg.max_divisor(g)
        assert vg.is_identity(vg.mul(vg.power(md.root, md.d), vg.inv(g)))
        assert md.d >= max(targets.get(vg.format(g), [1]))


def test_max_divisor_of_identity_is_rejected(vg):
    with pytest.raises(IdentityElement):
        vg.max_divisor(vg.identity())


def test_trefoil_relations_and_values():
    k = trefoil_group()
    q1, q2, h = (k.generator(n) for n in ("q1", "q2", "h"))
    assert k.is_identity(k.mul(k.power(q1, 2), h))
    assert k.is_identity(k.mul(k.power(q2, 3), h))
    assert k.fiber() == h
    assert k.peripheral_membership(0, k.power(h, 3)) == (0, 3)
    assert k.peripheral_membership(0, q1) is None
    md = k.max_divisor(k.inv(h))
    assert (md.d, k.format(md.root)) == (3, "q2")
    assert k.centralizer(h).kind == "whole"
    assert k.singular_order == 3


def test_circle_bundle_fiber_is_central():
    c = CircleBundle(2)
    h = c.fiber()
    for g in c.ball(2):
        assert c.commute(g, h)
    assert c.fiber_exponent(c.power(h, -4)) == -4
    assert c.fiber_exponent(c.generator("x1")) is None


def test_figure_eight_relation_and_cusp():
    f = figure_eight_group()
    assert f.is_identity(f.from_word(letters("AbaBabABaB")))
    mu = f.generator("a")
    la = f.from_word(letters("bABaaBAb"))
    assert f.peripheral_membership(0, f.mul(f.mul(mu, mu), la)) == (2, 1)
    assert f.trace_classify(mu) == "Parabolic"
    assert f.trace_classify(f.mul(mu, f.generator("b"))) == "Loxodromic"
    assert f.centralizer(mu).kind == "torus"


def test_whitehead_cusps_are_distinct():
    w = whitehead_group()
    a, b = w.generator("a"), w.generator("b")
    assert w.peripheral_membership(0, a) == (1, 0)
    assert w.peripheral_membership(1, b) == (1, 0)
    assert w.peripheral_membership(0, b) is None
    assert w.peripheral_membership(1, a) is None


def test_loxodromic_power_and_root():
    f = figure_eight_group()
    g = f.from_word(letters("ab"))
    md = f.max_divisor(f.power(g, 3))
    assert md.d == 3
    assert f.power_exponent(g, f.power(g, -3)) == -3
    assert f.power_exponent(g, f.generator("a")) is None


def test_free_abelian():
    z = FreeAbelian(2)
    g = z.from_word([("z1", 2), ("z2", -4)])
    assert z.complexity(g) == 6
    md = z.max_divisor(g)
    assert md.d == 2
    assert z.centralizer(g).kind == "whole"
