"""Decision procedures for divisibility, commuting pairs and centralizers.

Every routine works on loops at a common vertex of a graph of groups.
Answers carry the paths and witnesses that justify them; anything computed
through a bounded search says so through a ``complete`` or ``verified`` flag.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .backends.base import SearchExhausted, VertexCentralizer
from .paths import (
    PathError,
    PathWord,
    concat,
    conjugate,
    cyclic_reduce,
    equal,
    invert,
    is_trivial,
    power,
    reduced,
    vertex_conjugator,
    vertex_path,
)

UnsupportedSearchExhausted = SearchExhausted


class TrivialElement(ValueError):
    pass


class NotCommuting(ValueError):
    pass


class PreconditionError(ValueError):
    pass


# -- result types ---------------------------------------------------------------


@dataclass(frozen=True)
class DivisibilityResult:
    max_n: int
    root: PathWord
    bound_used: str  # "ClBound" or "VertexBound"
    bound: int
    complete: bool = True


@dataclass(frozen=True)
class Cyclic:
    generator: PathWord
    primitivity_verified: bool = True
    tag: str = "Cyclic"


@dataclass(frozen=True)
class ConjugateTorus:
    vertex: str
    torus: int
    conjugator: PathWord
    tag: str = "ConjugateTorus"


@dataclass(frozen=True)
class ConjugateSeifertCentralizer:
    vertex: str
    conjugator: PathWord
    inner: VertexCentralizer
    tag: str = "ConjugateSeifertCentralizer"


CentralizerDesc = Union[Cyclic, ConjugateTorus, ConjugateSeifertCentralizer]


@dataclass(frozen=True)
class CyclicPair:
    z: PathWord
    exponents: tuple[int, int]
    complete: bool = True
    tag: str = "CyclicPair"


@dataclass(frozen=True)
class TorusCase:
    vertex: str
    torus: int
    conjugator: PathWord
    tag: str = "TorusCase"


@dataclass(frozen=True)
class SeifertCase:
    vertex: str
    conjugator: PathWord
    tag: str = "SeifertCase"


CommuteClass = Union[CyclicPair, TorusCase, SeifertCase]


@dataclass(frozen=True)
class MalnormalCertificate:
    kind: str  # "vertex" or "reduced"
    vertex: str
    torus: int
    g_local: PathWord  # g moved to a loop at the torus vertex
    x_local: PathWord
    conjugate: PathWord  # g x g^-1 at the torus vertex, as checked
    junction: Optional[int] = None


@dataclass(frozen=True)
class ConjugacyWitness:
    t: PathWord
    checked: int
    infinite: bool = True


# -- helpers ----------------------------------------------------------------------


def _require_nontrivial(x: PathWord) -> None:
    if is_trivial(x):
        raise TrivialElement("the identity element")


def _local(p: PathWord, v: str) -> PathWord:
    """Length-0 path at ``v`` for ``p``; ``p`` must reduce to it."""
    r = reduced(p)
    if r.length != 0:
        raise AssertionError("expected an element of a vertex group")
    return r


def commutes(x: PathWord, y: PathWord) -> bool:
    return equal(concat(x, y), concat(y, x))


def _cl_power(z: PathWord, y: PathWord, clz: int, cly: int) -> Optional[int]:
    """``n`` with ``z^n = y`` when ``cl(z) > 0``."""
    if cly % clz:
        return None
    n = cly // clz
    for cand in (n, -n):
        if equal(power(z, cand), y):
            return cand
    return None


# -- divisibility -----------------------------------------------------------------


def _rotation_roots(s: PathWord) -> tuple[int, PathWord]:
    """Largest ``n`` and a ``y`` with ``y^n = s`` for cyclically reduced ``s`` of positive length."""
    gog = s.gog
    l = s.length
    for n in range(l, 1, -1):
        if l % n:
            continue
        m = l // n
        if s.edges != s.edges[:m] * n:
            continue
        head = PathWord(gog, s.start, s.elems[:m] + (gog.vg(s.vertex(m)).identity(),), s.edges[:m])
        rest = PathWord(gog, s.vertex(m), s.elems[m:], s.edges[m:])
        rotated = concat(rest, head)
        z = vertex_conjugator(s, rotated)
        if z is None:
            continue
        y = concat(head, vertex_path(gog, s.start, z))
        if equal(power(y, n), s):
            return n, y
    return 1, s


def max_divisibility(x: PathWord) -> DivisibilityResult:
    """Largest ``n`` with ``x = y^n`` and such a root ``y``."""
    _require_nontrivial(x)
    gog = x.gog
    s, c = cyclic_reduce(x)
    if s.length > 0:
        n, y = _rotation_roots(s)
        root = reduced(conjugate(c, y))
        assert n <= s.length
        return DivisibilityResult(n, root, "ClBound", s.length)
    v = s.start
    vg = gog.vg(v)
    g = s.elems[0]
    md = vg.max_divisor(g)
    best_n, best_y, complete = md.d, vertex_path(gog, v, md.root), md.complete
    for e in gog.graph.out_edges(v):
        eb = gog.bar(e)
        k = vg.conj_into_torus(gog.edge_torus(eb), g)
        if k is None:
            continue
        a = gog.phi_inv(eb, vg.mul(vg.mul(vg.inv(k), g), k))
        if a is None:
            continue
        u = gog.terminus(e)
        ug = gog.vg(u)
        far = ug.max_divisor(gog.phi(e, a))
        complete = complete and far.complete
        if far.d > best_n:
            y = PathWord(gog, v, (k, far.root, vg.inv(k)), (e, eb))
            best_n, best_y = far.d, y
    bound = md.d * gog.seifert_bound()
    assert best_n <= bound, "divisibility bound violated"
    if not equal(power(best_y, best_n), s):
        raise AssertionError("root verification failed")
    root = reduced(conjugate(c, best_y))
    return DivisibilityResult(best_n, root, "VertexBound", bound, complete)


# -- commuting pairs ------------------------------------------------------------


def _fixed_vertex_walk(s1: PathWord, yp: PathWord) -> PathWord:
    """Prefix ``P`` of the geodesic towards ``Fix(yp)`` whose vertex both fix.

    ``s1`` is a length-0 loop at ``v`` and ``yp`` a commuting loop at ``v``
    with cyclic length 0.
    """
    gog = s1.gog
    r = reduced(yp)
    if r.length == 0:
        return vertex_path(gog, s1.start)
    _, c2 = cyclic_reduce(r)
    c2 = reduced(c2)
    best = vertex_path(gog, s1.start)
    for j in range(1, c2.length + 1):
        pre = PathWord(gog, c2.start, c2.elems[:j] + (gog.vg(c2.vertex(j)).identity(),), c2.edges[:j])
        if reduced(conjugate(invert(pre), s1)).length != 0:
            break
        best = pre
    return best


def _vertex_pair_class(gog, u: str, a, b, h: PathWord) -> CommuteClass:
    vg = gog.vg(u)
    for p, q in ((a, b), (b, a)):
        for i in range(len(vg.tori)):
            try:
                k = vg.conj_into_torus(i, p)
            except SearchExhausted:
                continue
            if k is None:
                continue
            if vg.peripheral_membership(i, vg.mul(vg.mul(vg.inv(k), q), k)) is not None:
                return TorusCase(u, i, reduced(concat(h, vertex_path(gog, u, k))))
    if vg.is_seifert:
        return SeifertCase(u, h)
    if vg.kind == "FreeAbelian":
        raise AssertionError("free abelian vertex with non-peripheral elements")
    for p, q, first in ((a, b, True), (b, a, False)):
        md = vg.max_divisor(p)
        e = vg.power_exponent(md.root, q)
        if e is not None:
            z = reduced(conjugate(h, vertex_path(gog, u, md.root)))
            exps = (md.d, e) if first else (e, md.d)
            return CyclicPair(z, exps, md.complete)
    raise SearchExhausted("no common root found within the word-length budget")


def classify_commuting(x: PathWord, y: PathWord) -> CommuteClass:
    _require_nontrivial(x)
    _require_nontrivial(y)
    if not commutes(x, y):
        raise NotCommuting("the elements do not commute")
    gog = x.gog
    sx, cx = cyclic_reduce(x)
    sy, cy = cyclic_reduce(y)
    if sx.length or sy.length:
        if sx.length == 0:
            x, y, sx, sy, swapped = y, x, sy, sx, True
        else:
            swapped = False
        md = max_divisibility(x)
        b = _cl_power(md.root, y, sx.length // md.max_n, sy.length)
        if b is None:
            raise AssertionError("commuting element is not a power of the primitive root")
        exps = (b, md.max_n) if swapped else (md.max_n, b)
        return CyclicPair(md.root, exps, md.complete)
    s1, c1 = sx, cx
    yp = reduced(conjugate(invert(c1), y))
    pre = _fixed_vertex_walk(s1, yp)
    h = reduced(concat(c1, pre))
    u = pre.end
    xa = _local(conjugate(invert(h), x), u).elems[0]
    ya = _local(conjugate(invert(h), y), u).elems[0]
    return _vertex_pair_class(gog, u, xa, ya, h)


# -- centralizers -------------------------------------------------------------------


def _vertex_desc(gog, v: str, g, c: PathWord) -> CentralizerDesc:
    vg = gog.vg(v)
    inner = vg.centralizer(g)
    if inner.kind == "torus":
        return ConjugateTorus(v, inner.torus, reduced(concat(c, vertex_path(gog, v, inner.conj))))
    if vg.is_seifert:
        return ConjugateSeifertCentralizer(v, c, inner)
    if vg.kind == "FreeAbelian":
        return ConjugateTorus(v, 0, c)
    gen = reduced(conjugate(c, vertex_path(gog, v, inner.gens[0])))
    return Cyclic(gen, inner.verified)


def centralizer(g: PathWord) -> CentralizerDesc:
    _require_nontrivial(g)
    gog = g.gog
    s, c = cyclic_reduce(g)
    if s.length > 0:
        md = max_divisibility(g)
        return Cyclic(md.root, md.complete)
    v = s.start
    vg = gog.vg(v)
    x = s.elems[0]
    hits = []
    for e in gog.graph.out_edges(v):
        eb = gog.bar(e)
        k = vg.conj_into_torus(gog.edge_torus(eb), x)
        if k is None:
            continue
        a = gog.phi_inv(eb, vg.mul(vg.mul(vg.inv(k), x), k))
        if a is not None:
            hits.append((e, k, a))
    if not hits:
        return _vertex_desc(gog, v, x, c)
    if vg.is_seifert and vg.fiber_exponent(x) is not None:
        return ConjugateSeifertCentralizer(v, c, VertexCentralizer("whole"))
    if vg.kind == "FreeAbelian":
        raise PreconditionError("torus vertices adjacent to edges are not supported")
    if len(hits) != 1:
        raise AssertionError("element lies in two edge tori without being a fiber")
    e, k, a = hits[0]
    u = gog.terminus(e)
    ug = gog.vg(u)
    far = gog.phi(e, a)
    cross = reduced(concat(c, PathWord(gog, v, (k, ug.identity()), (e,))))
    if ug.is_seifert and ug.fiber_exponent(far) is not None:
        return ConjugateSeifertCentralizer(u, cross, VertexCentralizer("whole"))
    return ConjugateTorus(v, gog.edge_torus(gog.bar(e)), reduced(concat(c, vertex_path(gog, v, k))))


def desc_contains(desc: CentralizerDesc, y: PathWord) -> bool:
    """Exact membership of the loop ``y`` in the subgroup ``desc`` describes."""
    gog = y.gog
    if isinstance(desc, Cyclic):
        z = desc.generator
        if is_trivial(y):
            return True
        sz, cz = cyclic_reduce(z)
        sy, _ = cyclic_reduce(y)
        if sz.length:
            return _cl_power(z, y, sz.length, sy.length) is not None
        yl = reduced(conjugate(invert(cz), y))
        if yl.length or yl.start != sz.start:
            return False
        n = gog.vg(sz.start).power_exponent(sz.elems[0], yl.elems[0])
        return n is not None
    conj = desc.conjugator
    yl = reduced(conjugate(invert(conj), y))
    if yl.length:
        return False
    vg = gog.vg(desc.vertex)
    if isinstance(desc, ConjugateTorus):
        return vg.peripheral_membership(desc.torus, yl.elems[0]) is not None
    return vg.centralizer_contains(desc.inner, yl.elems[0])


def desc_samples(desc: CentralizerDesc, radius: int = 2) -> list[PathWord]:
    """A few elements of the described subgroup, for soundness spot checks."""
    if isinstance(desc, Cyclic):
        return [power(desc.generator, n) for n in range(-3, 4)]
    gog = desc.conjugator.gog
    vg = gog.vg(desc.vertex)
    if isinstance(desc, ConjugateTorus):
        elems = [vg.torus_elem(desc.torus, (m, n)) for m in range(-2, 3) for n in range(-2, 3)]
    else:
        inner = desc.inner
        if inner.kind == "whole":
            elems = vg.ball(radius)
        else:
            elems = []
            gens = list(inner.gens) + ([vg.fiber()] if inner.kind == "cyclic" and vg.is_seifert else [])
            for g in gens:
                elems += [vg.power(g, n) for n in range(-2, 3)]
            if len(inner.gens) == 2:
                elems += [vg.mul(inner.gens[0], inner.gens[1]), vg.mul(vg.inv(inner.gens[0]), inner.gens[1])]
    return [reduced(conjugate(desc.conjugator, vertex_path(gog, desc.vertex, e))) for e in elems]


# -- malnormality and conjugacy classes ----------------------------------------------


def malnormal_peripheral_check(S: tuple[str, int], g: PathWord, x: PathWord) -> MalnormalCertificate:
    """Certify ``g x g^-1`` leaves the free boundary torus ``S`` of a hyperbolic vertex."""
    gog = g.gog
    w, i = S
    vg = gog.vg(w)
    if vg.kind != "Kleinian":
        raise PreconditionError("S must be a torus of a hyperbolic vertex")
    if (w, i) not in gog.free_tori():
        raise PreconditionError("S must be a boundary torus not used by an edge")
    bp = gog.base_path(w)
    xl = reduced(conjugate(bp, x))
    if xl.length or vg.peripheral_membership(i, xl.elems[0]) is None:
        raise PreconditionError("x is not in the boundary torus")
    if vg.is_identity(xl.elems[0]):
        raise PreconditionError("x is trivial")
    gl = reduced(conjugate(bp, g))
    if gl.length == 0 and vg.peripheral_membership(i, gl.elems[0]) is not None:
        raise PreconditionError("g lies in the boundary torus")
    if gl.length == 0:
        conj = vg.conj(gl.elems[0], xl.elems[0])
        if vg.peripheral_membership(i, conj) is not None:
            raise AssertionError("boundary torus is not malnormal in its vertex group")
        return MalnormalCertificate("vertex", w, i, gl, xl, vertex_path(gog, w, conj))
    raw = conjugate(gl, xl)
    l = gl.length
    mid = raw.elems[l]
    if gog.phi_inv(gl.edges[-1], mid) is not None:
        raise AssertionError("conjugated path is not reduced")
    return MalnormalCertificate("reduced", w, i, gl, xl, raw, junction=l)


def _candidate_conjugators(gog, radius: int = 1) -> list[PathWord]:
    out = []
    base = gog.base_vertex
    for v in sorted(gog.graph.vertices):
        bp = gog.base_path(v)
        vg = gog.vg(v)
        for name in vg.generator_names():
            out.append(reduced(conjugate(invert(bp), vertex_path(gog, v, vg.generator(name)))))
    for e in sorted(gog.graph.edges):
        o, t = gog.origin(e), gog.terminus(e)
        loop = concat(concat(invert(gog.base_path(o)), PathWord(gog, o, (gog.vg(o).identity(), gog.vg(t).identity()), (e,))), gog.base_path(t))
        if not is_trivial(loop):
            out.append(reduced(loop))
    prods = [reduced(concat(a, b)) for a in out for b in out]
    return [p for p in out + prods if p.start == base and not is_trivial(p)]


def conjugacy_class_infinite(g: PathWord, checks: int = 5) -> ConjugacyWitness:
    """An element ``t`` whose powers conjugate ``g`` to pairwise distinct elements."""
    gog = g.gog
    vs = gog.graph.vertices
    if len(vs) == 1 and not gog.graph.edges and gog.vg(vs[0]).is_seifert:
        raise PreconditionError("a single Seifert piece is excluded")
    _require_nontrivial(g)
    if g.start != gog.base_vertex:
        raise PathError("g must be a loop at the base vertex")
    for t in _candidate_conjugators(gog):
        if any(commutes(power(t, k), g) for k in range(1, checks + 1)):
            continue
        conjs = [reduced(conjugate(power(t, n), g)) for n in range(checks + 1)]
        if all(not equal(conjs[a], conjs[b]) for a in range(len(conjs)) for b in range(a)):
            return ConjugacyWitness(t, checks)
    raise SearchExhausted("no conjugator with distinct conjugates among the candidates")
