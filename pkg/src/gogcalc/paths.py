"""Path words in a graph of groups and the reduction calculus on them.

A path is ``(g0, e1, g1, ..., en, gn)`` with ``g0`` in the start vertex
group and ``gi`` in the group at the terminus of ``ei``.  Reduction applies
the relation ``e phi_e(a) bar(e) = phi_bar(e)(a)`` leftmost first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Optional

from .intlin import echelon, matvec, reduce_mod, solve_int

if TYPE_CHECKING:
    from .graph import GraphOfGroups


class PathError(ValueError):
    pass


class PathWord:
    __slots__ = ("gog", "start", "elems", "edges")

    def __init__(self, gog: "GraphOfGroups", start: str, elems: tuple, edges: tuple):
        if len(elems) != len(edges) + 1:
            raise PathError("a path needs one more vertex element than edges")
        self.gog = gog
        self.start = start
        self.elems = tuple(elems)
        self.edges = tuple(edges)

    # -- shape ------------------------------------------------------------
    @property
    def length(self) -> int:
        return len(self.edges)

    def vertex(self, i: int) -> str:
        """Vertex carrying ``elems[i]``."""
        return self.start if i == 0 else self.gog.terminus(self.edges[i - 1])

    @property
    def end(self) -> str:
        return self.vertex(self.length)

    @property
    def is_loop(self) -> bool:
        return self.start == self.end

    def check(self) -> None:
        """Raise PathError unless the path is well typed."""
        g = self.gog.graph
        if self.start not in g.vertices:
            raise PathError(f"unknown vertex {self.start}")
        at = self.start
        for i, e in enumerate(self.edges):
            if e not in g.origin:
                raise PathError(f"unknown edge {e}")
            if g.origin[e] != at:
                raise PathError(f"edge {e} does not start at {at}")
            at = g.terminus[e]
        for i, x in enumerate(self.elems):
            try:
                self.gog.vg(self.vertex(i)).check(x)
            except ValueError as exc:
                raise PathError(f"element {i}: {exc}") from exc

    # -- algebra ------------------------------------------------------------
    def __mul__(self, other: "PathWord") -> "PathWord":
        return concat(self, other)

    def inverse(self) -> "PathWord":
        return invert(self)

    def __eq__(self, other):
        return (
            isinstance(other, PathWord)
            and self.start == other.start
            and self.edges == other.edges
            and self.elems == other.elems
        )

    def __hash__(self):
        return hash((self.start, self.edges, self.elems))

    def __repr__(self):
        from .dsl import format_path

        return f"PathWord({format_path(self)!r})"


def vertex_path(gog: "GraphOfGroups", v: str, g=None) -> PathWord:
    if g is None:
        g = gog.vg(v).identity()
    return PathWord(gog, v, (g,), ())


def edge_path(gog: "GraphOfGroups", e: str) -> PathWord:
    o, t = gog.origin(e), gog.terminus(e)
    return PathWord(gog, o, (gog.vg(o).identity(), gog.vg(t).identity()), (e,))


def concat(p: PathWord, q: PathWord) -> PathWord:
    if p.end != q.start:
        raise PathError(f"endpoint mismatch: path ends at {p.end}, next starts at {q.start}")
    mid = p.gog.vg(p.end).mul(p.elems[-1], q.elems[0])
    return PathWord(p.gog, p.start, p.elems[:-1] + (mid,) + q.elems[1:], p.edges + q.edges)


def invert(p: PathWord) -> PathWord:
    gog = p.gog
    elems = tuple(gog.vg(p.vertex(i)).inv(p.elems[i]) for i in range(p.length, -1, -1))
    edges = tuple(gog.bar(e) for e in reversed(p.edges))
    return PathWord(gog, p.end, elems, edges)


def power(p: PathWord, n: int) -> PathWord:
    if not p.is_loop:
        raise PathError("powers need a loop")
    if n < 0:
        p, n = invert(p), -n
    out = vertex_path(p.gog, p.start)
    for _ in range(n):
        out = concat(out, p)
    return out


def product(*ps: PathWord) -> PathWord:
    out = ps[0]
    for q in ps[1:]:
        out = concat(out, q)
    return out


def conjugate(c: PathWord, s: PathWord) -> PathWord:
    """``c * s * c^-1``."""
    return concat(concat(c, s), invert(c))


# -- reduction ----------------------------------------------------------------


@dataclass(frozen=True)
class ReductionStep:
    """Edges ``index`` and ``index+1`` (1-based) backtrack around ``phi_e(witness)``."""

    index: int
    edge: str
    witness: tuple[int, int]
    replacement: Any


@dataclass
class ReductionTrace:
    steps: list[ReductionStep]

    def __len__(self) -> int:
        return len(self.steps)


def _find_pinch(gog, elems, edges, lo: int = 1) -> Optional[tuple[int, tuple[int, int]]]:
    for i in range(max(lo, 1), len(edges)):
        e = edges[i - 1]
        if edges[i] == gog.bar(e):
            a = gog.phi_inv(e, elems[i])
            if a is not None:
                return i, a
    return None


def reduce(p: PathWord, trace: bool = True) -> tuple[PathWord, Optional[ReductionTrace]]:
    gog = p.gog
    elems, edges = list(p.elems), list(p.edges)
    steps: Optional[list] = [] if trace else None
    lo = 1
    while True:
        hit = _find_pinch(gog, elems, edges, lo)
        if hit is None:
            break
        i, a = hit
        e = edges[i - 1]
        v = p.start if i == 1 else gog.terminus(edges[i - 2])
        vg = gog.vg(v)
        new = vg.mul(vg.mul(elems[i - 1], gog.phi(gog.bar(e), a)), elems[i + 1])
        if steps is not None:
            steps.append(ReductionStep(i, e, a, new))
        elems[i - 1 : i + 2] = [new]
        del edges[i - 1 : i + 1]
        lo = i - 1
    out = PathWord(gog, p.start, tuple(elems), tuple(edges))
    return out, (ReductionTrace(steps) if steps is not None else None)


def reduced(p: PathWord) -> PathWord:
    return reduce(p, trace=False)[0]


def is_reduced(p: PathWord) -> bool:
    return _find_pinch(p.gog, p.elems, p.edges) is None


def length(p: PathWord) -> int:
    return p.length


def elem_length(p: PathWord) -> int:
    return reduced(p).length


def equal(p: PathWord, q: PathWord) -> bool:
    if p.start != q.start or p.end != q.end:
        raise PathError("paths with different endpoints cannot be compared")
    r = reduced(concat(p, invert(q)))
    return r.length == 0 and p.gog.vg(r.start).is_identity(r.elems[0])


def is_trivial(p: PathWord) -> bool:
    r = reduced(p)
    return r.length == 0 and p.gog.vg(r.start).is_identity(r.elems[0])


# -- cyclic reduction ---------------------------------------------------------


def _require_loop(p: PathWord) -> None:
    if not p.is_loop:
        raise PathError("not a loop")


def _wraps(p: PathWord) -> Optional[tuple[int, int]]:
    """Edge coordinates ``a`` if the reduced loop ``p`` pinches across its ends."""
    n = p.length
    if n < 2 or p.edges[0] != p.gog.bar(p.edges[-1]):
        return None
    vg = p.gog.vg(p.start)
    return p.gog.phi_inv(p.edges[-1], vg.mul(p.elems[-1], p.elems[0]))


def is_cyclically_reduced(p: PathWord) -> bool:
    """Reduced, and no cancellation across the ends of the loop.

    The end condition is membership of ``g_n g_0`` in the image of
    ``phi_{e_n}`` when ``e_1 = bar(e_n)``; see the decisions notes for why
    membership (not conjugacy into the image) is the right test.
    """
    _require_loop(p)
    return is_reduced(p) and _wraps(p) is None


def cyclic_reduce(p: PathWord) -> tuple[PathWord, PathWord]:
    """``(s, conj)`` with ``s`` cyclically reduced and ``p = conj * s * conj^-1``."""
    _require_loop(p)
    gog = p.gog
    s = reduced(p)
    conj = vertex_path(gog, p.start)
    while True:
        a = _wraps(s)
        if a is None:
            return s, conj
        en = s.edges[-1]
        e1 = s.edges[0]
        w = PathWord(gog, s.start, (s.elems[0], gog.vg(gog.terminus(e1)).identity()), (e1,))
        u = gog.vertex_groups[s.vertex(s.length - 1)]
        last = u.mul(s.elems[-2], gog.phi(gog.bar(en), a))
        inner = PathWord(gog, s.vertex(1), s.elems[1:-2] + (last,), s.edges[1:-1])
        s = reduced(inner)
        conj = concat(conj, w)


def cyclic_length(p: PathWord) -> int:
    return cyclic_reduce(p)[0].length


def rebase(p: PathWord, w: Optional[str] = None) -> PathWord:
    """Move a loop at ``w`` to a loop at the base vertex along the stored base path."""
    _require_loop(p)
    if w is None:
        w = p.start
    if p.start != w:
        raise PathError(f"loop is based at {p.start}, not {w}")
    bp = p.gog.base_path(w)
    return concat(concat(invert(bp), p), bp)


# -- canonical normal form -------------------------------------------------


def normal_form(p: PathWord) -> PathWord:
    """Unique representative: reduce, then push coset representatives right."""
    gog = p.gog
    r = reduced(p)
    elems = list(r.elems)
    for i, e in enumerate(r.edges):
        v = r.vertex(i)
        vg = gog.vg(v)
        eb = gog.bar(e)
        em = gog.edge_maps[eb]
        rep, coords = vg.coset_rep(em.target_torus, elems[i])
        cols = [(em.matrix[0][0], em.matrix[1][0]), (em.matrix[0][1], em.matrix[1][1])]
        res, _ = reduce_mod(coords, echelon(cols))
        diff = (coords[0] - res[0], coords[1] - res[1])
        sol = solve_int([list(em.matrix[0]), list(em.matrix[1])], diff, 2)
        assert sol is not None
        a = sol[0]
        elems[i] = vg.mul(rep, vg.torus_elem(em.target_torus, res))
        nxt = gog.vg(r.vertex(i + 1))
        elems[i + 1] = nxt.mul(gog.phi(e, a), elems[i + 1])
    return PathWord(gog, r.start, tuple(elems), r.edges)


def canonical_key(p: PathWord) -> tuple:
    nf = normal_form(p)
    return (nf.start, nf.edges, nf.elems)


# -- conjugators inside a vertex group ---------------------------------------


def vertex_conjugator(s: PathWord, t: PathWord):
    """Some ``z`` in the start vertex group with ``z s z^-1 = t``, or None.

    ``s`` and ``t`` are reduced loops of positive length with the same edge
    sequence.  Such a ``z`` exists iff edge-group elements ``c_1..c_l`` carry
    ``z*s`` onto ``t*z``; those are solved for one vertex at a time as
    affine lattices.
    """
    gog = s.gog
    if s.edges != t.edges or s.start != t.start or not s.edges:
        raise PathError("vertex conjugator needs loops with the same edge sequence")
    E, g, h = s.edges, s.elems, t.elems
    l = len(E)

    def mat(e):
        return gog.edge_maps[e].matrix

    # c_1 = P1 + B1 u and the current c_i = Pc + Bc u, for a free u in Z^k
    k = 2
    P1, B1 = (0, 0), ((1, 0), (0, 1))
    Pc, Bc = P1, B1
    for i in range(1, l):
        v = gog.terminus(E[i - 1])
        vg = gog.vg(v)
        sol = vg.torus_coset_solve(gog.edge_torus(E[i - 1]), vg.inv(h[i]), g[i], gog.edge_torus(gog.bar(E[i])))
        if sol is None:
            return None
        M, M2 = mat(E[i - 1]), mat(gog.bar(E[i]))
        MB = [[sum(M[r][q] * Bc[q][j] for q in range(2)) for j in range(k)] for r in range(2)]
        MP = matvec(M, Pc)
        rr = len(sol.lattice)
        A, b = [], []
        for row in range(2):
            A.append(MB[row] + [-sol.lattice[w][row] for w in range(rr)] + [0, 0])
            b.append(sol.t0[row] - MP[row])
        for row in range(2):
            A.append([0] * k + [-sol.images[w][row] for w in range(rr)] + [M2[row][0], M2[row][1]])
            b.append(sol.y0[row])
        res = solve_int(A, b, k + rr + 2)
        if res is None:
            return None
        x0, K = res
        u0 = x0[:k]
        Ku = [[vec[j] for vec in K] for j in range(k)]  # k x len(K)
        P1 = tuple(P1[r] + sum(B1[r][j] * u0[j] for j in range(k)) for r in range(2))
        B1 = tuple(tuple(sum(B1[r][j] * Ku[j][z] for j in range(k)) for z in range(len(K))) for r in range(2))
        Pc = (x0[k + rr], x0[k + rr + 1])
        Bc = tuple(tuple(vec[k + rr + r] for vec in K) for r in range(2))
        k = len(K)
    w = s.start
    vg = gog.vg(w)
    sol = vg.torus_coset_solve(
        gog.edge_torus(E[-1]),
        vg.inv(vg.mul(h[-1], h[0])),
        vg.mul(g[-1], g[0]),
        gog.edge_torus(gog.bar(E[0])),
    )
    if sol is None:
        return None
    M, M1 = mat(E[-1]), mat(gog.bar(E[0]))
    rr = len(sol.lattice)
    MB = [[sum(M[r][q] * Bc[q][j] for q in range(2)) for j in range(k)] for r in range(2)]
    MP = matvec(M, Pc)
    M1B = [[sum(M1[r][q] * B1[q][j] for q in range(2)) for j in range(k)] for r in range(2)]
    M1P = matvec(M1, P1)
    A, b = [], []
    for row in range(2):
        A.append(MB[row] + [-sol.lattice[x][row] for x in range(rr)])
        b.append(sol.t0[row] - MP[row])
    for row in range(2):
        A.append(M1B[row] + [-sol.images[x][row] for x in range(rr)])
        b.append(sol.y0[row] - M1P[row])
    res = solve_int(A, b, k + rr) if k + rr else None
    if k + rr == 0:
        ok = all(x == 0 for x in b)
        u0: tuple = ()
        if not ok:
            return None
    else:
        if res is None:
            return None
        u0 = res[0][:k]
    c1 = tuple(P1[r] + sum(B1[r][j] * u0[j] for j in range(k)) for r in range(2))
    z = vg.prod(h[0], gog.phi(gog.bar(E[0]), c1), vg.inv(g[0]))
    zp = vertex_path(gog, w, z)
    if not equal(conjugate(zp, s), t):
        raise AssertionError("vertex conjugator failed verification")
    return z
