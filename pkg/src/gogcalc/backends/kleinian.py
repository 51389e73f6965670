"""Cusped hyperbolic vertex groups as matrix groups over a quadratic ring.

Elements are matrices in SL(2, Z[tau]) together with the generator word
that produced them.  Equality is matrix equality; that this agrees with
equality in the abstract group is an assumption of each preset (the
representation is faithful), checked only through its consequences.
"""

from __future__ import annotations

import cmath
from math import floor, gcd
from typing import Optional, Sequence

from ..intlin import solve2_int, solve2_rational
from ..quadint import QuadInt, Ring
from .base import (
    BackendError,
    CosetSolution,
    IdentityElement,
    MaxDivisor,
    SearchExhausted,
    Torus,
    VertexCentralizer,
    VertexGroup,
)

Mat = tuple  # 8 ints: (m00, m01, m10, m11) each as an (a, b) pair

PARABOLIC = "Parabolic"
LOXODROMIC = "Loxodromic"
ELLIPTIC = "Elliptic"
IDENTITYISH = "Identityish"


class KleinianElem:
    __slots__ = ("matrix", "word")

    def __init__(self, matrix: Mat, word: tuple = ()):
        self.matrix = matrix
        self.word = word

    def __eq__(self, other):
        return isinstance(other, KleinianElem) and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def __repr__(self):
        return f"KleinianElem({self.matrix}, word={self.word})"


def _reduce_word(x: tuple, y: tuple) -> tuple:
    n = 0
    while n < len(x) and n < len(y) and x[-1 - n] == -y[n]:
        n += 1
    return x[: len(x) - n] + y[n:]


class Kleinian(VertexGroup):
    """A finitely generated matrix group with declared cusp subgroups.

    ``generators`` maps names to 2x2 matrices whose entries are ``(a, b)``
    pairs meaning ``a + b*tau``.  Each cusp is ``(mu_word, lambda_word, P)``
    where ``P`` conjugates the cusp subgroup into upper-triangular form.
    """

    kind = "Kleinian"

    def __init__(
        self,
        ring: Ring,
        generators: dict,
        relators: Sequence[Sequence[tuple[str, int]]] = (),
        cusps: Sequence = (),
        budget: int = 8,
        name: str = "",
    ):
        self.ring = ring
        self.name = name
        self.budget = budget
        self._p, self._q = ring.p, ring.q
        self._names = list(generators)
        self._gens = {}
        for k, (nm, M) in enumerate(generators.items()):
            flat = tuple(c for row in M for entry in row for c in entry)
            if len(flat) != 8:
                raise BackendError(f"generator {nm} is not a 2x2 matrix over the ring")
            if self._det(flat) != (1, 0):
                raise BackendError(f"generator {nm} does not have determinant 1")
            self._gens[nm] = KleinianElem(flat, (k + 1,))
        self.generator_matrices = {nm: M for nm, M in generators.items()}
        self.relators = [list(r) for r in relators]
        for r in self.relators:
            if not self.is_identity(self.from_word(r)):
                raise BackendError("preset relation does not hold")
        self.cusp_words = []
        self._P = []
        self._Pinv = []
        self._trans = []
        self._signs = []
        self.tori = []
        for k, (mu_w, la_w, P) in enumerate(cusps):
            mu, la = self.from_word(mu_w), self.from_word(la_w)
            Pflat = tuple(c for row in P for entry in row for c in entry)
            if self._det(Pflat) != (1, 0):
                raise BackendError("cusp conjugator must have determinant 1")
            Pinv = self._inv(Pflat)
            trans, signs = [], []
            for g in (mu, la):
                if self.trace_classify(g) != PARABOLIC:
                    raise BackendError("peripheral basis element is not parabolic")
                N = self._mm(self._mm(Pflat, g.matrix), Pinv)
                if N[4:6] != (0, 0) or N[0:2] != N[6:8] or N[0:2] not in ((1, 0), (-1, 0)):
                    raise BackendError("cusp conjugator does not make the basis upper triangular")
                s = N[0]
                trans.append((N[2] * s, N[3] * s))
                signs.append(s)
            if trans[0][0] * trans[1][1] - trans[0][1] * trans[1][0] == 0:
                raise BackendError("peripheral translations are not independent")
            if not self.commute(mu, la):
                raise BackendError("peripheral basis elements do not commute")
            self.cusp_words.append((list(mu_w), list(la_w), P))
            self._P.append(Pflat)
            self._Pinv.append(Pinv)
            self._trans.append(tuple(trans))
            self._signs.append(tuple(signs))
            self.tori.append(Torus(f"T{k}", (mu, la)))
        self._spheres: list[list[KleinianElem]] = []
        self._seen: dict = {}
        self._orbits: list[dict] = []
        self._orbit_radius = -1
        self._root_cache: dict = {}
        self._axes: Optional[dict] = None
        self._axes_radius = -1

    # -- matrix arithmetic ----------------------------------------------
    def _qm(self, a, b, c, d):
        bd = b * d
        return a * c - self._q * bd, a * d + b * c - self._p * bd

    def _mm(self, X: Mat, Y: Mat) -> Mat:
        x0, x1, x2, x3, x4, x5, x6, x7 = X
        y0, y1, y2, y3, y4, y5, y6, y7 = Y
        qm = self._qm
        a, b = qm(x0, x1, y0, y1)
        c, d = qm(x2, x3, y4, y5)
        e, f = qm(x0, x1, y2, y3)
        g, h = qm(x2, x3, y6, y7)
        i, j = qm(x4, x5, y0, y1)
        k, l = qm(x6, x7, y4, y5)
        m, n = qm(x4, x5, y2, y3)
        o, p = qm(x6, x7, y6, y7)
        return (a + c, b + d, e + g, f + h, i + k, j + l, m + o, n + p)

    @staticmethod
    def _inv(X: Mat) -> Mat:
        x0, x1, x2, x3, x4, x5, x6, x7 = X
        return (x6, x7, -x2, -x3, -x4, -x5, x0, x1)

    def _det(self, X: Mat):
        a, b = self._qm(X[0], X[1], X[6], X[7])
        c, d = self._qm(X[2], X[3], X[4], X[5])
        return a - c, b - d

    def _entry(self, X: Mat, k: int) -> QuadInt:
        return QuadInt(self.ring, X[2 * k], X[2 * k + 1])

    def entries(self, g: KleinianElem) -> list[list[QuadInt]]:
        return [[self._entry(g.matrix, 0), self._entry(g.matrix, 1)],
                [self._entry(g.matrix, 2), self._entry(g.matrix, 3)]]

    # -- group structure -------------------------------------------------
    _I = (1, 0, 0, 0, 0, 0, 1, 0)

    def identity(self):
        return KleinianElem(self._I, ())

    def is_identity(self, g) -> bool:
        return g.matrix == self._I

    def mul(self, g, h):
        return KleinianElem(self._mm(g.matrix, h.matrix), _reduce_word(g.word, h.word))

    def inv(self, g):
        return KleinianElem(self._inv(g.matrix), tuple(-x for x in reversed(g.word)))

    def check(self, g) -> None:
        if not isinstance(g, KleinianElem) or len(g.matrix) != 8:
            raise BackendError(f"not a matrix element: {g!r}")
        if self._det(g.matrix) != (1, 0):
            raise BackendError("matrix does not have determinant 1")

    def generator_names(self) -> list[str]:
        return list(self._names)

    def generator(self, name: str):
        if name not in self._gens:
            raise BackendError(f"unknown generator {name!r}")
        return self._gens[name]

    def format(self, g) -> str:
        parts = []
        w = g.word
        t = 0
        while t < len(w):
            x = w[t]
            run = 1
            while t + run < len(w) and w[t + run] == x:
                run += 1
            e = run if x > 0 else -run
            parts.append(self._names[abs(x) - 1] + ("" if e == 1 else f"^{e}"))
            t += run
        return " ".join(parts) if parts else "1"

    def from_matrix(self, M) -> KleinianElem:
        """Element for an explicit matrix, with a word found by ball search."""
        flat = tuple(c for row in M for entry in row for c in entry)
        self._grow(self.budget)
        hit = self._seen.get(flat)
        if hit is None:
            raise SearchExhausted("matrix not reached within the word-length budget")
        return hit

    # -- enumeration -----------------------------------------------------
    def _grow(self, radius: int) -> None:
        if not self._spheres:
            e = self.identity()
            self._spheres.append([e])
            self._seen[e.matrix] = e
        letters = [self._gens[n] for n in self._names] + [self.inv(self._gens[n]) for n in self._names]
        while len(self._spheres) <= radius:
            nxt = []
            for g in self._spheres[-1]:
                for s in letters:
                    if g.word and g.word[-1] == -s.word[0]:
                        continue
                    h = self.mul(g, s)
                    if h.matrix not in self._seen:
                        self._seen[h.matrix] = h
                        nxt.append(h)
            self._spheres.append(nxt)

    def ball(self, radius: int) -> list:
        self._grow(radius)
        return [g for s in self._spheres[: radius + 1] for g in s]

    def complexity(self, g) -> int:
        self._grow(min(self.budget, max(len(g.word), 0)))
        hit = self._seen.get(g.matrix)
        if hit is not None:
            return len(hit.word)
        return len(g.word)

    def shortest(self, g) -> KleinianElem:
        """Same element with the shortest word known."""
        hit = self._seen.get(g.matrix)
        return hit if hit is not None and len(hit.word) <= len(g.word) else g

    # -- classification --------------------------------------------------
    def trace(self, g) -> QuadInt:
        return self._entry(g.matrix, 0) + self._entry(g.matrix, 3)

    def trace_classify(self, g) -> str:
        M = g.matrix
        if M in (self._I, (-1, 0, 0, 0, 0, 0, -1, 0)):
            return IDENTITYISH
        t = self.trace(g)
        if t == 2 or t == -2:
            return PARABOLIC
        if t.b != 0 and self.ring.imaginary:
            return LOXODROMIC
        disc = t * t - 4
        if disc.sign_real() > 0:
            return LOXODROMIC
        return ELLIPTIC

    # -- points on the sphere at infinity ---------------------------------
    def _act(self, M: Mat, x):
        a, b, c, d = (self._entry(M, k) for k in range(4))
        if x is None:
            return None if not c else a / c
        num, den = a * x + b, c * x + d
        return None if not den else num / den

    def cusp_point(self, i: int):
        """The fixed point of cusp ``i``; ``None`` stands for infinity."""
        return self._act(self._Pinv[i], None)

    def fixed_point(self, g):
        a, b, c, d = (self._entry(g.matrix, k) for k in range(4))
        if not c:
            return None
        return (a - d) / (c * 2)

    def _orbit_tables(self) -> list[dict]:
        if self._orbit_radius < self.budget:
            self._orbits = []
            for i in range(len(self.tori)):
                table: dict = {}
                pt = self.cusp_point(i)
                for k in self.ball(self.budget):
                    table.setdefault(self._act(k.matrix, pt), k)
                self._orbits.append(table)
            self._orbit_radius = self.budget
        return self._orbits

    # -- peripheral structure --------------------------------------------
    def _translation(self, i: int, g) -> Optional[tuple[int, tuple]]:
        N = self._mm(self._mm(self._P[i], g.matrix), self._Pinv[i])
        if N[4:6] != (0, 0) or N[0:2] != N[6:8] or N[0:2] not in ((1, 0), (-1, 0)):
            return None
        s = N[0]
        return s, (N[2] * s, N[3] * s)

    def peripheral_membership(self, i: int, g) -> Optional[tuple[int, int]]:
        tr = self._translation(i, g)
        if tr is None:
            return None
        s, y = tr
        (ma, mb), (la, lb) = self._trans[i]
        mn = solve2_int(((ma, la), (mb, lb)), y)
        if mn is None:
            return None
        sm, sl = self._signs[i]
        if sm ** (mn[0] % 2) * sl ** (mn[1] % 2) != s:
            return None
        return mn

    def _lattice_coords(self, i: int, z: QuadInt):
        (ma, mb), (la, lb) = self._trans[i]
        return solve2_rational(((ma, la), (mb, lb)), (z.a, z.b))

    def coset_rep(self, i: int, g):
        N = self._mm(self._mm(self._P[i], g.matrix), self._Pinv[i])
        n11, n12, n21, n22 = (self._entry(N, k) for k in range(4))
        zeta = n22 / n21 if n21 else n12 / n11
        r1, r2 = self._lattice_coords(i, zeta)
        m, n = floor(r1), floor(r2)
        rep = self.mul(g, self.torus_elem(i, (-m, -n)))
        return rep, (m, n)

    def conj_into_torus(self, i: int, g):
        if self.is_identity(g):
            return self.identity()
        cls = self.trace_classify(g)
        if cls != PARABOLIC:
            return None
        fp = self.fixed_point(g)
        for j, table in enumerate(self._orbit_tables()):
            k = table.get(fp, False)
            if k is False:
                continue
            if j != i:
                return None
            conj = self.mul(self.mul(self.inv(k), g), k)
            if self.peripheral_membership(i, conj) is None:
                raise AssertionError("cusp subgroup is not the full stabilizer of its fixed point")
            return k
        raise SearchExhausted("no conjugator into a cusp within the word-length budget")

    def torus_coset_solve(self, i: int, a, b, j: int) -> Optional[CosetSolution]:
        A = self._mm(self._mm(self._P[j], a.matrix), self._Pinv[i])
        B = self._mm(self._mm(self._P[i], b.matrix), self._Pinv[j])
        a21, a22 = self._entry(A, 2), self._entry(A, 3)
        b11, b21 = self._entry(B, 0), self._entry(B, 2)
        const = a21 * b11 + a22 * b21
        slope = a21 * b21
        binv = self.inv(b)
        if slope:
            y = -const / slope
            r = self._lattice_coords(i, y)
            if r[0].denominator != 1 or r[1].denominator != 1:
                return None
            t0 = (int(r[0]), int(r[1]))
            y0 = self.peripheral_membership(j, self.prod(a, self.torus_elem(i, t0), b))
            if y0 is None:
                return None
            return CosetSolution(t0, (), (), y0)
        if const:
            return None
        y0 = self.peripheral_membership(j, self.mul(a, b))
        if y0 is None:
            return None
        mu, la = self.tori[i].basis
        images = tuple(self.peripheral_membership(j, self.prod(binv, x, b)) for x in (mu, la))
        if None in images:
            raise AssertionError("cusp subgroup is not the full stabilizer of its fixed point")
        return CosetSolution((0, 0), ((1, 0), (0, 1)), images, y0)

    def torus_intersection(self, i: int, g, j: int) -> dict:
        if i == j and self.peripheral_membership(i, g) is not None:
            return {"kind": "whole", "torus": i}
        moved = self._act(g.matrix, self.cusp_point(j))
        if moved == self.cusp_point(i):
            raise AssertionError("distinct cusp subgroups share a fixed point")
        return {"kind": "trivial", "fixed_points": [str(self.cusp_point(i)), str(moved)]}

    # -- centralizers and roots ------------------------------------------
    def _log_eigen(self, g) -> float:
        t = complex(self.trace(g))
        lam = (t + cmath.sqrt(t * t - 4)) / 2
        return abs(cmath.log(lam).real) if abs(lam) != 0 else 0.0

    def _parabolic_data(self, g):
        for i in range(len(self.tori)):
            k = self.conj_into_torus(i, g)
            if k is not None:
                coords = self.peripheral_membership(i, self.mul(self.mul(self.inv(k), g), k))
                return i, k, coords
        raise AssertionError("parabolic element is not conjugate into any cusp")

    def _axis_key(self, M: Mat):
        """Projective class of the traceless part; commuting matrices share it."""
        d = self._entry(M, 0) - self._entry(M, 3)
        b, c = self._entry(M, 1), self._entry(M, 2)
        lead = next((x for x in (b, c, d) if x), None)
        if lead is None:
            return None
        return tuple((x / lead) for x in (b, c, d))

    def _axis_table(self) -> dict:
        if self._axes_radius < self.budget:
            table: dict = {}
            for y in self.ball(self.budget):
                key = self._axis_key(y.matrix)
                if key is not None:
                    table.setdefault(key, []).append(y)
            self._axes = table
            self._axes_radius = self.budget
        return self._axes

    def _loxodromic_root(self, g) -> tuple[int, KleinianElem]:
        hit = self._root_cache.get(g.matrix)
        if hit is not None:
            return hit
        best = (1, g)
        lg = self._log_eigen(g)
        for y in self._axis_table().get(self._axis_key(g.matrix), ()):
            if not self.commute(y, g):
                continue
            ly = self._log_eigen(y)
            if ly <= 0:
                continue
            n = round(lg / ly)
            if n <= best[0]:
                continue
            for s in (n, -n):
                if self.power(y, s) == g:
                    best = (n, self.power(y, s // n))
                    break
        self._root_cache[g.matrix] = best
        return best

    def centralizer(self, g) -> VertexCentralizer:
        if self.is_identity(g):
            raise IdentityElement("centralizer of the identity")
        cls = self.trace_classify(g)
        if cls == PARABOLIC:
            i, k, _ = self._parabolic_data(g)
            return VertexCentralizer("torus", gens=self.tori[i].basis, torus=i, conj=k)
        if cls != LOXODROMIC:
            raise BackendError(f"{cls} element in a torsion-free vertex group")
        _, root = self._loxodromic_root(g)
        return VertexCentralizer("cyclic", gens=(root,), verified=False)

    def centralizer_contains(self, desc: VertexCentralizer, y) -> bool:
        if desc.kind == "torus":
            return self.peripheral_membership(desc.torus, self.mul(self.mul(self.inv(desc.conj), y), desc.conj)) is not None
        return self.commute(y, desc.gens[0])

    def max_divisor(self, g) -> MaxDivisor:
        if self.is_identity(g):
            raise IdentityElement("divisibility of the identity")
        cls = self.trace_classify(g)
        if cls == PARABOLIC:
            i, k, (m, n) = self._parabolic_data(g)
            d = gcd(m, n)
            return MaxDivisor(d, self.conj(k, self.torus_elem(i, (m // d, n // d))))
        if cls != LOXODROMIC:
            raise BackendError(f"{cls} element in a torsion-free vertex group")
        d, root = self._loxodromic_root(g)
        return MaxDivisor(d, root, complete=False)

    def power_exponent(self, root, g) -> Optional[int]:
        if self.is_identity(root):
            return 0 if self.is_identity(g) else None
        if self.is_identity(g):
            return 0
        if not self.commute(root, g):
            return None
        cls = self.trace_classify(root)
        if cls == PARABOLIC:
            i, k, rc = self._parabolic_data(root)
            gc = self.peripheral_membership(i, self.mul(self.mul(self.inv(k), g), k))
            if gc is None:
                return None
            ix = 0 if rc[0] else 1
            if gc[ix] % rc[ix]:
                return None
            n = gc[ix] // rc[ix]
            return n if (n * rc[0], n * rc[1]) == gc else None
        lr, lg = self._log_eigen(root), self._log_eigen(g)
        n = round(lg / lr) if lr > 0 else 0
        for cand in (n, -n, n + 1, -n - 1, n - 1, -n + 1):
            if cand and self.power(root, cand) == g:
                return cand
        return None

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "name": self.name,
            "ring": [self.ring.p, self.ring.q],
            "generators": {k: [[list(e) for e in row] for row in M] for k, M in self.generator_matrices.items()},
            "relators": self.relators,
            "cusps": [[mu, la, [[list(e) for e in row] for row in P]] for mu, la, P in self.cusp_words],
            "budget": self.budget,
        }
