from __future__ import annotations

import itertools
from math import gcd
from typing import Optional, Sequence

from ..intlin import echelon, reduce_mod, solve_int
from .base import (
    BackendError,
    CosetSolution,
    IdentityElement,
    MaxDivisor,
    Torus,
    VertexCentralizer,
    VertexGroup,
)


class FreeAbelian(VertexGroup):
    """``Z^n`` with coordinate-vector elements.

    ``tori`` are rank-two sublattices given by basis vectors.  With no
    explicit tori, a rank-two group gets the whole group as its only torus.
    """

    kind = "FreeAbelian"

    def __init__(self, rank: int = 2, tori: Optional[Sequence[Sequence[Sequence[int]]]] = None):
        if rank < 1:
            raise BackendError("rank must be positive")
        self.rank = rank
        if tori is None:
            if rank != 2:
                raise BackendError("give explicit tori for rank other than 2")
            tori = [((1, 0), (0, 1))]
        self.tori = []
        for k, (u, v) in enumerate(tori):
            u, v = tuple(u), tuple(v)
            if len(u) != rank or len(v) != rank:
                raise BackendError("torus basis has the wrong rank")
            if len(echelon([u, v])) != 2:
                raise BackendError("torus basis is not independent")
            self.tori.append(Torus(f"T{k}", (u, v)))
        self._ech = [echelon(t.basis) for t in self.tori]

    def identity(self):
        return (0,) * self.rank

    def check(self, g) -> None:
        if not (isinstance(g, tuple) and len(g) == self.rank and all(isinstance(x, int) for x in g)):
            raise BackendError(f"not an element of Z^{self.rank}: {g!r}")

    def mul(self, g, h):
        return tuple(a + b for a, b in zip(g, h))

    def inv(self, g):
        return tuple(-a for a in g)

    def power(self, g, n: int):
        return tuple(n * a for a in g)

    def commute(self, g, h) -> bool:
        return True

    def generator_names(self) -> list[str]:
        return [f"z{i + 1}" for i in range(self.rank)]

    def generator(self, name: str):
        names = self.generator_names()
        if name not in names:
            raise BackendError(f"unknown generator {name!r}")
        i = names.index(name)
        return tuple(int(j == i) for j in range(self.rank))

    def format(self, g) -> str:
        parts = [f"z{i + 1}^{a}" for i, a in enumerate(g) if a]
        return " ".join(parts) if parts else "1"

    def complexity(self, g) -> int:
        return sum(abs(a) for a in g)

    def ball(self, radius: int) -> list:
        out = []
        rng = range(-radius, radius + 1)
        for v in itertools.product(rng, repeat=self.rank):
            if sum(abs(a) for a in v) <= radius:
                out.append(tuple(v))
        out.sort(key=lambda v: (self.complexity(v), v))
        return out

    def torus_elem(self, i: int, coords: Sequence[int]):
        u, v = self.tori[i].basis
        return tuple(coords[0] * a + coords[1] * b for a, b in zip(u, v))

    def peripheral_membership(self, i: int, g) -> Optional[tuple[int, int]]:
        u, v = self.tori[i].basis
        A = [[u[r], v[r]] for r in range(self.rank)]
        sol = solve_int(A, g, 2)
        if sol is None:
            return None
        return sol[0][0], sol[0][1]

    def coset_rep(self, i: int, g):
        rep, _ = reduce_mod(g, self._ech[i])
        coords = self.peripheral_membership(i, tuple(a - b for a, b in zip(g, rep)))
        return rep, coords

    def conj_into_torus(self, i: int, g):
        return self.identity() if self.peripheral_membership(i, g) is not None else None

    def torus_coset_solve(self, i: int, a, b, j: int) -> Optional[CosetSolution]:
        ui, vi = self.tori[i].basis
        uj, vj = self.tori[j].basis
        # ui*m + vi*n - uj*m2 - vj*n2 = -(a + b)
        A = [[ui[r], vi[r], -uj[r], -vj[r]] for r in range(self.rank)]
        rhs = [-(x + y) for x, y in zip(a, b)]
        sol = solve_int(A, rhs, 4)
        if sol is None:
            return None
        x0, kernel = sol
        return CosetSolution(
            t0=(x0[0], x0[1]),
            lattice=tuple((k[0], k[1]) for k in kernel),
            images=tuple((k[2], k[3]) for k in kernel),
            y0=(x0[2], x0[3]),
        )

    def centralizer(self, g) -> VertexCentralizer:
        if self.is_identity(g):
            raise IdentityElement("centralizer of the identity")
        return VertexCentralizer("whole")

    def centralizer_contains(self, desc: VertexCentralizer, y) -> bool:
        return True

    def max_divisor(self, g) -> MaxDivisor:
        if self.is_identity(g):
            raise IdentityElement("divisibility of the identity")
        d = 0
        for a in g:
            d = gcd(d, a)
        return MaxDivisor(d, tuple(a // d for a in g))

    def power_exponent(self, root, g) -> Optional[int]:
        if self.is_identity(root):
            return 0 if self.is_identity(g) else None
        k = next(i for i, a in enumerate(root) if a)
        if g[k] % root[k]:
            return None
        n = g[k] // root[k]
        return n if self.power(root, n) == g else None

    def torus_intersection(self, i: int, g, j: int) -> dict:
        lat = echelon(list(self.tori[i].basis) + list(self.tori[j].basis))
        A = [[self.tori[i].basis[0][r], self.tori[i].basis[1][r],
              -self.tori[j].basis[0][r], -self.tori[j].basis[1][r]] for r in range(self.rank)]
        _, kernel = solve_int(A, [0] * self.rank, 4)
        gens = [self.torus_elem(i, (k[0], k[1])) for k in kernel]
        return {"kind": "lattice", "rank": len(echelon(gens)), "gens": gens, "span_rank": len(lat)}

    def describe(self) -> dict:
        return {"kind": self.kind, "rank": self.rank, "tori": [list(map(list, t.basis)) for t in self.tori]}
