"""Seifert fibered vertex groups over orientable bases with boundary.

Both backends store an element as ``(base, fiber)`` where ``base`` is the
normal form of its image in the base orbifold group and ``fiber`` is the
exponent of the central fiber ``h``.  The base group is free
(``CircleBundle``) or a free product of finite cyclic groups (``ConeSFS``).
"""

from __future__ import annotations

from math import gcd
from typing import Optional, Sequence

from .base import (
    BackendError,
    CosetSolution,
    IdentityElement,
    MaxDivisor,
    Torus,
    VertexCentralizer,
    VertexGroup,
)


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


class _SeifertGroup(VertexGroup):
    """Shared algorithms; subclasses supply the base-group normal form."""

    # subclass hooks -----------------------------------------------------
    def _bmul(self, x: tuple, y: tuple) -> tuple[tuple, int]:
        raise NotImplementedError

    def _binv(self, x: tuple) -> tuple[tuple, int]:
        raise NotImplementedError

    def _can_rotate(self, base: tuple) -> bool:
        """Whether conjugating by the first atom shortens ``base``."""
        raise NotImplementedError

    def _base_sphere(self, n: int) -> list[tuple]:
        raise NotImplementedError

    def _is_torsion_core(self, core: tuple) -> bool:
        return False

    # group structure ----------------------------------------------------
    @property
    def is_seifert(self) -> bool:
        return True

    def identity(self):
        return ((), 0)

    def mul(self, g, h):
        base, carry = self._bmul(g[0], h[0])
        return (base, g[1] + h[1] + carry)

    def inv(self, g):
        base, carry = self._binv(g[0])
        return (base, -g[1] + carry)

    def fiber(self):
        return ((), 1)

    def fiber_exponent(self, g) -> Optional[int]:
        return g[1] if not g[0] and g[1] else None

    def complexity(self, g) -> int:
        return len(g[0]) + abs(g[1])

    def ball(self, radius: int) -> list:
        out = []
        spheres = [self._base_sphere(n) for n in range(radius + 1)]
        for n, sphere in enumerate(spheres):
            for w in sphere:
                for f in range(-(radius - n), radius - n + 1):
                    out.append((w, f))
        out.sort(key=lambda g: (self.complexity(g), g))
        return out

    def _atom(self, a):
        return ((a,), 0)

    # conjugacy normal forms --------------------------------------------
    def cyclic_core(self, g):
        """``(u, c)`` with ``g = u c u^-1`` and the base of ``c`` cyclically reduced."""
        u = self.identity()
        c = g
        while len(c[0]) >= 2 and self._can_rotate(c[0]):
            a = self._atom(c[0][0])
            c = self.mul(self.mul(self.inv(a), c), a)
            u = self.mul(u, a)
        return u, c

    @staticmethod
    def _primitive(core: tuple) -> tuple[tuple, int]:
        n = len(core)
        for p in range(1, n + 1):
            if n % p == 0 and core[:p] * (n // p) == core:
                return core[:p], n // p
        raise AssertionError("unreachable")

    def primitive_root(self, g):
        """``(r, k, f0)`` with ``g = r^k h^f0``, ``r`` primitive with infinite-order base."""
        u, c = self.cyclic_core(g)
        if not c[0] or self._is_torsion_core(c[0]):
            raise BackendError("base image has finite order")
        s, k = self._primitive(c[0])
        r = self.conj(u, (s, 0))
        rest = self.mul(self.power(r, -k), g)
        assert not rest[0]
        return r, k, rest[1]

    # peripheral structure ----------------------------------------------
    def _boundary_bases(self) -> list[tuple]:
        raise NotImplementedError

    def _setup_tori(self):
        self._bwords = self._boundary_bases()
        self.tori = [Torus(f"T{i}", ((w, 0), ((), 1))) for i, w in enumerate(self._bwords)]
        self._binvs = [self._binv(w)[0] for w in self._bwords]

    def _base_power(self, base: tuple, i: int) -> Optional[int]:
        bw, bi = self._bwords[i], self._binvs[i]
        if not base:
            return 0
        n, r = divmod(len(base), len(bw))
        if r:
            return None
        if base == bw * n:
            return n
        if base == bi * n:
            return -n
        return None

    def peripheral_membership(self, i: int, g) -> Optional[tuple[int, int]]:
        m = self._base_power(g[0], i)
        if m is None:
            return None
        rest = self.mul(self.power(self.tori[i].basis[0], -m), g)
        return m, rest[1]

    def coset_rep(self, i: int, g):
        b = self.tori[i].basis[0]
        K = 2 * len(g[0]) + 2
        best = None
        cur = self.mul(g, self.power(b, -K))
        for _ in range(2 * K + 1):
            key = (len(cur[0]), cur[0])
            if best is None or key < best:
                best = key
            cur = self.mul(cur, b)
        rep = (best[1], 0)
        coords = self.peripheral_membership(i, self.mul(self.inv(rep), g))
        assert coords is not None
        return rep, coords

    def conj_into_torus(self, i: int, g):
        u, c = self.cyclic_core(g)
        cb = c[0]
        if not cb:
            return self.identity()
        bw = self._bwords[i]
        if len(cb) % len(bw):
            return None
        for r in range(len(cb)):
            if self._base_power(cb[r:] + cb[:r], i) is not None:
                k = self.mul(u, (cb[:r], 0))
                assert self.peripheral_membership(i, self.mul(self.mul(self.inv(k), g), k)) is not None
                return k
        return None

    def torus_coset_solve(self, i: int, a, b, j: int) -> Optional[CosetSolution]:
        bi = self.tori[i].basis[0]
        K = 2 * (len(a[0]) + len(b[0])) + 4
        sols = []
        cur = self.mul(a, self.power(bi, -K))
        for k in range(-K, K + 1):
            if self.peripheral_membership(j, self.mul(cur, b)) is not None:
                sols.append(k)
            cur = self.mul(cur, bi)
        if not sols:
            return None
        binv = self.inv(b)
        fib = self.peripheral_membership(j, self.fiber())
        if len(sols) == 1:
            t0 = (sols[0], 0)
            lattice = ((0, 1),)
            images = (fib,)
        else:
            if len(sols) != 2 * K + 1:
                raise AssertionError("partial solution window for a peripheral coset")
            t0 = (0, 0)
            lattice = ((1, 0), (0, 1))
            moved = self.peripheral_membership(j, self.mul(self.mul(binv, bi), b))
            assert moved is not None
            images = (moved, fib)
        y0 = self.peripheral_membership(j, self.prod(a, self.torus_elem(i, t0), b))
        assert y0 is not None
        return CosetSolution(t0, lattice, images, y0)

    def torus_intersection(self, i: int, g, j: int) -> dict:
        if i == j and self.peripheral_membership(i, g) is not None:
            return {"kind": "whole", "torus": i}
        return {"kind": "fiber", "gen": self.fiber()}

    # centralizers and roots --------------------------------------------
    def _torsion_generator(self, idx: int):
        raise NotImplementedError

    def centralizer(self, g) -> VertexCentralizer:
        if self.is_identity(g):
            raise IdentityElement("centralizer of the identity")
        if not g[0]:
            return VertexCentralizer("whole")
        u, c = self.cyclic_core(g)
        if self._is_torsion_core(c[0]):
            t = self._torsion_generator(c[0][0][0])
            return VertexCentralizer("cyclic", gens=(self.conj(u, t),))
        r, _, _ = self.primitive_root(g)
        for i in range(len(self.tori)):
            k = self.conj_into_torus(i, g)
            if k is not None:
                return VertexCentralizer("torus", gens=(r, self.fiber()), torus=i, conj=k)
        return VertexCentralizer("abelian", gens=(r, self.fiber()))

    def centralizer_contains(self, desc: VertexCentralizer, y) -> bool:
        if desc.kind == "whole":
            return True
        if desc.kind == "torus":
            return self.peripheral_membership(desc.torus, self.mul(self.mul(self.inv(desc.conj), y), desc.conj)) is not None
        return self.commute(y, desc.gens[0])

    def _fiber_root(self, f: int) -> MaxDivisor:
        raise NotImplementedError

    def max_divisor(self, g) -> MaxDivisor:
        if self.is_identity(g):
            raise IdentityElement("divisibility of the identity")
        if not g[0]:
            return self._fiber_root(g[1])
        u, c = self.cyclic_core(g)
        if self._is_torsion_core(c[0]):
            idx, a = c[0][0]
            N = self.torsion_coordinate(idx, c)
            t = self._torsion_generator(idx)
            return MaxDivisor(abs(N), self.conj(u, self.power(t, _sign(N))))
        r, k, f0 = self.primitive_root(g)
        d = gcd(k, f0)
        root = self.mul(self.power(r, k // d), self.power(self.fiber(), f0 // d))
        return MaxDivisor(d, root)

    def torsion_coordinate(self, idx: int, c) -> int:
        raise NotImplementedError

    def power_exponent(self, root, g) -> Optional[int]:
        if self.is_identity(root):
            return 0 if self.is_identity(g) else None
        if not root[0]:
            if g[0] or g[1] % root[1]:
                return None
            return g[1] // root[1]
        u, c = self.cyclic_core(root)
        z = self.mul(self.mul(self.inv(u), g), u)
        if self._is_torsion_core(c[0]):
            idx = c[0][0][0]
            if z[0] and (len(z[0]) != 1 or z[0][0][0] != idx):
                return None
            N, Nz = self.torsion_coordinate(idx, c), self.torsion_coordinate(idx, z)
            if Nz % N:
                return None
            n = Nz // N
        else:
            n, r = divmod(len(z[0]), len(c[0]))
            if r:
                return None
            if self.power(c, n) != z:
                n = -n
        return n if self.power(root, n) == g else None


class CircleBundle(_SeifertGroup):
    """``F_k x Z``: planar surface with ``k+1`` boundary circles, times a circle.

    Letters are ``+i``/``-i`` for ``x_i`` and its inverse.  The boundary tori
    are ``<x_i, h>`` for ``i = 1..k`` and ``<(x_1...x_k)^-1, h>``.
    """

    kind = "CircleBundle"

    def __init__(self, k: int = 2):
        if k < 2:
            raise BackendError("need at least two free generators")
        self.k = k
        self._setup_tori()

    def _boundary_bases(self) -> list[tuple]:
        return [(i,) for i in range(1, self.k + 1)] + [tuple(-i for i in range(self.k, 0, -1))]

    def check(self, g) -> None:
        ok = isinstance(g, tuple) and len(g) == 2 and isinstance(g[0], tuple) and isinstance(g[1], int)
        if ok:
            w = g[0]
            ok = all(isinstance(x, int) and 1 <= abs(x) <= self.k for x in w)
            ok = ok and all(w[t] != -w[t + 1] for t in range(len(w) - 1))
        if not ok:
            raise BackendError(f"not a normal-form element of F_{self.k} x Z: {g!r}")

    def _bmul(self, x, y):
        n = 0
        while n < len(x) and n < len(y) and x[-1 - n] == -y[n]:
            n += 1
        return x[: len(x) - n] + y[n:], 0

    def _binv(self, x):
        return tuple(-a for a in reversed(x)), 0

    def _can_rotate(self, base):
        return base[0] == -base[-1]

    def _base_sphere(self, n):
        words = [()]
        for _ in range(n):
            words = [w + (a,) for w in words for a in self._letters() if not w or w[-1] != -a]
        return words

    def _letters(self):
        return [s * i for i in range(1, self.k + 1) for s in (1, -1)]

    def _fiber_root(self, f: int) -> MaxDivisor:
        return MaxDivisor(abs(f), ((), _sign(f)))

    def generator_names(self) -> list[str]:
        return [f"x{i}" for i in range(1, self.k + 1)] + ["h"]

    def generator(self, name: str):
        if name == "h":
            return ((), 1)
        if name.startswith("x") and name[1:].isdigit() and 1 <= int(name[1:]) <= self.k:
            return ((int(name[1:]),), 0)
        raise BackendError(f"unknown generator {name!r}")

    def format(self, g) -> str:
        parts = []
        w = g[0]
        t = 0
        while t < len(w):
            a = w[t]
            run = 1
            while t + run < len(w) and w[t + run] == a:
                run += 1
            e = run * _sign(a)
            parts.append(f"x{abs(a)}" + ("" if e == 1 else f"^{e}"))
            t += run
        if g[1]:
            parts.append("h" + ("" if g[1] == 1 else f"^{g[1]}"))
        return " ".join(parts) if parts else "1"

    def describe(self) -> dict:
        return {"kind": self.kind, "k": self.k}


class ConeSFS(_SeifertGroup):
    """Seifert group over a disk with cone points.

    Presentation ``<q_1..q_m, h | h central, q_i^alpha_i = h^-beta_i>``.
    Syllables are ``(i, a)`` with ``0 <= i < m`` and ``0 < a < alpha_i``.
    The single boundary torus is ``<q_1 q_2 ... q_m, h>``.
    """

    kind = "ConeSFS"

    def __init__(self, alphas: Sequence[int], betas: Sequence[int]):
        alphas, betas = tuple(alphas), tuple(betas)
        if len(alphas) != len(betas) or len(alphas) < 2:
            raise BackendError("need at least two cone points with matching invariants")
        for a, b in zip(alphas, betas):
            if a < 2 or gcd(a, b) != 1:
                raise BackendError(f"bad cone invariants ({a}, {b})")
        self.alphas = alphas
        self.betas = betas
        self._setup_tori()

    @property
    def singular_order(self) -> int:
        return max(self.alphas)

    def _boundary_bases(self) -> list[tuple]:
        return [tuple((i, 1) for i in range(len(self.alphas)))]

    def check(self, g) -> None:
        ok = isinstance(g, tuple) and len(g) == 2 and isinstance(g[0], tuple) and isinstance(g[1], int)
        if ok:
            w = g[0]
            ok = all(
                isinstance(s, tuple) and len(s) == 2 and 0 <= s[0] < len(self.alphas) and 0 < s[1] < self.alphas[s[0]]
                for s in w
            )
            ok = ok and all(w[t][0] != w[t + 1][0] for t in range(len(w) - 1))
        if not ok:
            raise BackendError(f"not a normal-form element of the cone group: {g!r}")

    def _bmul(self, x, y):
        x, y = list(x), list(y)
        carry = 0
        while x and y and x[-1][0] == y[0][0]:
            i = x[-1][0]
            s = x[-1][1] + y[0][1]
            if s >= self.alphas[i]:
                s -= self.alphas[i]
                carry -= self.betas[i]
            x.pop()
            y.pop(0)
            if s:
                x.append((i, s))
                break
        return tuple(x + y), carry

    def _binv(self, x):
        # q^-a = q^(alpha - a) * h^beta
        carry = sum(self.betas[i] for i, _ in x)
        return tuple((i, self.alphas[i] - a) for i, a in reversed(x)), carry

    def _can_rotate(self, base):
        return base[0][0] == base[-1][0]

    def _is_torsion_core(self, core):
        return len(core) == 1

    def _base_sphere(self, n):
        words = [()]
        for _ in range(n):
            words = [
                w + ((i, a),)
                for w in words
                for i in range(len(self.alphas))
                if not w or w[-1][0] != i
                for a in range(1, self.alphas[i])
            ]
        return words

    def _torsion_generator(self, idx: int):
        """Generator ``t`` of the infinite cyclic group ``<q_idx, h>``."""
        alpha, beta = self.alphas[idx], self.betas[idx]
        x = pow(beta, -1, alpha)
        y = (x * beta - 1) // alpha
        return self.mul(self.power(((( idx, 1),), 0), x), ((), y))

    def torsion_coordinate(self, idx: int, c) -> int:
        """Exponent of ``c`` in ``<q_idx, h> = <t>``: ``q -> beta``, ``h -> -alpha``."""
        a = c[0][0][1] if c[0] else 0
        return a * self.betas[idx] - c[1] * self.alphas[idx]

    def _fiber_root(self, f: int) -> MaxDivisor:
        idx = max(range(len(self.alphas)), key=lambda i: (self.alphas[i], -i))
        alpha, beta = self.alphas[idx], self.betas[idx]
        k = _sign(f)
        a = (-k * pow(beta, -1, alpha)) % alpha
        e = (k + beta * a) // alpha
        root = (((idx, a),), e)
        d = abs(f) * alpha
        assert self.power(root, d) == ((), f)
        return MaxDivisor(d, root)

    def generator_names(self) -> list[str]:
        return [f"q{i}" for i in range(1, len(self.alphas) + 1)] + ["h"]

    def generator(self, name: str):
        if name == "h":
            return ((), 1)
        if name.startswith("q") and name[1:].isdigit() and 1 <= int(name[1:]) <= len(self.alphas):
            return (((int(name[1:]) - 1, 1),), 0)
        raise BackendError(f"unknown generator {name!r}")

    def format(self, g) -> str:
        parts = [f"q{i + 1}" + ("" if a == 1 else f"^{a}") for i, a in g[0]]
        if g[1]:
            parts.append("h" + ("" if g[1] == 1 else f"^{g[1]}"))
        return " ".join(parts) if parts else "1"

    def describe(self) -> dict:
        return {"kind": self.kind, "alphas": list(self.alphas), "betas": list(self.betas)}
