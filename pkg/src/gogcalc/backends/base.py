from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional, Sequence


class BackendError(ValueError):
    """Elements from the wrong backend, bad parameters, malformed words."""


class IdentityElement(ValueError):
    """An operation that needs a non-trivial element received the identity."""


class SearchExhausted(RuntimeError):
    """A bounded search ran out of budget before reaching a decision."""


@dataclass(frozen=True)
class Torus:
    """A peripheral subgroup: free abelian of rank two on ``basis``."""

    name: str
    basis: tuple[Any, Any]


@dataclass(frozen=True)
class VertexCentralizer:
    """Centralizer of an element inside one vertex group.

    kind is one of ``whole``, ``torus``, ``abelian``, ``cyclic``.
    ``torus`` means ``conj * T[torus] * conj^-1``; ``abelian`` and ``cyclic``
    list generators.  ``verified`` is False when a bounded search could not
    certify that the cyclic generator is primitive.
    """

    kind: str
    gens: tuple = ()
    torus: Optional[int] = None
    conj: Any = None
    verified: bool = True


@dataclass(frozen=True)
class MaxDivisor:
    d: int
    root: Any
    complete: bool = True


@dataclass(frozen=True)
class CosetSolution:
    """Solutions ``t`` in torus i of ``a * t * b`` landing in torus j.

    ``t = t0 + sum w_k * lattice[k]`` (torus-i coordinates) and then
    ``coords_j(a t b) = y0 + sum w_k * images[k]``.
    """

    t0: tuple[int, int]
    lattice: tuple[tuple[int, int], ...]
    images: tuple[tuple[int, int], ...]
    y0: tuple[int, int]


class VertexGroup:
    """Common surface of the vertex-group backends.

    Subclasses set ``kind`` and ``tori`` and store elements as hashable
    normal forms, so ``==`` on elements is equality in the group.
    """

    kind = "abstract"
    tori: list[Torus]

    # -- group structure -------------------------------------------------
    def identity(self):
        raise NotImplementedError

    def mul(self, g, h):
        raise NotImplementedError

    def inv(self, g):
        raise NotImplementedError

    def check(self, g) -> None:
        """Raise BackendError unless ``g`` is a normal-form element here."""
        raise NotImplementedError

    def is_identity(self, g) -> bool:
        return g == self.identity()

    def prod(self, *gs):
        out = self.identity()
        for g in gs:
            out = self.mul(out, g)
        return out

    def power(self, g, n: int):
        if n < 0:
            g, n = self.inv(g), -n
        out = self.identity()
        base = g
        while n:
            if n & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            n >>= 1
        return out

    def conj(self, k, g):
        """``k g k^-1``."""
        return self.mul(self.mul(k, g), self.inv(k))

    def commute(self, g, h) -> bool:
        return self.mul(g, h) == self.mul(h, g)

    # -- words -----------------------------------------------------------
    def generator_names(self) -> list[str]:
        raise NotImplementedError

    def generator(self, name: str):
        raise NotImplementedError

    def from_word(self, word: Sequence[tuple[str, int]]):
        out = self.identity()
        for name, e in word:
            out = self.mul(out, self.power(self.generator(name), e))
        return out

    def format(self, g) -> str:
        raise NotImplementedError

    def complexity(self, g) -> int:
        raise NotImplementedError

    def ball(self, radius: int) -> list:
        """Every element of complexity at most ``radius``, without repeats."""
        raise NotImplementedError

    # -- peripheral structure -------------------------------------------
    @property
    def is_seifert(self) -> bool:
        return False

    @property
    def singular_order(self) -> int:
        return 1

    def torus_elem(self, i: int, coords: Sequence[int]):
        u, v = self.tori[i].basis
        return self.mul(self.power(u, coords[0]), self.power(v, coords[1]))

    def peripheral_membership(self, i: int, g) -> Optional[tuple[int, int]]:
        raise NotImplementedError

    def coset_rep(self, i: int, g):
        """Canonical ``rep`` of ``g*T_i`` and coords with ``g = rep * t``."""
        raise NotImplementedError

    def conj_into_torus(self, i: int, g):
        """Some ``k`` with ``k^-1 g k`` in ``T_i``, or None."""
        raise NotImplementedError

    def torus_coset_solve(self, i: int, a, b, j: int) -> Optional[CosetSolution]:
        raise NotImplementedError

    # -- theorem-facing oracles -----------------------------------------
    def fiber(self):
        return None

    def fiber_exponent(self, g) -> Optional[int]:
        """``k`` with ``g = c^k`` for the regular fiber ``c``, else None."""
        return None

    def centralizer(self, g) -> VertexCentralizer:
        raise NotImplementedError

    def centralizer_contains(self, desc: VertexCentralizer, y) -> bool:
        raise NotImplementedError

    def max_divisor(self, g) -> MaxDivisor:
        raise NotImplementedError

    def power_exponent(self, root, g) -> Optional[int]:
        """``k`` with ``root^k = g`` if one exists."""
        raise NotImplementedError

    def division_closed_check(self, i: int, g, n: int) -> dict:
        """Certify the division-closure dichotomy for ``g`` with ``g^n`` in ``T_i``."""
        if n <= 0:
            raise BackendError("exponent must be positive")
        if self.peripheral_membership(i, self.power(g, n)) is None:
            raise BackendError("precondition: g^n is not in the torus")
        member = self.peripheral_membership(i, g)
        if member is not None:
            return {"in_torus": True, "coords": member}
        if not self.is_seifert:
            raise AssertionError("torus is not division closed in a non-Seifert piece")
        for d in range(1, self.singular_order + 1):
            k = self.fiber_exponent(self.power(g, d))
            if k:
                return {"in_torus": False, "d": d, "fiber_exp": k}
        raise AssertionError("no power up to the singular order is a fiber")

    def torus_intersection(self, i: int, g, j: int) -> dict:
        """Describe ``T_i`` intersected with ``g T_j g^-1``."""
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError
