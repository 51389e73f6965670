"""Exact arithmetic in a quadratic ring Z[tau] (and its fraction field).

``tau`` is a fixed root of the monic polynomial ``tau**2 + p*tau + q``.  The
figure-eight ring uses ``(p, q) = (1, 1)``, the Gaussian integers ``(0, 1)``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Number = Union[int, Fraction]


@dataclass(frozen=True)
class Ring:
    p: int
    q: int

    @property
    def discriminant(self) -> int:
        return self.p * self.p - 4 * self.q

    @property
    def imaginary(self) -> bool:
        return self.discriminant < 0

    def tau_complex(self) -> complex:
        root = cmath.sqrt(self.discriminant)
        if root.imag < 0 or (root.imag == 0 and root.real < 0):
            root = -root
        return (-self.p + root) / 2

    def __call__(self, a: Number = 0, b: Number = 0) -> "QuadInt":
        return QuadInt(self, a, b)

    @property
    def zero(self) -> "QuadInt":
        return QuadInt(self, 0, 0)

    @property
    def one(self) -> "QuadInt":
        return QuadInt(self, 1, 0)

    @property
    def tau(self) -> "QuadInt":
        return QuadInt(self, 0, 1)


EISENSTEIN = Ring(1, 1)
GAUSSIAN = Ring(0, 1)


class QuadInt:
    """``a + b*tau`` with integer (or rational, for quotients) coefficients."""

    __slots__ = ("ring", "a", "b")

    def __init__(self, ring: Ring, a: Number = 0, b: Number = 0):
        if isinstance(a, Fraction) and a.denominator == 1:
            a = a.numerator
        if isinstance(b, Fraction) and b.denominator == 1:
            b = b.numerator
        self.ring = ring
        self.a = a
        self.b = b

    def _coerce(self, other) -> "QuadInt":
        if isinstance(other, QuadInt):
            if other.ring != self.ring:
                raise ValueError("ring mismatch")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadInt(self.ring, other, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadInt(self.ring, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QuadInt(self.ring, -self.a, -self.b)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadInt(self.ring, self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        # tau^2 = -p tau - q
        bb = self.b * o.b
        return QuadInt(
            self.ring,
            self.a * o.a - self.ring.q * bb,
            self.a * o.b + self.b * o.a - self.ring.p * bb,
        )

    __rmul__ = __mul__

    def conjugate(self) -> "QuadInt":
        # tau' = -p - tau
        return QuadInt(self.ring, self.a - self.ring.p * self.b, -self.b)

    def norm(self) -> Number:
        p, q = self.ring.p, self.ring.q
        return self.a * self.a - p * self.a * self.b + q * self.b * self.b

    def inverse(self) -> "QuadInt":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("zero in quadratic field")
        c = self.conjugate()
        return QuadInt(self.ring, Fraction(c.a) / n, Fraction(c.b) / n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def is_integral(self) -> bool:
        return isinstance(self.a, int) and isinstance(self.b, int)

    def is_rational(self) -> bool:
        return self.b == 0

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if isinstance(other, QuadInt):
            return self.ring == other.ring and self.a == other.a and self.b == other.b
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __complex__(self):
        return complex(self.a) + complex(self.b) * self.ring.tau_complex()

    def __repr__(self):
        return f"QuadInt({self.a}, {self.b})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        tail = "tau" if self.b == 1 else ("-tau" if self.b == -1 else f"{self.b}*tau")
        if self.a == 0:
            return tail
        if tail.startswith("-"):
            return f"{self.a}{tail}"
        return f"{self.a}+{tail}"

    def sign_real(self) -> int:
        """Sign of a real element (real quadratic rings or ``b == 0``)."""
        if self.b == 0:
            return (self.a > 0) - (self.a < 0)
        if self.ring.imaginary:
            raise ValueError("element is not real")
        # a + b*tau = u + v*sqrt(D) with u = a - b p / 2, v = b / 2
        u = Fraction(self.a) - Fraction(self.b * self.ring.p, 2)
        v = Fraction(self.b, 2)
        d = self.ring.discriminant
        su = (u > 0) - (u < 0)
        sv = (v > 0) - (v < 0)
        if su == sv or su == 0:
            return sv if su == 0 else su
        big = u * u - v * v * d
        return su if big > 0 else (sv if big < 0 else 0)
