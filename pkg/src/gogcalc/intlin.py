"""Small exact integer linear algebra: Diophantine systems and lattice residues."""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

Vec = tuple[int, ...]


def solve_int(A: Sequence[Sequence[int]], b: Sequence[int], n: Optional[int] = None):
    """All integer solutions of ``A x = b`` as ``(x0, kernel_basis)`` or ``None``.

    Column-style echelon reduction with a unimodular transform ``U``:
    ``A U = H``; solve ``H y = b`` by substitution, then ``x = U y``.
    """
    m = len(A)
    if n is None:
        n = len(A[0]) if m else 0
    H = [list(row) for row in A]
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def colop(dst: int, src: int, q: int) -> None:
        # column dst -= q * column src
        for row in H:
            row[dst] -= q * row[src]
        for row in U:
            row[dst] -= q * row[src]

    def swap(i: int, j: int) -> None:
        for row in H:
            row[i], row[j] = row[j], row[i]
        for row in U:
            row[i], row[j] = row[j], row[i]

    pivots: list[tuple[int, int]] = []
    col = 0
    for i in range(m):
        if col >= n:
            break
        while True:
            nz = [j for j in range(col, n) if H[i][j] != 0]
            if not nz:
                break
            j = min(nz, key=lambda k: abs(H[i][k]))
            if j != col:
                swap(j, col)
            done = True
            for k in range(col + 1, n):
                if H[i][k]:
                    colop(k, col, H[i][k] // H[i][col])
                    if H[i][k]:
                        done = False
            if done:
                break
        if H[i][col] != 0:
            pivots.append((i, col))
            col += 1

    y = [0] * n
    for i, c in pivots:
        rest = b[i] - sum(H[i][k] * y[k] for k in range(c))
        if rest % H[i][c]:
            return None
        y[c] = rest // H[i][c]
    for i in range(m):
        if sum(H[i][k] * y[k] for k in range(n)) != b[i]:
            return None
    x0 = tuple(sum(U[r][k] * y[k] for k in range(n)) for r in range(n))
    kernel = [tuple(U[r][c] for r in range(n)) for c in range(col, n)]
    return x0, kernel


def echelon(vectors: Sequence[Sequence[int]]) -> list[Vec]:
    """Row-echelon integer basis of the lattice spanned by ``vectors``."""
    rows = [list(v) for v in vectors if any(v)]
    if not rows:
        return []
    dim = len(rows[0])
    out: list[list[int]] = []
    col = 0
    while rows and col < dim:
        while True:
            nz = [r for r in rows if r[col] != 0]
            if len(nz) <= 1:
                break
            piv = min(nz, key=lambda r: abs(r[col]))
            for r in nz:
                if r is not piv:
                    q = r[col] // piv[col]
                    for k in range(dim):
                        r[k] -= q * piv[k]
            rows = [r for r in rows if any(r)]
        nz = [r for r in rows if r[col] != 0]
        if nz:
            piv = nz[0]
            if piv[col] < 0:
                piv = [-x for x in piv]
            out.append(piv)
            rows = [r for r in rows if r is not nz[0]]
        col += 1
    return [tuple(r) for r in out]


def pivot_of(row: Sequence[int]) -> int:
    for k, x in enumerate(row):
        if x:
            return k
    raise ValueError("zero row")


def reduce_mod(v: Sequence[int], ech: Sequence[Vec]) -> tuple[Vec, Vec]:
    """Canonical residue of ``v`` modulo the lattice with echelon basis ``ech``.

    Returns ``(residue, coefficients)`` with ``v = residue + sum(c_k * ech[k])``.
    """
    r = list(v)
    coeffs = []
    for row in ech:
        p = pivot_of(row)
        q = r[p] // row[p]
        coeffs.append(q)
        if q:
            for k in range(len(r)):
                r[k] -= q * row[k]
    return tuple(r), tuple(coeffs)


def det2(M: Sequence[Sequence[int]]) -> int:
    return M[0][0] * M[1][1] - M[0][1] * M[1][0]


def matvec(M: Sequence[Sequence[int]], v: Sequence[int]) -> Vec:
    return tuple(sum(M[i][j] * v[j] for j in range(len(v))) for i in range(len(M)))


def solve2_rational(M, v) -> Optional[tuple[Fraction, Fraction]]:
    d = det2(M)
    if d == 0:
        return None
    x = Fraction(v[0] * M[1][1] - M[0][1] * v[1], d)
    y = Fraction(M[0][0] * v[1] - M[1][0] * v[0], d)
    return x, y


def solve2_int(M, v) -> Optional[tuple[int, int]]:
    """Unique integer ``x`` with ``M x = v`` for a nonsingular 2x2 ``M``."""
    sol = solve2_rational(M, v)
    if sol is None or sol[0].denominator != 1 or sol[1].denominator != 1:
        return None
    return int(sol[0]), int(sol[1])
