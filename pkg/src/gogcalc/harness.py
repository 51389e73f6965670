"""Brute-force oracles, random generators and shrinking.

Everything here answers questions by exhaustive search over small elements
and never calls the decision procedures in :mod:`gogcalc.engine`.  The
complexity of a path ``(g0, e1, g1, ..., en, gn)`` is ``n`` plus the sum of
the vertex complexities of the ``gi``.
"""

from __future__ import annotations

import random
from math import gcd
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Optional

from .backends.base import VertexGroup
from .backends.seifert import CircleBundle, ConeSFS
from .dsl import ParseError, emit_manifold, format_path, parse_manifold, parse_query
from .graph import EdgeSpec, GraphOfGroups, build_gog, edge_specs, validate_jsj
from .paths import (
    PathWord,
    canonical_key,
    concat,
    cyclic_length,
    invert,
    is_trivial,
    power,
    reduced,
)

HARD_CAP = 7


class CapExceeded(ValueError):
    pass


# -- enumeration ----------------------------------------------------------------


def path_complexity(p: PathWord) -> int:
    gog = p.gog
    return p.length + sum(gog.vg(p.vertex(i)).complexity(g) for i, g in enumerate(p.elems))


def enumerate_paths(gog: GraphOfGroups, L: int, start: Optional[str] = None) -> Iterator[PathWord]:
    """Every path word of complexity at most ``L`` that is a loop at ``start``.

    Representatives are not deduplicated; the same element usually appears
    many times.
    """
    if L > HARD_CAP:
        raise CapExceeded(f"complexity {L} exceeds the hard cap {HARD_CAP}")
    base = start or gog.base_vertex
    balls = {
        v: [(g, gog.vg(v).complexity(g)) for g in gog.vg(v).ball(L)] for v in gog.graph.vertices
    }
    out_edges = {v: gog.graph.out_edges(v) for v in gog.graph.vertices}

    def rec(v, elems, edges, budget):
        for g, c in balls[v]:
            if c > budget:
                continue
            el = elems + (g,)
            if v == base:
                yield PathWord(gog, base, el, edges)
            if budget - c >= 1:
                for e in out_edges[v]:
                    yield from rec(gog.terminus(e), el, edges + (e,), budget - c - 1)

    yield from rec(base, (), (), L)


@lru_cache(maxsize=32)
def _elements(gog: GraphOfGroups, L: int) -> tuple:
    seen = {}
    for p in enumerate_paths(gog, L):
        k = canonical_key(p)
        if k not in seen:
            seen[k] = reduced(p)
    return tuple(seen.values())


def enumerate_elements(gog: GraphOfGroups, L: int) -> list[PathWord]:
    """Pairwise distinct elements of complexity at most ``L``, as reduced loops at the base.

    The first representative met in enumeration order is kept; the identity
    is included.
    """
    return list(_elements(gog, L))


# -- brute-force oracles -----------------------------------------------------------------


def brute_commutes(x: PathWord, y: PathWord) -> bool:
    if x.length == 0 and y.length == 0:
        return x.gog.vg(x.start).commute(x.elems[0], y.elems[0])
    return is_trivial(concat(concat(x, y), concat(invert(x), invert(y))))


def brute_centralizer(gog: GraphOfGroups, g: PathWord, L: int) -> list[PathWord]:
    """Elements of complexity at most ``L`` commuting with ``g``."""
    return [h for h in _elements(gog, L) if brute_commutes(g, h)]


def brute_commute_table(gog: GraphOfGroups, L: int) -> list[tuple[PathWord, PathWord]]:
    """Unordered commuting pairs of distinct non-trivial elements of complexity at most ``L``."""
    elems = [p for p in _elements(gog, L) if not is_trivial(p)]
    out = []
    for i, x in enumerate(elems):
        for y in elems[i + 1 :]:
            if brute_commutes(x, y):
                out.append((x, y))
    return out


@lru_cache(maxsize=16)
def _power_table(gog: GraphOfGroups, L: int, reach: int, cap: int) -> dict:
    """``key(y^n) -> largest n`` over enumerated ``y``, for powers of cyclic length at most ``reach``."""
    best: dict = {}
    for y in _elements(gog, L):
        if is_trivial(y):
            continue
        cl = cyclic_length(y)
        top = cap if cl == 0 else min(cap, reach // cl)
        for n in range(1, top + 1):
            k = canonical_key(power(y, n))
            if best.get(k, 0) < n:
                best[k] = n
    return best


def brute_divisibility(gog: GraphOfGroups, g: PathWord, L: int, cap: int = 24) -> int:
    """Largest ``n <= cap`` with ``y^n = g`` for some ``y`` of complexity at most ``L``."""
    if is_trivial(g):
        raise ValueError("the identity is divisible by every n")
    # one table serves every target of cyclic length up to its reach
    reach = max(cyclic_length(g), 6)
    return _power_table(gog, L, reach, cap).get(canonical_key(g), 0)


# -- reduction in another order ----------------------------------------------------------


def reduce_rightmost(p: PathWord) -> PathWord:
    """Reduce by always cancelling the rightmost backtrack, independently of :func:`reduce`."""
    gog = p.gog
    elems, edges = list(p.elems), list(p.edges)
    while True:
        hit = None
        for i in range(len(edges) - 1, 0, -1):
            e = edges[i - 1]
            if edges[i] == gog.bar(e):
                a = gog.phi_inv(e, elems[i])
                if a is not None:
                    hit = (i, e, a)
                    break
        if hit is None:
            return PathWord(gog, p.start, tuple(elems), tuple(edges))
        i, e, a = hit
        v = p.start if i == 1 else gog.terminus(edges[i - 2])
        vg = gog.vg(v)
        elems[i - 1 : i + 2] = [vg.mul(vg.mul(elems[i - 1], gog.phi(gog.bar(e), a)), elems[i + 1])]
        del edges[i - 1 : i + 1]


# -- random graphs of groups ------------------------------------------------------------


def random_unimodular(rng: random.Random, steps: int = 4) -> tuple:
    m = [[1, 0], [0, 1]]
    for _ in range(steps):
        k = rng.choice([-2, -1, 1, 2])
        if rng.random() < 0.5:
            m = [[m[0][0] + k * m[1][0], m[0][1] + k * m[1][1]], m[1]]
        else:
            m = [m[0], [m[1][0] + k * m[0][0], m[1][1] + k * m[0][1]]]
    if rng.random() < 0.5:
        m = [m[1], m[0]]
    return tuple(tuple(r) for r in m)


def _random_vertex(rng: random.Random, needed: int) -> VertexGroup:
    if needed <= 1 and rng.random() < 0.4:
        m = rng.choice([2, 3])
        alphas = [rng.choice([2, 3, 4, 5]) for _ in range(m)]
        betas = []
        for a in alphas:
            b = rng.randrange(1, a)
            while gcd(a, b) != 1:
                b = rng.randrange(1, a)
            betas.append(b)
        return ConeSFS(alphas, betas)
    return CircleBundle(max(2, needed - 1 + rng.randrange(2)))


def random_gog(seed: int, vertices: int = 2, extra_edges: int = 0, attempts: int = 200) -> GraphOfGroups:
    """A seed-deterministic graph of Seifert pieces that passes :func:`validate_jsj`."""
    rng = random.Random(seed)
    for _ in range(attempts):
        names = [chr(ord("A") + i) for i in range(vertices)]
        pairs = [(names[i], names[rng.randrange(i)]) for i in range(1, vertices)]
        for _ in range(extra_edges):
            pairs.append((rng.choice(names), rng.choice(names)))
        degree = {v: 0 for v in names}
        for a, b in pairs:
            degree[a] += 1
            degree[b] += 1
        groups = {v: _random_vertex(rng, degree[v]) for v in names}
        free = {v: list(range(len(groups[v].tori))) for v in names}
        edges = []
        ok = True
        for k, (a, b) in enumerate(pairs):
            if not free[a] or not free[b] or (a == b and len(free[a]) < 2):
                ok = False
                break
            ta = free[a].pop(rng.randrange(len(free[a])))
            tb = free[b].pop(rng.randrange(len(free[b])))
            m = random_unimodular(rng)
            edges.append(EdgeSpec(f"e{k + 1}", a, ta, b, tb, m))
        if not ok:
            continue
        gog = build_gog(groups, edges, names[0], name=f"random{seed}")
        if validate_jsj(gog).ok:
            return gog
    raise RuntimeError(f"no valid graph of groups after {attempts} attempts")


# -- shrinking -----------------------------------------------------------------------


def _shorter_elements(vg: VertexGroup, g) -> list:
    c = vg.complexity(g)
    return [h for h in vg.ball(max(c - 1, 0)) if vg.complexity(h) < c]


def shrink_paths(
    paths: list[PathWord], failing: Callable[[list[PathWord]], bool], rounds: int = 50
) -> list[PathWord]:
    """Greedy minimisation keeping ``failing(paths)`` true.

    Path length goes first (cutting backtracking-free excursions ``e ... bar e``
    out of loops), then vertex syllables.
    """
    cur = list(paths)
    for _ in range(rounds):
        changed = False
        for j, p in enumerate(cur):
            for cand in _length_cuts(p):
                trial = cur[:j] + [cand] + cur[j + 1 :]
                if failing(trial):
                    cur, changed = trial, True
                    break
            if changed:
                break
        if changed:
            continue
        for j, p in enumerate(cur):
            for cand in _syllable_cuts(p):
                trial = cur[:j] + [cand] + cur[j + 1 :]
                if failing(trial):
                    cur, changed = trial, True
                    break
            if changed:
                break
        if not changed:
            break
    return cur


def _length_cuts(p: PathWord) -> Iterable[PathWord]:
    gog = p.gog
    n = p.length
    for i in range(n):
        for j in range(i + 1, n + 1):
            if p.vertex(i) != p.vertex(j) or (i, j) == (0, n):
                continue
            vg = gog.vg(p.vertex(i))
            elems = p.elems[:i] + (vg.mul(p.elems[i], p.elems[j]),) + p.elems[j + 1 :]
            yield PathWord(gog, p.start, elems, p.edges[:i] + p.edges[j:])


def _syllable_cuts(p: PathWord) -> Iterable[PathWord]:
    gog = p.gog
    for i, g in enumerate(p.elems):
        vg = gog.vg(p.vertex(i))
        for h in _shorter_elements(vg, g)[:40]:
            yield PathWord(gog, p.start, p.elems[:i] + (h,) + p.elems[i + 1 :], p.edges)


def shrink_gog(gog: GraphOfGroups, failing: Callable[[GraphOfGroups], bool]) -> GraphOfGroups:
    """Try gluing matrices with smaller entries, keeping the graph valid and failing."""
    specs = edge_specs(gog)
    groups = {v: gog.vg(v) for v in gog.graph.vertices}
    simple = [((1, 0), (0, 1)), ((0, 1), (1, 0)), ((1, 1), (0, 1)), ((1, 0), (1, 1)), ((0, 1), (-1, 0))]
    for k, s in enumerate(specs):
        size = sum(abs(x) for row in s.matrix for x in row)
        for m in simple:
            if sum(abs(x) for row in m for x in row) >= size:
                continue
            trial = specs[:k] + [EdgeSpec(s.name, s.origin, s.origin_torus, s.terminus, s.terminus_torus, m, s.bar_matrix)] + specs[k + 1 :]
            cand = build_gog(groups, trial, gog.base_vertex, gog.name)
            if validate_jsj(cand).ok and failing(cand):
                return shrink_gog(cand, failing)
    return gog


def counterexample_text(gog: GraphOfGroups, paths: list[PathWord], note: str) -> str:
    """A DSL document reproducing a failure; the paths are kept as comments."""
    lines = [f"# counterexample: {note}"]
    lines += [f"# path: {format_path(p)}" for p in paths]
    return "\n".join(lines) + "\n" + emit_manifold(gog)


# -- parser fuzzing --------------------------------------------------------------------


def fuzz_inputs(seed: int, length: int, count: int, corpus: Iterable[bytes] = ()) -> Iterator[bytes]:
    """Random byte strings, half of them mutations of ``corpus`` entries."""
    rng = random.Random(seed)
    corpus = list(corpus)
    alphabet = b"0123456789-,[]()<>{};:.=^~#\n abehqtxzAFKW_"
    for i in range(count):
        if corpus and i % 2:
            s = bytearray(rng.choice(corpus))
            for _ in range(rng.randrange(1, 5)):
                if not s:
                    break
                k = rng.randrange(len(s))
                op = rng.randrange(3)
                if op == 0:
                    s[k] = rng.randrange(256)
                elif op == 1:
                    del s[k]
                else:
                    s.insert(k, rng.choice(alphabet))
            yield bytes(s)
        elif i % 4 == 0:
            yield bytes(rng.choice(alphabet) for _ in range(rng.randrange(length + 1)))
        else:
            yield bytes(rng.randrange(256) for _ in range(rng.randrange(length + 1)))


def fuzz(seed: int, length: int, count: int, corpus: Iterable[bytes] = (), gog: Optional[GraphOfGroups] = None) -> dict:
    """Feed random inputs to the manifold parser (and the query parser when ``gog`` is given).

    Anything but a positioned :class:`ParseError` counts as a crash.
    """
    stats = {"inputs": 0, "parsed": 0, "errors": 0, "crashes": []}
    for data in fuzz_inputs(seed, length, count, corpus):
        stats["inputs"] += 1
        targets = [parse_manifold] + ([lambda d: parse_query(d, gog)] if gog is not None else [])
        for parse in targets:
            try:
                parse(data)
                stats["parsed"] += 1
            except ParseError as exc:
                if exc.line < 1 or exc.column < 1:
                    stats["crashes"].append((data, "error without position"))
                stats["errors"] += 1
            except Exception as exc:  # noqa: BLE001 - any other exception is the finding
                stats["crashes"].append((data, repr(exc)))
    return stats
