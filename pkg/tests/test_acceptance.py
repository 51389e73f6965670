"""Acceptance suite: nine end-to-end criteria at their stated scales.

Every criterion is a cached function returning a ``Outcome``; the pytest
tests assert on them and ``conftest.py`` prints one pass/fail line per
criterion at the end of the run.  Criteria 1-7 also emit certificates for a
fixed, deterministic subset of the cases they check; criterion 8 replays all
of them.  Run ``python tests/test_acceptance.py`` to get the same lines
without pytest.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from functools import lru_cache

import pytest

from gogcalc import engine
from gogcalc.backends.seifert import CircleBundle
from gogcalc.certificates import replay, run_query
from gogcalc.cli import shipped_files
from gogcalc.dsl import Query, emit_manifold, parse_manifold
from gogcalc.graph import EdgeSpec, build_gog, validate_graph, validate_jsj
from gogcalc.harness import (
    brute_commute_table,
    brute_commutes,
    brute_centralizer,
    brute_divisibility,
    enumerate_elements,
    enumerate_paths,
    fuzz,
    random_gog,
    reduce_rightmost,
)
from gogcalc.paths import (
    canonical_key,
    concat,
    conjugate,
    cyclic_length,
    cyclic_reduce,
    equal,
    invert,
    is_reduced,
    is_trivial,
    power,
    reduced,
    vertex_path,
)
from gogcalc.presets import load_preset, preset_names

MULTI_VERTEX = ["graph_manifold", "hnn_bundle", "mixed"]


@dataclass
class Outcome:
    number: int
    title: str
    limit: float
    failures: list = field(default_factory=list)
    checked: int = 0
    seconds: float = 0.0
    certificates: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and self.seconds <= self.limit

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        text = f"{status} criterion {self.number} ({self.title}): {self.checked} checks, "
        text += f"{len(self.failures)} failures, {self.seconds:.1f}s of {self.limit:.0f}s"
        if self.failures:
            text += f"; first: {self.failures[0]}"
        return text


def _timed(number: int, title: str, limit: float, setup=None):
    """Cache the criterion and time it; ``setup`` runs first and is not timed."""

    def wrap(fn):
        @lru_cache(maxsize=None)
        def run() -> Outcome:
            out = Outcome(number, title, limit)
            if setup is not None:
                setup()
            start = time.perf_counter()
            try:
                fn(out)
            except Exception as exc:  # noqa: BLE001 - an exception is a failed criterion
                out.failures.append(f"raised {exc!r}")
            out.seconds = time.perf_counter() - start
            return out

        return run

    return wrap


def _emit(out: Outcome, gog, kind: str, paths, torus=None) -> None:
    out.certificates.append(run_query(gog, Query(kind, tuple(paths), torus)))


def _nontrivial(gog, L: int) -> list:
    return [g for g in enumerate_elements(gog, L) if not is_trivial(g)]


def _to_vertex(gog, v: str):
    """Path from the base vertex to ``v`` along the chosen tree."""
    return invert(gog.base_path(v))


# -- 1. path calculus ---------------------------------------------------------------


@_timed(1, "path calculus", 120)
def criterion_1(out: Outcome) -> None:
    for name in preset_names():
        gog = load_preset(name)
        lengths: dict = {}
        for k, p in enumerate(enumerate_paths(gog, 6)):
            out.checked += 1
            left, right = reduced(p), reduce_rightmost(p)
            if left.length != right.length or not equal(left, right):
                out.failures.append(f"{name}: orders disagree on {p}")
            lengths.setdefault(canonical_key(p), set()).add(left.length)
            if k % 2000 == 0:
                _emit(out, gog, "reduce", [p])
        for key, seen in lengths.items():
            if len(seen) != 1:
                out.failures.append(f"{name}: reduced lengths {sorted(seen)} for one element")
        for g in enumerate_elements(gog, 6):
            cl = cyclic_length(g)
            for n in range(2, 5):
                out.checked += 1
                if cyclic_length(power(g, n)) != n * cl:
                    out.failures.append(f"{name}: cl({g}^{n}) != {n} * {cl}")
        sample = _nontrivial(gog, 2)[:2]
        if len(sample) == 2:
            _emit(out, gog, "equal", [power(sample[0], 2), concat(sample[0], sample[0])])


# -- 2. divisibility ---------------------------------------------------------------


@_timed(2, "divisibility", 300)
def criterion_2(out: Outcome) -> None:
    trefoil = load_preset("trefoil")
    h_inv = vertex_path(trefoil, "K", trefoil.vg("K").inv(trefoil.vg("K").fiber()))
    res = engine.max_divisibility(h_inv)
    out.checked += 1
    if res.max_n != 3:
        out.failures.append(f"trefoil h^-1 has max_n {res.max_n}, expected 3")
    _emit(out, trefoil, "divisibility", [h_inv])
    for name in ("trefoil", "graph_manifold", "hnn_bundle"):
        gog = load_preset(name)
        for k, g in enumerate(_nontrivial(gog, 3)):
            out.checked += 1
            res = engine.max_divisibility(g)
            brute = brute_divisibility(gog, g, 6)
            if res.max_n != brute:
                out.failures.append(f"{name}: {g} engine {res.max_n} brute {brute}")
            if not equal(power(res.root, res.max_n), g):
                out.failures.append(f"{name}: root of {g} does not verify")
            s, _ = cyclic_reduce(g)
            if s.length:
                expected = ("ClBound", s.length)
            else:
                d = gog.vg(s.start).max_divisor(s.elems[0]).d
                expected = ("VertexBound", d * gog.seifert_bound())
            if (res.bound_used, res.bound) != expected or res.max_n > res.bound:
                out.failures.append(f"{name}: {g} bound {res.bound_used}={res.bound}, expected {expected}")
            if k % 10 == 0:
                _emit(out, gog, "divisibility", [g])


# -- 3. commuting pairs --------------------------------------------------------------


def _verify_commute_class(cls, x, y) -> bool:
    if isinstance(cls, engine.CyclicPair):
        a, b = cls.exponents
        return equal(power(cls.z, a), x) and equal(power(cls.z, b), y)
    gog = x.gog
    for z in (x, y):
        local = reduced(conjugate(invert(cls.conjugator), z))
        if local.length or local.start != cls.vertex:
            return False
        if isinstance(cls, engine.TorusCase):
            if gog.vg(cls.vertex).peripheral_membership(cls.torus, local.elems[0]) is None:
                return False
        elif not gog.vg(cls.vertex).is_seifert:
            return False
    return True


@_timed(3, "commuting trichotomy", 600)
def criterion_3(out: Outcome) -> None:
    for name in ("mixed", "graph_manifold"):
        gog = load_preset(name)
        for k, (x, y) in enumerate(brute_commute_table(gog, 5)):
            out.checked += 1
            try:
                cls = engine.classify_commuting(x, y)
            except Exception as exc:  # noqa: BLE001 - an unclassified pair is the failure
                out.failures.append(f"{name}: ({x}, {y}) unclassified: {exc!r}")
                continue
            if not _verify_commute_class(cls, x, y):
                out.failures.append(f"{name}: ({x}, {y}) {cls.tag} witness does not verify")
            if k % 400 == 0:
                _emit(out, gog, "classify", [x, y])


# -- 4. centralizers -----------------------------------------------------------------


@_timed(4, "centralizers", 600)
def criterion_4(out: Outcome) -> None:
    for name in preset_names():
        gog = load_preset(name)
        for k, g in enumerate(_nontrivial(gog, 3)):
            desc = engine.centralizer(g)
            for h in brute_centralizer(gog, g, 5):
                out.checked += 1
                if not engine.desc_contains(desc, h):
                    out.failures.append(f"{name}: {h} commutes with {g} but is outside {desc.tag}")
            for s in engine.desc_samples(desc):
                out.checked += 1
                if not brute_commutes(s, g):
                    out.failures.append(f"{name}: sample {s} of {desc.tag} does not commute with {g}")
            if k % 25 == 0:
                _emit(out, gog, "centralizer", [g])
        for v in gog.graph.vertices:
            vg = gog.vg(v)
            if vg.is_seifert:
                for n in (1, -1, 2):
                    out.checked += 1
                    g = conjugate(_to_vertex(gog, v), vertex_path(gog, v, vg.power(vg.fiber(), n)))
                    desc = engine.centralizer(g)
                    inner = getattr(desc, "inner", None)
                    if inner is None or inner.kind != "whole":
                        out.failures.append(f"{name}: fiber power {n} at {v} gives {desc}")
                _emit(out, gog, "centralizer", [g])
            if vg.kind == "Kleinian":
                # a glued torus can carry the fiber of its neighbour, so only free tori count
                for i in [i for w, i in gog.free_tori() if w == v]:
                    for coords in ((1, 0), (0, 1), (1, 1), (2, -1)):
                        out.checked += 1
                        g = conjugate(_to_vertex(gog, v), vertex_path(gog, v, vg.torus_elem(i, coords)))
                        desc = engine.centralizer(g)
                        if not isinstance(desc, engine.ConjugateTorus):
                            out.failures.append(f"{name}: parabolic {coords} in torus {i} gives {desc.tag}")
                        elif not engine.desc_contains(desc, g):
                            out.failures.append(f"{name}: parabolic {coords} outside its own torus")


# -- 5. malnormality -------------------------------------------------------------------


def _in_torus(gog, S, p) -> bool:
    w, i = S
    local = reduced(conjugate(gog.base_path(w), p))
    return local.length == 0 and gog.vg(w).peripheral_membership(i, local.elems[0]) is not None


def _verify_malnormal(cert, S, g, x) -> bool:
    gog = g.gog
    w, i = S
    bp = gog.base_path(w)
    if not equal(cert.g_local, conjugate(bp, g)) or not equal(cert.x_local, conjugate(bp, x)):
        return False
    if not equal(cert.conjugate, conjugate(cert.g_local, cert.x_local)):
        return False
    if cert.kind == "vertex":
        c = cert.conjugate
        vg = gog.vg(w)
        return c.length == 0 and vg.peripheral_membership(i, c.elems[0]) is None
    return cert.conjugate.length > 0 and is_reduced(cert.conjugate)


@_timed(5, "malnormality", 300)
def criterion_5(out: Outcome) -> None:
    for name, S in (("fig8", ("F", 0)), ("mixed", ("W", 1))):
        gog = load_preset(name)
        xs = [x for x in _nontrivial(gog, 3) if _in_torus(gog, S, x)]
        gs = [g for g in enumerate_elements(gog, 5) if not _in_torus(gog, S, g)]
        if not xs:
            out.failures.append(f"{name}: no torus elements of complexity <= 3")
        for k, g in enumerate(gs):
            for x in xs:
                out.checked += 1
                cert = engine.malnormal_peripheral_check(S, g, x)
                if not _verify_malnormal(cert, S, g, x):
                    out.failures.append(f"{name}: certificate for g={g}, x={x} does not verify")
            if k % 40 == 0:
                _emit(out, gog, "malnormal", [g, xs[k % len(xs)]], S)


# -- 6. validators ------------------------------------------------------------------------


def fiber_matched_gluing():
    """Two circle bundles glued fiber to fiber: the Seifert fibrations extend over the torus."""
    return build_gog({"A": CircleBundle(2), "B": CircleBundle(2)}, [EdgeSpec("e", "A", 0, "B", 0)])


@_timed(6, "validators", 60)
def criterion_6(out: Outcome) -> None:
    out.checked += 1
    if validate_jsj(fiber_matched_gluing()).ok:
        out.failures.append("fiber-matched gluing accepted")
    for name in preset_names():
        out.checked += 1
        gog = load_preset(name)
        if not (validate_graph(gog.graph).ok and validate_jsj(gog).ok):
            out.failures.append(f"preset {name} rejected")
    for seed in range(1000):
        out.checked += 1
        gog = random_gog(seed)
        issues = validate_graph(gog.graph).issues + validate_jsj(gog).issues
        if issues:
            out.failures.append(f"random_gog({seed}): {issues[0]}")
    _emit(out, load_preset("graph_manifold"), "validate", [])


# -- 7. infinite conjugacy classes -----------------------------------------------------------


@_timed(7, "conjugacy classes", 60)
def criterion_7(out: Outcome) -> None:
    for name in MULTI_VERTEX:
        gog = load_preset(name)
        pool = _nontrivial(gog, 4)
        step = max(1, len(pool) // 20)
        for g in pool[::step][:20]:
            out.checked += 1
            wit = engine.conjugacy_class_infinite(g)
            conjs = [conjugate(power(wit.t, n), g) for n in range(wit.checked + 1)]
            if wit.checked < 5 or any(equal(conjs[a], conjs[b]) for a in range(len(conjs)) for b in range(a)):
                out.failures.append(f"{name}: conjugates of {g} by powers of {wit.t} repeat")
            _emit(out, gog, "conjclass", [g])


# -- 8. certificate replay -------------------------------------------------------------------


def _run_emitters() -> None:
    for fn in EMITTERS:
        fn()


@_timed(8, "certificate replay", 120, setup=_run_emitters)
def criterion_8(out: Outcome) -> None:
    certs = [c for fn in EMITTERS for c in fn().certificates]
    for cert in certs:
        out.checked += 1
        try:
            replay(json.loads(json.dumps(cert)))
        except Exception as exc:  # noqa: BLE001 - a rejected certificate is the failure
            out.failures.append(f"{cert['query']}({', '.join(cert['inputs'])}): {exc}")


# -- 9. parser robustness ----------------------------------------------------------------------


@_timed(9, "parser robustness", 120)
def criterion_9(out: Outcome) -> None:
    corpus = []
    for name, text in shipped_files().items():
        out.checked += 1
        first = emit_manifold(parse_manifold(text))
        if emit_manifold(parse_manifold(first)) != first:
            out.failures.append(f"{name}: round trip is not stable")
        if first != emit_manifold(load_preset(name)):
            out.failures.append(f"{name}: shipped file differs from the preset")
        corpus.append(text.encode())
    stats = fuzz(9, 64, 100_000, corpus, gog=load_preset("mixed"))
    out.checked += stats["inputs"]
    for data, msg in stats["crashes"]:
        out.failures.append(f"crash on {data!r}: {msg}")


EMITTERS = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7]
CRITERIA = EMITTERS + [criterion_8, criterion_9]


@pytest.mark.parametrize("number", range(1, 10))
def test_criterion(number):
    out = CRITERIA[number - 1]()
    print(out.line())
    assert out.ok, out.line()


if __name__ == "__main__":
    for fn in CRITERIA:
        print(fn().line(), flush=True)
