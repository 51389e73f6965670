"""Query execution with replayable certificates, and the replay verifier.

A certificate is a plain JSON-ready dict.  Its ``checks`` list holds the
evidence.  Each check is a product of factors (a path in DSL text raised to
an integer power), the reduction steps taking that product to a reduced
path, the result, and a claim about the result: trivial, inside a named
torus, outside the vertex group, and so on.

Which checks an answer needs is decided by :func:`evidence_plan` from the
inputs and the stated answer alone.  :func:`replay` rebuilds that plan,
requires the certificate to match it, forms every product with its own path
arithmetic and re-executes every reduction step using only vertex-group
oracles and the edge matrices.  Certificates emitted without traces are
replayed by finding the steps the same way.  The replayer shares no
reduction code with the engine.
"""

from __future__ import annotations

from typing import Any, Optional

from . import engine
from .dsl import Query, emit_manifold, format_path, parse_element, parse_manifold, parse_path
from .graph import GraphOfGroups, validate_graph, validate_jsj
from .intlin import matvec, solve2_int
from .paths import PathError, PathWord, concat, cyclic_reduce, equal, invert, power, reduce

FORMAT_VERSION = 1


class ReplayError(AssertionError):
    pass


def with_budget(gog: GraphOfGroups, budget: Optional[int]) -> GraphOfGroups:
    """A private copy of ``gog`` whose hyperbolic vertices search words up to ``budget``."""
    if budget is None:
        return gog
    fresh = parse_manifold(emit_manifold(gog))
    for v in fresh.graph.vertices:
        vg = fresh.vg(v)
        if vg.kind == "Kleinian":
            vg.budget = budget
    return fresh


# -- what has to be shown ------------------------------------------------------------


def _commutator(x: str, y: str, claim: str = "trivial") -> dict:
    return {"claim": claim, "factors": [[x, 1], [y, 1], [x, -1], [y, -1]]}


def _conj(h: str, x: str, claim: str, **extra) -> dict:
    """``h^-1 x h``."""
    return {"claim": claim, "factors": [[h, -1], [x, 1], [h, 1]], **extra}


def evidence_plan(gog: GraphOfGroups, kind: str, inputs: list[str], answer: dict, torus) -> list[dict]:
    """The checks that justify ``answer``, without their outcomes."""
    if kind == "validate":
        return []
    x = inputs[0] if inputs else None
    if kind == "reduce":
        return [{"claim": "reduced", "factors": [[x, 1]]}]
    if kind == "equal":
        return [{"claim": "trivial" if answer["equal"] else "nontrivial", "factors": [[x, 1], [inputs[1], -1]]}]
    if kind == "commute":
        return [_commutator(x, inputs[1], "trivial" if answer["commute"] else "nontrivial")]
    if kind == "divisibility":
        return [
            _conj(answer["cyclic_conjugator"], x, "cyclically_reduced"),
            {"claim": "trivial", "factors": [[answer["root"], answer["max_n"]], [x, -1]]},
        ]
    if kind == "classify":
        y = inputs[1]
        plan = [_commutator(x, y)]
        tag = answer["tag"]
        if tag == "CyclicPair":
            a, b = answer["exponents"]
            plan.append({"claim": "trivial", "factors": [[answer["z"], a], [x, -1]]})
            plan.append({"claim": "trivial", "factors": [[answer["z"], b], [y, -1]]})
        elif tag == "TorusCase":
            for z in (x, y):
                plan.append(_conj(answer["conjugator"], z, "torus", vertex=answer["vertex"], torus=answer["torus"]))
        else:
            for z in (x, y):
                plan.append(_conj(answer["conjugator"], z, "vertex", vertex=answer["vertex"]))
        return plan
    if kind == "centralizer":
        plan = [_commutator(x, s) for s in answer["samples"]]
        tag = answer["tag"]
        if tag == "Cyclic":
            if answer.get("exponent") is not None:
                plan.append({"claim": "trivial", "factors": [[answer["generator"], answer["exponent"]], [x, -1]]})
        elif tag == "ConjugateTorus":
            plan.append(_conj(answer["conjugator"], x, "torus", vertex=answer["vertex"], torus=answer["torus"]))
        else:
            plan.append(_conj(answer["conjugator"], x, "vertex", vertex=answer["vertex"]))
        return plan
    if kind == "malnormal":
        w, i = torus
        g, x = inputs
        bp = format_path(gog.base_path(w))
        moved = [[bp, 1], [x, 1], [bp, -1]]
        final = "not_torus" if answer["kind"] == "vertex" else "leaves_vertex"
        return [
            {"claim": "torus", "factors": moved, "vertex": w, "torus": i},
            {"claim": "nontrivial", "factors": moved},
            {"claim": final, "factors": [[bp, 1], [g, 1], [x, 1], [g, -1], [bp, -1]], "vertex": w, "torus": i},
        ]
    if kind == "conjclass":
        t = answer["t"]
        plan = []
        for a in range(answer["checked"] + 1):
            for c in range(a):
                # t^a x t^-a (t^c x t^-c)^-1
                plan.append({"claim": "nontrivial", "factors": [[t, a], [x, 1], [t, c - a], [x, -1], [t, -c]]})
        return plan
    raise ValueError(f"unknown query {kind!r}")


# -- building certificates ---------------------------------------------------------


def _product(gog: GraphOfGroups, factors: list) -> PathWord:
    out = None
    for text, n in factors:
        p = parse_path(text, gog)
        # conjugators are not loops, so only loops are raised to other powers
        p = p if n == 1 else invert(p) if n == -1 else power(p, n)
        out = p if out is None else concat(out, p)
    return out


def _steps(gog: GraphOfGroups, p: PathWord, tr) -> list[dict]:
    # the vertex carrying each replacement depends on the edges left at that step
    edges = list(p.edges)
    out = []
    for s in tr.steps:
        v = p.start if s.index == 1 else gog.terminus(edges[s.index - 2])
        out.append(
            {
                "index": s.index,
                "edge": s.edge,
                "witness": list(s.witness),
                "replacement": gog.vg(v).format(s.replacement),
            }
        )
        del edges[s.index - 1 : s.index + 1]
    return out


def _execute(gog: GraphOfGroups, item: dict, trace: bool) -> tuple[dict, int]:
    p = _product(gog, item["factors"])
    r, tr = reduce(p, trace=True)
    entry = dict(item)
    entry["path"] = format_path(p)
    entry["result"] = format_path(r)
    if item["claim"] == "torus" and r.length == 0:
        coords = gog.vg(r.start).peripheral_membership(item["torus"], r.elems[0])
        entry["coords"] = list(coords) if coords is not None else None
    if trace:
        entry["steps"] = _steps(gog, p, tr)
    return entry, len(tr)


def _cyclic_exponent(gen: PathWord, x: PathWord, limit: int = 64) -> Optional[int]:
    for n in range(1, limit + 1):
        for m in (n, -n):
            if equal(power(gen, m), x):
                return m
    return None


def _answer(gog: GraphOfGroups, query: Query) -> tuple[dict, bool]:
    kind = query.kind
    ps = query.paths
    if kind == "validate":
        rep = validate_graph(gog.graph)
        jsj = validate_jsj(gog)
        return {"valid": rep.ok and jsj.ok, "issues": rep.issues + jsj.issues}, True
    if kind == "reduce":
        r = reduce(ps[0], trace=False)[0]
        return {"reduced": format_path(r), "length": r.length}, True
    if kind == "equal":
        x, y = ps
        if x.start != y.start or x.end != y.end:
            raise PathError("paths with different endpoints cannot be compared")
        return {"equal": equal(x, y)}, True
    if kind == "commute":
        return {"commute": engine.commutes(*ps)}, True
    if kind == "divisibility":
        md = engine.max_divisibility(ps[0])
        _, c = cyclic_reduce(ps[0])
        return {
            "max_n": md.max_n,
            "root": format_path(md.root),
            "bound_used": md.bound_used,
            "bound": md.bound,
            "cyclic_conjugator": format_path(c),
        }, md.complete
    if kind == "classify":
        c = engine.classify_commuting(*ps)
        if isinstance(c, engine.CyclicPair):
            return {"tag": "CyclicPair", "z": format_path(c.z), "exponents": list(c.exponents)}, c.complete
        if isinstance(c, engine.TorusCase):
            return {"tag": "TorusCase", "vertex": c.vertex, "torus": c.torus, "conjugator": format_path(c.conjugator)}, True
        return {"tag": "SeifertCase", "vertex": c.vertex, "conjugator": format_path(c.conjugator)}, True
    if kind == "centralizer":
        x = ps[0]
        desc = engine.centralizer(x)
        samples = [format_path(s) for s in engine.desc_samples(desc)]
        if isinstance(desc, engine.Cyclic):
            ans = {
                "tag": "Cyclic",
                "generator": format_path(desc.generator),
                "primitivity_verified": desc.primitivity_verified,
                "exponent": _cyclic_exponent(desc.generator, x),
            }
            complete = desc.primitivity_verified
        elif isinstance(desc, engine.ConjugateTorus):
            ans = {"tag": "ConjugateTorus", "vertex": desc.vertex, "torus": desc.torus}
            complete = True
        else:
            vg = gog.vg(desc.vertex)
            inner = desc.inner
            ans = {
                "tag": "ConjugateSeifertCentralizer",
                "vertex": desc.vertex,
                "inner": {
                    "kind": inner.kind,
                    "gens": [vg.format(g) for g in inner.gens],
                    "torus": inner.torus,
                    "verified": inner.verified,
                },
            }
            complete = inner.verified
        if not isinstance(desc, engine.Cyclic):
            ans["conjugator"] = format_path(desc.conjugator)
        ans["samples"] = samples
        return ans, complete
    if kind == "malnormal":
        cert = engine.malnormal_peripheral_check(query.torus, *ps)
        return {"malnormal": True, "kind": cert.kind, "torus": list(query.torus)}, True
    if kind == "conjclass":
        wit = engine.conjugacy_class_infinite(ps[0])
        return {"infinite": True, "t": format_path(wit.t), "checked": wit.checked}, True
    raise ValueError(f"unknown query {kind!r}")


def run_query(gog: GraphOfGroups, query: Query, trace: bool = True) -> dict:
    """Answer ``query`` and return its certificate document.

    Raises :class:`SearchExhausted` when a bounded search runs out of budget.
    """
    answer, complete = _answer(gog, query)
    inputs = [format_path(p) for p in query.paths]
    checks = []
    steps = 0
    for item in evidence_plan(gog, query.kind, inputs, answer, query.torus):
        entry, n = _execute(gog, item, trace)
        checks.append(entry)
        steps += n
    budget = max([gog.vg(v).budget for v in gog.graph.vertices if gog.vg(v).kind == "Kleinian"] or [0])
    return {
        "format_version": FORMAT_VERSION,
        "manifold": emit_manifold(gog),
        "query": query.kind,
        "inputs": inputs,
        "torus": list(query.torus) if query.torus else None,
        "answer": answer,
        "complete": complete,
        "budget": {"kleinian_word_length": budget, "reduction_steps": steps},
        "traced": trace,
        "checks": checks,
    }


# -- replay -----------------------------------------------------------------------


class _Replayer:
    """Re-executes certificate checks using vertex-group oracles only.

    Paths are handled as ``(start, elems, edges)`` triples.
    """

    def __init__(self, gog: GraphOfGroups):
        self.gog = gog

    def same(self, v: str, a, b) -> bool:
        vg = self.gog.vg(v)
        return vg.is_identity(vg.mul(a, vg.inv(b)))

    def image(self, e: str, a) -> Any:
        em = self.gog.edge_maps[e]
        return self.gog.vg(em.target_vertex).torus_elem(em.target_torus, matvec(em.matrix, a))

    def preimage(self, e: str, g) -> Optional[tuple[int, int]]:
        em = self.gog.edge_maps[e]
        coords = self.gog.vg(em.target_vertex).peripheral_membership(em.target_torus, g)
        if coords is None:
            return None
        return solve2_int(em.matrix, coords)

    def parse(self, text: str):
        p = parse_path(text, self.gog)
        return p.start, list(p.elems), list(p.edges)

    def verts(self, start: str, edges: list) -> list[str]:
        return [start] + [self.gog.terminus(e) for e in edges]

    def inverse(self, path):
        start, elems, edges = path
        vs = self.verts(start, edges)
        return (
            vs[-1],
            [self.gog.vg(v).inv(g) for v, g in zip(reversed(vs), reversed(elems))],
            [self.gog.bar(e) for e in reversed(edges)],
        )

    def join(self, p, q):
        if p is None:
            return q
        (s1, el1, ed1), (s2, el2, ed2) = p, q
        v = self.verts(s1, ed1)[-1]
        if v != s2:
            raise ReplayError("factors do not form a path")
        vg = self.gog.vg(v)
        return s1, el1[:-1] + [vg.mul(el1[-1], el2[0])] + el2[1:], ed1 + ed2

    def product(self, factors: list):
        out = None
        for text, n in factors:
            base = self.parse(text)
            if n == 0:
                start = base[0]
                base, n = (start, [self.gog.vg(start).identity()], []), 1
            elif n < 0:
                base, n = self.inverse(base), -n
            for _ in range(n):
                out = self.join(out, base)
        return out

    def run_steps(self, path, steps: list[dict]):
        gog = self.gog
        start, elems, edges = path[0], list(path[1]), list(path[2])
        for k, s in enumerate(steps):
            i = s["index"]
            if not 1 <= i < len(edges):
                raise ReplayError(f"step {k}: index {i} out of range")
            e = edges[i - 1]
            if s["edge"] != e or edges[i] != gog.bar(e):
                raise ReplayError(f"step {k}: edges at {i} do not backtrack along {s['edge']}")
            a = tuple(s["witness"])
            if not self.same(gog.terminus(e), self.image(e, a), elems[i]):
                raise ReplayError(f"step {k}: witness does not map onto the pinched element")
            v = start if i == 1 else gog.terminus(edges[i - 2])
            vg = gog.vg(v)
            expect = vg.mul(vg.mul(elems[i - 1], self.image(gog.bar(e), a)), elems[i + 1])
            if not self.same(v, expect, parse_element(s["replacement"], vg)):
                raise ReplayError(f"step {k}: replacement differs from the recomputed product")
            elems[i - 1 : i + 2] = [expect]
            del edges[i - 1 : i + 1]
        return start, elems, edges

    def derive_steps(self, path) -> list[dict]:
        """Leftmost steps for an untraced check, found with the same oracles."""
        gog = self.gog
        start, elems, edges = path[0], list(path[1]), list(path[2])
        steps = []
        while True:
            for i in range(1, len(edges)):
                e = edges[i - 1]
                a = self.preimage(e, elems[i]) if edges[i] == gog.bar(e) else None
                if a is not None:
                    break
            else:
                return steps
            v = start if i == 1 else gog.terminus(edges[i - 2])
            vg = gog.vg(v)
            new = vg.mul(vg.mul(elems[i - 1], self.image(gog.bar(e), a)), elems[i + 1])
            steps.append({"index": i, "edge": e, "witness": list(a), "replacement": vg.format(new)})
            elems[i - 1 : i + 2] = [new]
            del edges[i - 1 : i + 1]

    def is_reduced(self, elems, edges) -> bool:
        for i in range(1, len(edges)):
            if edges[i] == self.gog.bar(edges[i - 1]) and self.preimage(edges[i - 1], elems[i]) is not None:
                return False
        return True

    def matches(self, path, text: str) -> bool:
        start, elems, edges = path
        p = parse_path(text, self.gog)
        return (
            p.start == start
            and list(p.edges) == edges
            and all(self.same(v, a, b) for v, a, b in zip(self.verts(start, edges), p.elems, elems))
        )

    def check(self, c: dict):
        gog = self.gog
        path = self.product(c["factors"])
        if not self.matches(path, c["path"]):
            raise ReplayError("stated product differs from the recomputed one")
        steps = c["steps"] if "steps" in c else self.derive_steps(path)
        start, elems, edges = self.run_steps(path, steps)
        if not self.is_reduced(elems, edges):
            raise ReplayError("trace stops before the path is reduced")
        if not self.matches((start, elems, edges), c["result"]):
            raise ReplayError("stated result differs from the replayed one")
        claim = c["claim"]
        flat = not edges
        if claim == "trivial":
            if not (flat and gog.vg(start).is_identity(elems[0])):
                raise ReplayError("claimed trivial path is not trivial")
        elif claim == "nontrivial":
            if flat and gog.vg(start).is_identity(elems[0]):
                raise ReplayError("claimed nontrivial path is trivial")
        elif claim in ("vertex", "torus", "not_torus"):
            if not flat or start != c["vertex"]:
                raise ReplayError("path does not reduce into the named vertex group")
            vg = gog.vg(start)
            if claim == "torus":
                if c.get("coords") is None:
                    raise ReplayError("torus claim without coordinates")
                if not self.same(start, vg.torus_elem(c["torus"], tuple(c["coords"])), elems[0]):
                    raise ReplayError("torus coordinates do not reproduce the element")
            if claim == "not_torus" and vg.peripheral_membership(c["torus"], elems[0]) is not None:
                raise ReplayError("element lies in the torus after all")
        elif claim == "leaves_vertex":
            if flat:
                raise ReplayError("reduced path has length zero")
        elif claim == "cyclically_reduced":
            if edges and edges[0] == gog.bar(edges[-1]):
                if self.preimage(edges[-1], gog.vg(start).mul(elems[-1], elems[0])) is not None:
                    raise ReplayError("reduced path is not cyclically reduced")
        elif claim != "reduced":
            raise ReplayError(f"unknown claim {claim!r}")
        return start, elems, edges


_PLAN_KEYS = ("claim", "factors", "vertex", "torus")


def replay(cert: dict, gog: Optional[GraphOfGroups] = None) -> bool:
    """Verify ``cert``: the evidence matches the plan for its answer and every check holds.

    Returns True or raises :class:`ReplayError` naming the first failure.
    """
    if cert.get("format_version") != FORMAT_VERSION:
        raise ReplayError("unsupported certificate format version")
    if gog is None:
        gog = parse_manifold(cert["manifold"])
    kind, ans = cert["query"], cert["answer"]
    torus = tuple(cert["torus"]) if cert.get("torus") else None
    plan = evidence_plan(gog, kind, cert["inputs"], ans, torus)
    checks = cert["checks"]
    if len(plan) != len(checks):
        raise ReplayError("evidence does not cover the answer")
    for want, c in zip(plan, checks):
        if any(want.get(k) != c.get(k) for k in _PLAN_KEYS):
            raise ReplayError(f"check {c.get('claim')!r} does not match the evidence plan")
    rp = _Replayer(gog)
    results = [rp.check(c) for c in checks]
    if kind == "reduce" and not rp.matches(results[0], ans["reduced"]):
        raise ReplayError("stated reduced path differs from the replayed one")
    if kind == "divisibility":
        cl = len(results[0][2])
        if ans["max_n"] > ans["bound"]:
            raise ReplayError("root exponent exceeds the stated bound")
        if (cl > 0) != (ans["bound_used"] == "ClBound") or (cl > 0 and ans["bound"] != cl):
            raise ReplayError("bound tag inconsistent with the cyclic length")
    if kind == "classify" and ans["tag"] == "SeifertCase" and not gog.vg(ans["vertex"]).is_seifert:
        raise ReplayError("Seifert case at a non-Seifert vertex")
    if kind == "malnormal":
        w, i = torus
        if gog.vg(w).kind != "Kleinian" or (w, i) not in gog.free_tori():
            raise ReplayError("torus is not a free boundary torus of a hyperbolic vertex")
    return True
