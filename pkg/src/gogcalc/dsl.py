"""Text format for graphs of groups, path expressions and queries.

The grammar is documented (EBNF) in the README.  Parsing is a hand-written
tokenizer plus recursive descent; every failure is a :class:`ParseError`
carrying a 1-based line and column.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .backends.abelian import FreeAbelian
from .backends.base import BackendError, VertexGroup
from .backends.kleinian import Kleinian
from .backends.seifert import CircleBundle, ConeSFS
from .graph import EdgeSpec, GraphOfGroups, build_gog, edge_specs
from .intlin import det2
from .paths import PathWord
from .quadint import Ring


class ParseError(ValueError):
    def __init__(self, line: int, column: int, expected: str, message: str = ""):
        self.line = line
        self.column = column
        self.expected = expected
        self.message = message or f"expected {expected}"
        super().__init__(f"{line}:{column}: {self.message}")


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT, INT, PUNCT, EOF
    text: str
    line: int
    column: int


_PUNCT = set("()[]{}<>,;:.=^")


def tokenize(text: Union[str, bytes]) -> list[Token]:
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            before = bytes(text)[: exc.start]
            line = before.count(b"\n") + 1
            col = exc.start - (before.rfind(b"\n") + 1) + 1
            raise ParseError(line, col, "UTF-8 text", "invalid UTF-8 byte") from None
    out: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch in " \t\r":
            i, col = i + 1, col + 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_col = col
        if ch.isascii() and (ch.isalpha() or ch in "_~"):
            j = i + 1
            while j < n and text[j].isascii() and (text[j].isalnum() or text[j] == "_"):
                j += 1
            out.append(Token("IDENT", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if ch.isascii() and ch.isdigit() or (ch == "-" and i + 1 < n and text[i + 1].isascii() and text[i + 1].isdigit()):
            j = i + 1
            while j < n and text[j].isascii() and text[j].isdigit():
                j += 1
            out.append(Token("INT", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if ch == "-" and i + 1 < n and text[i + 1] == ">":
            out.append(Token("PUNCT", "->", line, start_col))
            i, col = i + 2, col + 2
            continue
        if ch in _PUNCT:
            out.append(Token("PUNCT", ch, line, start_col))
            i, col = i + 1, col + 1
            continue
        raise ParseError(line, start_col, "a token", f"unexpected character {ch!r}")
    out.append(Token("EOF", "", line, col))
    return out


class _Parser:
    def __init__(self, text: Union[str, bytes]):
        self.toks = tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def error(self, expected: str, tok: Optional[Token] = None, message: str = "") -> ParseError:
        t = tok or self.tok
        found = t.text if t.kind != "EOF" else "end of input"
        return ParseError(t.line, t.column, expected, message or f"expected {expected}, found {found!r}")

    def at(self, text: str) -> bool:
        return self.tok.kind in ("PUNCT", "IDENT") and self.tok.text == text

    def take(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(repr(text))
        t = self.tok
        self.pos += 1
        return t

    def ident(self, what: str = "identifier") -> Token:
        if self.tok.kind != "IDENT":
            raise self.error(what)
        t = self.tok
        self.pos += 1
        return t

    def integer(self) -> int:
        if self.tok.kind != "INT":
            raise self.error("integer")
        t = self.tok
        self.pos += 1
        if len(t.text) > 40:
            raise self.error("integer of reasonable size", t)
        return int(t.text)

    def int_list(self) -> list[int]:
        self.take("[")
        out = [self.integer()]
        while self.at(","):
            self.take(",")
            out.append(self.integer())
        self.take("]")
        return out

    def int_matrix(self) -> tuple:
        self.take("[")
        rows = []
        for k in range(2):
            if k:
                self.take(",")
            self.take("[")
            a = self.integer()
            self.take(",")
            b = self.integer()
            self.take("]")
            rows.append((a, b))
        self.take("]")
        return tuple(rows)

    def quad(self) -> tuple[int, int]:
        self.take("(")
        a = self.integer()
        self.take(",")
        b = self.integer()
        self.take(")")
        return a, b

    def quad_matrix(self) -> tuple:
        self.take("[")
        rows = []
        for k in range(2):
            if k:
                self.take(",")
            self.take("[")
            a = self.quad()
            self.take(",")
            b = self.quad()
            self.take("]")
            rows.append((a, b))
        self.take("]")
        return tuple(rows)

    def letters(self, stop: set[str]) -> list[tuple[str, int, Token]]:
        """``gen`` / ``gen^int`` tokens up to a stop symbol; ``1`` is the empty word."""
        out = []
        while True:
            t = self.tok
            if t.kind == "INT" and t.text == "1":
                self.pos += 1
                continue
            if t.kind != "IDENT":
                break
            self.pos += 1
            e = 1
            if self.at("^"):
                self.take("^")
                e = self.integer()
            out.append((t.text, e, t))
        if not (self.tok.kind == "PUNCT" and self.tok.text in stop) and self.tok.kind != "EOF":
            raise self.error("generator, '1' or one of " + " ".join(repr(s) for s in sorted(stop)))
        if self.tok.kind == "EOF" and "EOF" not in stop:
            raise self.error(" or ".join(repr(s) for s in sorted(stop)))
        return out

    def bracket_word(self) -> list[tuple[str, int, Token]]:
        self.take("<")
        w = self.letters({">"})
        self.take(">")
        return w

    def keyword_arg(self, name: str) -> Token:
        t = self.take(name)
        self.take("=")
        return t


def _word(vg: VertexGroup, letters, exc_tok: Token):
    out = vg.identity()
    for name, e, tok in letters:
        try:
            g = vg.generator(name)
        except BackendError:
            raise ParseError(tok.line, tok.column, "generator of " + vg.kind, f"unknown generator {name!r}") from None
        if abs(e) > 1000:
            raise ParseError(tok.line, tok.column, "exponent of reasonable size")
        out = vg.mul(out, vg.power(g, e))
    return out


# -- manifold documents ------------------------------------------------------------


def _backend(p: _Parser) -> VertexGroup:
    kind = p.ident("backend kind")
    p.take("(")
    try:
        if kind.text == "free_abelian":
            p.keyword_arg("rank")
            rank = p.integer()
            tori = None
            if p.at(","):
                p.take(",")
                p.keyword_arg("tori")
                p.take("[")
                tori = []
                while True:
                    p.take("(")
                    u = p.int_list()
                    p.take(",")
                    v = p.int_list()
                    p.take(")")
                    tori.append((u, v))
                    if not p.at(","):
                        break
                    p.take(",")
                p.take("]")
            p.take(")")
            if not 1 <= rank <= 8:
                raise ParseError(kind.line, kind.column, "rank between 1 and 8", "rank out of range")
            return FreeAbelian(rank, tori)
        if kind.text == "circle_bundle":
            p.keyword_arg("k")
            k = p.integer()
            p.take(")")
            if not 2 <= k <= 16:
                raise ParseError(kind.line, kind.column, "k between 2 and 16", "free rank must be between 2 and 16")
            return CircleBundle(k)
        if kind.text == "cone_sfs":
            p.keyword_arg("alpha")
            alphas = p.int_list()
            p.take(",")
            p.keyword_arg("beta")
            betas = p.int_list()
            p.take(")")
            if any(a < 2 for a in alphas):
                raise ParseError(kind.line, kind.column, "cone orders >= 2", "cone order must be ≥ 2")
            if any(a > 10**4 for a in alphas) or len(alphas) > 16:
                raise ParseError(kind.line, kind.column, "cone data of reasonable size")
            return ConeSFS(alphas, betas)
        if kind.text == "kleinian":
            p.keyword_arg("ring")
            ring = p.quad()
            p.take(",")
            p.keyword_arg("gens")
            p.take("{")
            gens = {}
            while True:
                g = p.ident("generator name")
                if g.text in gens or g.text == "h" or not g.text.isalpha():
                    raise p.error("a fresh alphabetic generator name", g)
                p.take("=")
                gens[g.text] = p.quad_matrix()
                if not p.at(","):
                    break
                p.take(",")
            p.take("}")
            relators = []
            cusps = []
            budget = 8
            while p.at(","):
                p.take(",")
                key = p.ident("'relators', 'cusps' or 'budget'")
                p.take("=")
                if key.text == "relators":
                    p.take("[")
                    if not p.at("]"):
                        relators.append(p.bracket_word())
                        while p.at(","):
                            p.take(",")
                            relators.append(p.bracket_word())
                    p.take("]")
                elif key.text == "cusps":
                    p.take("[")
                    while True:
                        p.take("(")
                        mu = p.bracket_word()
                        p.take(",")
                        la = p.bracket_word()
                        p.take(",")
                        P = p.quad_matrix()
                        p.take(")")
                        cusps.append((mu, la, P))
                        if not p.at(","):
                            break
                        p.take(",")
                    p.take("]")
                elif key.text == "budget":
                    budget = p.integer()
                    if not 0 <= budget <= 12:
                        raise p.error("budget between 0 and 12", key)
                else:
                    raise p.error("'relators', 'cusps' or 'budget'", key)
            p.take(")")
            for seq in relators + [w for c in cusps for w in c[:2]]:
                for name, e, tok in seq:
                    if name not in gens:
                        raise ParseError(tok.line, tok.column, "declared generator", f"unknown generator {name!r}")
                    if abs(e) > 1000:
                        raise ParseError(tok.line, tok.column, "exponent of reasonable size")
            plain = lambda seq: [(n, e) for n, e, _ in seq]  # noqa: E731
            if ring[1] == 0 and ring[0] == 0 or abs(ring[0]) > 100 or abs(ring[1]) > 100:
                raise ParseError(kind.line, kind.column, "a small nondegenerate ring")
            return Kleinian(
                Ring(*ring),
                gens,
                relators=[plain(r) for r in relators],
                cusps=[(plain(mu), plain(la), P) for mu, la, P in cusps],
                budget=budget,
            )
    except ParseError:
        raise
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(kind.line, kind.column, "valid backend parameters", str(exc)) from None
    raise p.error("one of free_abelian, circle_bundle, cone_sfs, kleinian", kind)


def parse_manifold(text: Union[str, bytes]) -> GraphOfGroups:
    """Parse and build a graph of groups; nothing is returned on error."""
    p = _Parser(text)
    name = ""
    vertices: dict[str, VertexGroup] = {}
    vtok: dict[str, Token] = {}
    edges: list[EdgeSpec] = []
    etok: dict[str, Token] = {}
    base: Optional[Token] = None
    first = p.tok
    while p.tok.kind != "EOF":
        kw = p.ident("'manifold', 'vertex', 'edge' or 'base'")
        if kw.text == "manifold":
            name = p.ident("manifold name").text
        elif kw.text == "vertex":
            v = p.ident("vertex name")
            if v.text in vertices or v.text.startswith("~"):
                raise p.error("a new vertex name", v, f"duplicate or invalid vertex {v.text!r}")
            p.take(":")
            vertices[v.text] = _backend(p)
            vtok[v.text] = v
        elif kw.text == "edge":
            e = p.ident("edge name")
            if e.text.startswith("~") or e.text in etok:
                raise p.error("a new edge name without '~'", e, f"duplicate or invalid edge {e.text!r}")
            p.take(":")
            o = p.ident("vertex name")
            p.take(".")
            ot = p.ident("torus (T0, T1, ...)")
            p.take("->")
            t = p.ident("vertex name")
            p.take(".")
            tt = p.ident("torus (T0, T1, ...)")
            m = p.int_matrix()
            mb = ((1, 0), (0, 1))
            if p.at("["):
                mb = p.int_matrix()
            for vt in (o, t):
                if vt.text not in vertices:
                    raise p.error("declared vertex", vt, f"unknown vertex {vt.text!r}")
            idx = []
            for vt, tt_ in ((o, ot), (t, tt)):
                if not (tt_.text.startswith("T") and tt_.text[1:].isdigit() and len(tt_.text) < 6):
                    raise p.error("torus (T0, T1, ...)", tt_)
                i = int(tt_.text[1:])
                if i >= len(vertices[vt.text].tori):
                    raise p.error("existing torus", tt_, f"vertex {vt.text} has no torus {tt_.text}")
                idx.append(i)
            for mat in (m, mb):
                if det2(mat) == 0:
                    raise p.error("injective matrix", e, "edge map not injective")
            edges.append(EdgeSpec(e.text, o.text, idx[0], t.text, idx[1], m, mb))
            etok[e.text] = e
        elif kw.text == "base":
            base = p.ident("vertex name")
            if base.text not in vertices:
                raise p.error("declared vertex", base, f"unknown vertex {base.text!r}")
        else:
            raise p.error("'manifold', 'vertex', 'edge' or 'base'", kw)
        if p.at(";"):
            p.take(";")
    if not vertices:
        raise p.error("at least one vertex declaration", first)
    try:
        return build_gog(vertices, edges, base.text if base else None, name)
    except ValueError as exc:
        t = base or first
        raise ParseError(t.line, t.column, "a connected graph of groups", str(exc)) from None


def _fmt_quad_matrix(M) -> str:
    return "[" + ", ".join("[" + ", ".join(f"({a}, {b})" for a, b in row) + "]" for row in M) + "]"


def _fmt_int_matrix(M) -> str:
    return "[" + ", ".join(f"[{r[0]}, {r[1]}]" for r in M) + "]"


def _fmt_letters(word) -> str:
    return "<" + " ".join(n if e == 1 else f"{n}^{e}" for n, e in word) + ">"


def format_backend(vg: VertexGroup) -> str:
    if isinstance(vg, FreeAbelian):
        tori = ", ".join(f"({list(t.basis[0])}, {list(t.basis[1])})" for t in vg.tori)
        return f"free_abelian(rank={vg.rank}, tori=[{tori}])"
    if isinstance(vg, CircleBundle):
        return f"circle_bundle(k={vg.k})"
    if isinstance(vg, ConeSFS):
        return f"cone_sfs(alpha={list(vg.alphas)}, beta={list(vg.betas)})"
    if isinstance(vg, Kleinian):
        gens = ", ".join(f"{k}={_fmt_quad_matrix(M)}" for k, M in vg.generator_matrices.items())
        rel = ", ".join(_fmt_letters(r) for r in vg.relators)
        cusps = (",\n" + " " * 11).join(
            f"({_fmt_letters(mu)}, {_fmt_letters(la)}, {_fmt_quad_matrix(P)})" for mu, la, P in vg.cusp_words
        )
        return (
            f"kleinian(\n    ring=({vg.ring.p}, {vg.ring.q}),\n    gens={{{gens}}},\n    relators=[{rel}],\n"
            f"    cusps=[{cusps}],\n    budget={vg.budget})"
        )
    raise TypeError(f"cannot serialize {type(vg).__name__}")


def emit_manifold(gog: GraphOfGroups) -> str:
    lines = []
    if gog.name:
        lines.append(f"manifold {gog.name}")
    for v in gog.graph.vertices:
        lines.append(f"vertex {v} : {format_backend(gog.vg(v))}")
    for s in edge_specs(gog):
        tail = "" if s.bar_matrix == ((1, 0), (0, 1)) else " " + _fmt_int_matrix(s.bar_matrix)
        lines.append(
            f"edge {s.name} : {s.origin}.T{s.origin_torus} -> {s.terminus}.T{s.terminus_torus} "
            f"{_fmt_int_matrix(s.matrix)}{tail}"
        )
    lines.append(f"base {gog.base_vertex}")
    return "\n".join(lines) + "\n"


# -- paths and queries ----------------------------------------------------------------


def _path(p: _Parser, gog: GraphOfGroups, stop: set[str]) -> PathWord:
    v = p.ident("vertex name")
    if v.text not in gog.graph.vertices:
        raise p.error("vertex name", v, f"unknown vertex {v.text!r}")
    p.take(":")
    elems, edges = [], []
    at = v.text
    stops = stop | {";"}
    while True:
        t0 = p.tok
        w = p.letters(stops)
        elems.append(_word(gog.vg(at), w, t0))
        if not p.at(";"):
            break
        p.take(";")
        e = p.ident("edge name")
        if e.text not in gog.graph.origin:
            raise p.error("edge name", e, f"unknown edge {e.text!r}")
        if gog.origin(e.text) != at:
            raise p.error(f"an edge leaving {at}", e, f"edge {e.text} does not start at {at}")
        edges.append(e.text)
        at = gog.terminus(e.text)
        if not p.at(";"):
            elems.append(gog.vg(at).identity())
            break
        p.take(";")
    return PathWord(gog, v.text, tuple(elems), tuple(edges))


def parse_path(text: Union[str, bytes], gog: GraphOfGroups) -> PathWord:
    p = _Parser(text)
    path = _path(p, gog, {"EOF"})
    if p.tok.kind != "EOF":
        raise p.error("end of path")
    return path


def parse_element(text: str, vg: VertexGroup):
    """A vertex element written as a generator word (``1`` for the identity)."""
    p = _Parser(text)
    t0 = p.tok
    w = p.letters({"EOF"})
    return _word(vg, w, t0)


def format_path(p: PathWord) -> str:
    gog = p.gog
    parts = [gog.vg(p.start).format(p.elems[0])]
    for i, e in enumerate(p.edges):
        parts.append(e)
        parts.append(gog.vg(p.vertex(i + 1)).format(p.elems[i + 1]))
    return f"{p.start}: " + " ; ".join(parts)


QUERY_ARITY = {
    "reduce": 1,
    "equal": 2,
    "commute": 2,
    "classify": 2,
    "centralizer": 1,
    "divisibility": 1,
    "malnormal": 2,
    "conjclass": 1,
    "validate": 0,
}


@dataclass(frozen=True)
class Query:
    kind: str
    paths: tuple[PathWord, ...] = ()
    torus: Optional[tuple[str, int]] = None


def parse_query(text: Union[str, bytes], gog: GraphOfGroups) -> Query:
    p = _Parser(text)
    kw = p.ident("query name")
    if kw.text not in QUERY_ARITY:
        raise p.error("one of " + ", ".join(QUERY_ARITY), kw, f"unknown query {kw.text!r}")
    paths = []
    torus = None
    if kw.text != "validate":
        p.take("(")
        if kw.text == "malnormal":
            v = p.ident("vertex name")
            p.take(".")
            tt = p.ident("torus (T0, T1, ...)")
            if v.text not in gog.graph.vertices:
                raise p.error("vertex name", v, f"unknown vertex {v.text!r}")
            if not (tt.text.startswith("T") and tt.text[1:].isdigit() and len(tt.text) < 6):
                raise p.error("torus (T0, T1, ...)", tt)
            if int(tt.text[1:]) >= len(gog.vg(v.text).tori):
                raise p.error("existing torus", tt, f"vertex {v.text} has no torus {tt.text}")
            torus = (v.text, int(tt.text[1:]))
            p.take(",")
        for k in range(QUERY_ARITY[kw.text]):
            if k:
                p.take(",")
            paths.append(_path(p, gog, {",", ")"}))
        p.take(")")
    if p.at(";"):
        p.take(";")
    if p.tok.kind != "EOF":
        raise p.error("end of query")
    return Query(kw.text, tuple(paths), torus)
