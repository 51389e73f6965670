"""Finite graphs with an edge involution and graphs of groups over them."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .backends.base import VertexGroup
from .intlin import det2, matvec, solve2_int


class GraphError(ValueError):
    pass


@dataclass
class ValidationReport:
    issues: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class Graph:
    """Directed edges with origin, terminus and an explicit involution ``bar``.

    Nothing is checked at construction; use :func:`validate_graph`.
    """

    vertices: tuple[str, ...]
    edges: tuple[str, ...]
    origin: Mapping[str, str]
    terminus: Mapping[str, str]
    bar: Mapping[str, str]

    def out_edges(self, v: str) -> list[str]:
        return sorted(e for e in self.edges if self.origin[e] == v)


def validate_graph(g: Graph) -> ValidationReport:
    rep = ValidationReport()
    verts = set(g.vertices)
    if not verts:
        rep.issues.append("graph has no vertices")
        return rep
    if len(verts) != len(g.vertices):
        rep.issues.append("duplicate vertex ids")
    if len(set(g.edges)) != len(g.edges):
        rep.issues.append("duplicate edge ids")
    for e in g.edges:
        for name, table in (("origin", g.origin), ("terminus", g.terminus), ("bar", g.bar)):
            if e not in table:
                rep.issues.append(f"edge {e} has no {name}")
        if e not in g.origin or e not in g.terminus or e not in g.bar:
            continue
        if g.origin[e] not in verts or g.terminus[e] not in verts:
            rep.issues.append(f"edge {e} has an endpoint outside the vertex set")
        b = g.bar[e]
        if b == e:
            rep.issues.append(f"involution has fixed point: {e}")
            continue
        if b not in g.bar:
            rep.issues.append(f"bar of {e} is not an edge")
            continue
        if g.bar[b] != e:
            rep.issues.append(f"bar is not an involution at {e}")
        if g.origin.get(e) != g.terminus.get(b):
            rep.issues.append(f"origin({e}) differs from terminus(bar({e}))")
    if rep.issues:
        return rep
    seen = {g.vertices[0]}
    todo = [g.vertices[0]]
    while todo:
        v = todo.pop()
        for e in g.edges:
            if g.origin[e] == v and g.terminus[e] not in seen:
                seen.add(g.terminus[e])
                todo.append(g.terminus[e])
    if seen != verts:
        rep.issues.append("graph is not connected: unreachable " + ", ".join(sorted(verts - seen)))
    return rep


@dataclass(frozen=True)
class EdgeMap:
    """``phi_e``: edge coordinates ``a`` go to ``matrix @ a`` in a peripheral torus."""

    target_vertex: str
    target_torus: int
    matrix: tuple[tuple[int, int], tuple[int, int]]


class GraphOfGroups:
    """A graph of groups with ``Z^2`` edge groups over pluggable vertex backends."""

    def __init__(
        self,
        graph: Graph,
        vertex_groups: Mapping[str, VertexGroup],
        edge_maps: Mapping[str, EdgeMap],
        base_vertex: Optional[str] = None,
        name: str = "",
    ):
        report = validate_graph(graph)
        if not report.ok:
            raise GraphError("; ".join(report.issues))
        self.graph = graph
        self.vertex_groups = dict(vertex_groups)
        self.edge_maps = dict(edge_maps)
        self.name = name
        for v in graph.vertices:
            if v not in self.vertex_groups:
                raise GraphError(f"vertex {v} has no group")
        for e in graph.edges:
            em = self.edge_maps.get(e)
            if em is None:
                raise GraphError(f"edge {e} has no edge map")
            if em.target_vertex != graph.terminus[e]:
                raise GraphError(f"edge map of {e} does not target its terminus")
            vg = self.vertex_groups[em.target_vertex]
            if not 0 <= em.target_torus < len(vg.tori):
                raise GraphError(f"edge {e}: vertex {em.target_vertex} has no torus {em.target_torus}")
            if det2(em.matrix) == 0:
                raise GraphError(f"edge map of {e} is not injective")
        self.base_vertex = base_vertex if base_vertex is not None else sorted(graph.vertices)[0]
        if self.base_vertex not in graph.vertices:
            raise GraphError(f"unknown base vertex {self.base_vertex}")
        self._tree = self._bfs_tree()

    # -- structure ----------------------------------------------------------
    def origin(self, e: str) -> str:
        return self.graph.origin[e]

    def terminus(self, e: str) -> str:
        return self.graph.terminus[e]

    def bar(self, e: str) -> str:
        return self.graph.bar[e]

    def vg(self, v: str) -> VertexGroup:
        return self.vertex_groups[v]

    def edge_torus(self, e: str) -> int:
        return self.edge_maps[e].target_torus

    # -- edge monomorphisms -------------------------------------------------
    def phi(self, e: str, a: Sequence[int]):
        """``phi_e(a)`` as an element of the terminus group."""
        em = self.edge_maps[e]
        return self.vg(em.target_vertex).torus_elem(em.target_torus, matvec(em.matrix, a))

    def phi_inv(self, e: str, g) -> Optional[tuple[int, int]]:
        """Edge coordinates ``a`` with ``phi_e(a) = g``, or None if ``g`` is not in the image."""
        em = self.edge_maps[e]
        coords = self.vg(em.target_vertex).peripheral_membership(em.target_torus, g)
        if coords is None:
            return None
        return solve2_int(em.matrix, coords)

    # -- base paths ---------------------------------------------------------
    def _bfs_tree(self) -> dict[str, list[str]]:
        """Edge sequence from each vertex to the base along a BFS spanning tree."""
        to_base = {self.base_vertex: []}
        queue = deque([self.base_vertex])
        while queue:
            u = queue.popleft()
            for e in sorted(self.graph.edges, key=lambda x: (self.graph.terminus[x], x)):
                # e goes from v to u; v reaches the base through e
                if self.graph.terminus[e] != u:
                    continue
                v = self.graph.origin[e]
                if v not in to_base:
                    to_base[v] = [e] + to_base[u]
                    queue.append(v)
        return to_base

    def base_edges(self, v: str) -> list[str]:
        return list(self._tree[v])

    def base_path(self, v: str):
        """The chosen path from ``v`` to the base vertex, identity vertex elements."""
        from .paths import PathWord

        edges = self._tree[v]
        verts = [v] + [self.terminus(e) for e in edges]
        elems = tuple(self.vg(x).identity() for x in verts)
        return PathWord(self, v, elems, tuple(edges))

    def seifert_bound(self) -> int:
        """Largest singular fiber order over Seifert vertices (1 if there are none)."""
        return max([self.vg(v).singular_order for v in self.graph.vertices if self.vg(v).is_seifert] or [1])

    def free_tori(self) -> list[tuple[str, int]]:
        used = {(self.edge_maps[e].target_vertex, self.edge_maps[e].target_torus) for e in self.graph.edges}
        return [
            (v, i)
            for v in sorted(self.graph.vertices)
            for i in range(len(self.vg(v).tori))
            if (v, i) not in used
        ]


def validate_jsj(gog: GraphOfGroups) -> ValidationReport:
    """Structural checks expected of a JSJ graph of groups."""
    rep = ValidationReport()
    g = gog.graph
    used: dict[tuple[str, int], str] = {}
    for e in sorted(g.edges):
        key = (gog.edge_maps[e].target_vertex, gog.edge_maps[e].target_torus)
        if key in used:
            rep.issues.append(f"torus {key[1]} of vertex {key[0]} is used by edges {used[key]} and {e}")
        else:
            used[key] = e
    for e in sorted(g.edges):
        if abs(det2(gog.edge_maps[e].matrix)) != 1:
            rep.issues.append(f"edge map of {e} is injective but not onto its torus (determinant not ±1)")
    done = set()
    for e in sorted(g.edges):
        if e in done:
            continue
        done.update({e, g.bar[e]})
        o, t = g.origin[e], g.terminus[e]
        for v in {o, t}:
            if gog.vg(v).kind == "FreeAbelian":
                rep.issues.append(f"torus vertex {v} is adjacent to edge {e}; not a JSJ piece")
        vo, vt = gog.vg(o), gog.vg(t)
        if not (vo.is_seifert and vt.is_seifert):
            continue
        a_t = gog.phi_inv(e, vt.fiber())
        a_o = gog.phi_inv(g.bar[e], vo.fiber())
        if a_t is not None and a_o is not None and (a_t == a_o or a_t == (-a_o[0], -a_o[1])):
            rep.issues.append(
                f"fibers match across edge {e}: the Seifert fibrations of {o} and {t} extend over the torus"
            )
    return rep


@dataclass(frozen=True)
class EdgeSpec:
    """One geometric edge ``name``: from ``origin.origin_torus`` to ``terminus.terminus_torus``.

    ``matrix`` gives ``phi_e`` into the terminus torus and ``bar_matrix`` gives
    ``phi_bar(e)`` into the origin torus.  The reverse edge is named ``~name``.
    """

    name: str
    origin: str
    origin_torus: int
    terminus: str
    terminus_torus: int
    matrix: tuple = ((1, 0), (0, 1))
    bar_matrix: tuple = ((1, 0), (0, 1))


def bar_name(e: str) -> str:
    return e[1:] if e.startswith("~") else "~" + e


def build_gog(
    vertex_groups: Mapping[str, VertexGroup],
    edges: Sequence[EdgeSpec] = (),
    base_vertex: Optional[str] = None,
    name: str = "",
) -> GraphOfGroups:
    origin, terminus, bar, maps = {}, {}, {}, {}
    names = []
    for spec in edges:
        e, eb = spec.name, bar_name(spec.name)
        if e.startswith("~"):
            raise GraphError(f"edge names may not start with '~': {e}")
        m = tuple(tuple(r) for r in spec.matrix)
        mb = tuple(tuple(r) for r in spec.bar_matrix)
        names += [e, eb]
        origin[e], terminus[e] = spec.origin, spec.terminus
        origin[eb], terminus[eb] = spec.terminus, spec.origin
        bar[e], bar[eb] = eb, e
        maps[e] = EdgeMap(spec.terminus, spec.terminus_torus, m)
        maps[eb] = EdgeMap(spec.origin, spec.origin_torus, mb)
    graph = Graph(tuple(vertex_groups), tuple(names), origin, terminus, bar)
    return GraphOfGroups(graph, vertex_groups, maps, base_vertex, name)


def edge_specs(gog: GraphOfGroups) -> list[EdgeSpec]:
    """The geometric edges of ``gog``, one spec per pair ``{e, bar(e)}``."""
    out = []
    for e in gog.graph.edges:
        if e.startswith("~"):
            continue
        eb = gog.bar(e)
        out.append(
            EdgeSpec(
                e,
                gog.origin(e),
                gog.edge_torus(eb),
                gog.terminus(e),
                gog.edge_torus(e),
                gog.edge_maps[e].matrix,
                gog.edge_maps[eb].matrix,
            )
        )
    return out
