"""Directed multigraphs, graph homomorphisms and their matrices."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import gcd
from typing import Hashable, Iterator, Mapping, NamedTuple, Sequence

import networkx as nx

from .linalg import IntMatrix, smith_normal_form

__all__ = [
    "Edge",
    "Graph",
    "GraphHom",
    "IntMatrix",
    "SccReport",
    "adjacency_matrix",
    "higher_block",
    "paths",
    "scc_analysis",
    "smith_normal_form",
    "trim_essential",
]


class Edge(NamedTuple):
    name: Hashable
    i: Hashable
    t: Hashable


@dataclass(frozen=True)
class Graph:
    """A finite directed multigraph.

    Vertex and edge order is the declaration order; every matrix built from
    the graph uses it.  Identifiers may be any hashable value (strings for
    user input, tuples for derived graphs such as fibre products).
    """

    vertices: tuple
    edges: tuple[Edge, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(Edge(*e) for e in self.edges))
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex identifiers")
        names = [e.name for e in self.edges]
        if len(set(names)) != len(names):
            raise ValueError("duplicate edge identifiers")
        vs = set(self.vertices)
        for e in self.edges:
            if e.i not in vs or e.t not in vs:
                raise ValueError(f"edge {e.name!r} references an unknown vertex")

    @classmethod
    def from_edges(cls, edges: Sequence[tuple], vertices: Sequence | None = None) -> "Graph":
        """Build a graph from ``(name, i, t)`` triples; vertices default to first-seen order."""
        if vertices is None:
            seen: dict = {}
            for _, i, t in edges:
                seen.setdefault(i, None)
                seen.setdefault(t, None)
            vertices = list(seen)
        return cls(tuple(vertices), tuple(Edge(*e) for e in edges))

    @cached_property
    def vertex_index(self) -> dict:
        return {v: k for k, v in enumerate(self.vertices)}

    @cached_property
    def edge_index(self) -> dict:
        return {e.name: k for k, e in enumerate(self.edges)}

    @cached_property
    def _by_name(self) -> dict:
        return {e.name: e for e in self.edges}

    @cached_property
    def _out(self) -> dict:
        out: dict = {v: [] for v in self.vertices}
        for e in self.edges:
            out[e.i].append(e)
        return {v: tuple(es) for v, es in out.items()}

    @cached_property
    def _in(self) -> dict:
        inc: dict = {v: [] for v in self.vertices}
        for e in self.edges:
            inc[e.t].append(e)
        return {v: tuple(es) for v, es in inc.items()}

    def edge(self, name: Hashable) -> Edge:
        return self._by_name[name]

    def has_edge(self, name: Hashable) -> bool:
        return name in self._by_name

    def source(self, name: Hashable) -> Hashable:
        return self._by_name[name].i

    def target(self, name: Hashable) -> Hashable:
        return self._by_name[name].t

    def out_edges(self, v: Hashable) -> tuple[Edge, ...]:
        return self._out[v]

    def in_edges(self, v: Hashable) -> tuple[Edge, ...]:
        return self._in[v]

    @property
    def edge_names(self) -> tuple:
        return tuple(e.name for e in self.edges)

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    def reverse(self) -> "Graph":
        """The graph with every edge reversed (same identifiers and order)."""
        return Graph(self.vertices, tuple(Edge(e.name, e.t, e.i) for e in self.edges))

    def restrict(self, edge_names: set, vertices: set | None = None) -> "Graph":
        keep = [e for e in self.edges if e.name in edge_names]
        if vertices is None:
            vertices = {e.i for e in keep} | {e.t for e in keep}
        return Graph(tuple(v for v in self.vertices if v in vertices), tuple(keep))


def trim_essential(g: Graph) -> Graph:
    """Largest subgraph in which every vertex has an incoming and an outgoing edge."""
    alive_v = set(g.vertices)
    alive_e = {e.name for e in g.edges}
    indeg = {v: 0 for v in g.vertices}
    outdeg = {v: 0 for v in g.vertices}
    for e in g.edges:
        outdeg[e.i] += 1
        indeg[e.t] += 1
    stack = [v for v in g.vertices if indeg[v] == 0 or outdeg[v] == 0]
    while stack:
        v = stack.pop()
        if v not in alive_v:
            continue
        alive_v.discard(v)
        for e in g.out_edges(v):
            if e.name in alive_e:
                alive_e.discard(e.name)
                indeg[e.t] -= 1
                if e.t in alive_v and indeg[e.t] == 0:
                    stack.append(e.t)
        for e in g.in_edges(v):
            if e.name in alive_e:
                alive_e.discard(e.name)
                outdeg[e.i] -= 1
                if e.i in alive_v and outdeg[e.i] == 0:
                    stack.append(e.i)
    if len(alive_e) == len(g.edges) and len(alive_v) == len(g.vertices):
        return g
    return g.restrict(alive_e, alive_v)


def paths(g: Graph, n: int) -> Iterator[tuple]:
    """All edge paths of length ``n`` (as tuples of edge names), lexicographic in edge order."""
    if n <= 0:
        return
    stack: list[tuple] = [(e.name,) for e in reversed(g.edges)]
    while stack:
        p = stack.pop()
        if len(p) == n:
            yield p
            continue
        for e in reversed(g.out_edges(g.target(p[-1]))):
            stack.append(p + (e.name,))


@dataclass(frozen=True, eq=False)
class GraphHom:
    """A homomorphism of directed multigraphs."""

    source: Graph
    target: Graph
    vertex_map: Mapping
    edge_map: Mapping

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertex_map", dict(self.vertex_map))
        object.__setattr__(self, "edge_map", dict(self.edge_map))
        tv = self.target.vertex_index
        for v in self.source.vertices:
            if v not in self.vertex_map:
                raise ValueError(f"vertex {v!r} has no image")
            if self.vertex_map[v] not in tv:
                raise ValueError(f"vertex image {self.vertex_map[v]!r} is not a target vertex")
        for e in self.source.edges:
            if e.name not in self.edge_map:
                raise ValueError(f"edge {e.name!r} has no image")
            f = self.edge_map[e.name]
            if not self.target.has_edge(f):
                raise ValueError(f"edge image {f!r} is not a target edge")
            fe = self.target.edge(f)
            if fe.i != self.vertex_map[e.i] or fe.t != self.vertex_map[e.t]:
                raise ValueError(f"edge {e.name!r}: endpoints do not commute with the vertex map")

    @classmethod
    def identity(cls, g: Graph) -> "GraphHom":
        return cls(g, g, {v: v for v in g.vertices}, {e.name: e.name for e in g.edges})

    def compose(self, first: "GraphHom") -> "GraphHom":
        """``self ∘ first``."""
        if first.target != self.source:
            raise ValueError("homomorphisms are not composable")
        return GraphHom(
            first.source,
            self.target,
            {v: self.vertex_map[w] for v, w in first.vertex_map.items()},
            {e: self.edge_map[f] for e, f in first.edge_map.items()},
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GraphHom):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self.vertex_map == other.vertex_map
            and self.edge_map == other.edge_map
        )

    __hash__ = object.__hash__


def higher_block(g: Graph, K: int, via: str = "i") -> tuple[Graph, GraphHom]:
    """The higher block graph G(K) and its canonical map onto G(K-1).

    Vertices of G(K) are paths of length K-1, edges paths of length K, with
    ``i`` dropping the last edge and ``t`` dropping the first.  Identifiers
    are tuples of edge names; G(1) is ``g`` itself and the returned map is
    then the identity.  ``via`` selects whether the map to G(K-1) drops the
    last edge ("i") or the first ("t").
    """
    if K < 1:
        raise ValueError("block length K must be positive")
    if via not in ("i", "t"):
        raise ValueError("via must be 'i' or 't'")
    if K == 1:
        return g, GraphHom.identity(g)
    verts = list(paths(g, K - 1))
    edges = [Edge(p, p[:-1], p[1:]) for p in paths(g, K)]
    gk = Graph(tuple(verts), tuple(edges))
    if K == 2:
        lower = g
        if via == "i":
            vmap = {p: g.source(p[0]) for p in verts}
            emap = {e.name: e.name[0] for e in edges}
        else:
            vmap = {p: g.target(p[0]) for p in verts}
            emap = {e.name: e.name[1] for e in edges}
    else:
        lower, _ = higher_block(g, K - 1)
        cut = (lambda p: p[:-1]) if via == "i" else (lambda p: p[1:])
        vmap = {p: cut(p) for p in verts}
        emap = {e.name: cut(e.name) for e in edges}
    return gk, GraphHom(gk, lower, vmap, emap)


def adjacency_matrix(g: Graph) -> IntMatrix:
    """Entry (w, v) counts the edges from v to w."""
    n = len(g.vertices)
    idx = g.vertex_index
    a = [[0] * n for _ in range(n)]
    for e in g.edges:
        a[idx[e.t]][idx[e.i]] += 1
    return IntMatrix(a, n)


@dataclass(frozen=True)
class SccReport:
    components: tuple[tuple, ...]
    is_strongly_connected: bool
    is_nonwandering: bool
    is_mixing: bool
    period: int | None = field(default=None)


def scc_analysis(g: Graph) -> SccReport:
    """Strongly connected components and recurrence predicates.

    Non-wandering means every edge lies on a cycle; mixing means the
    adjacency matrix is primitive (irreducible with period one).
    """
    dg = nx.MultiDiGraph()
    dg.add_nodes_from(g.vertices)
    dg.add_edges_from((e.i, e.t) for e in g.edges)
    idx = g.vertex_index
    comps = [tuple(sorted(c, key=idx.__getitem__)) for c in nx.strongly_connected_components(dg)]
    comps.sort(key=lambda c: idx[c[0]])
    comp_of = {v: k for k, c in enumerate(comps) for v in c}
    nonwandering = all(comp_of[e.i] == comp_of[e.t] for e in g.edges)
    strongly = len(comps) == 1 and bool(g.edges)
    period = _period(g) if strongly else None
    return SccReport(tuple(comps), strongly, nonwandering, strongly and period == 1, period)


def _period(g: Graph) -> int:
    start = g.vertices[0]
    level = {start: 0}
    queue = [start]
    for v in queue:
        for e in g.out_edges(v):
            if e.t not in level:
                level[e.t] = level[v] + 1
                queue.append(e.t)
    p = 0
    for e in g.edges:
        p = gcd(p, level[e.i] + 1 - level[e.t])
    return abs(p)
