"""Edge shifts, sliding block codes and decision procedures on them."""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from math import gcd
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .errors import (
    CriterionInapplicable,
    EmptyShiftWarning,
    HypothesisFailure,
    InputError,
    NotConstantToOne,
)
from .graph_core import (
    Edge,
    Graph,
    GraphHom,
    higher_block,
    paths,
    scc_analysis,
    trim_essential,
)


@dataclass(frozen=True)
class SFT:
    """The edge shift of an essential graph."""

    graph: Graph
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if trim_essential(self.graph) is not self.graph:
            raise InputError(f"presentation of {self.name or 'SFT'} is not essential")

    @classmethod
    def of(cls, g: Graph, name: str = "") -> "SFT":
        """The SFT of ``g`` after discarding inessential vertices and edges."""
        return cls(trim_essential(g), name)

    @property
    def is_empty(self) -> bool:
        return self.graph.is_empty

    def reverse(self) -> "SFT":
        return SFT(self.graph.reverse(), self.name)

    @cached_property
    def analysis(self):
        return scc_analysis(self.graph)


def _block_graph(g: Graph, K: int) -> Graph:
    return higher_block(g, K)[0] if K > 1 else g


def _words(g: Graph, K: int) -> list[tuple]:
    return list(paths(g, K))


@dataclass(frozen=True, eq=False)
class BlockCode:
    """A sliding block code ``y_k = rule(x_{k-memory}, ..., x_{k+anticipation})``.

    ``rule`` maps every source path of length ``memory + anticipation + 1``
    (a tuple of edge names) to a target edge.  Memory or anticipation may be
    negative as long as the window is nonempty; the shift map, for example,
    is the one-edge window at offset +1.
    """

    source: SFT
    target: SFT
    rule: Mapping[tuple, Hashable]
    memory: int = 0
    anticipation: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "rule", dict(self.rule))
        if self.memory + self.anticipation < 0:
            raise InputError("block window is empty (memory + anticipation < 0)")
        words = _words(self.source.graph, self.window_length)
        missing = [w for w in words if w not in self.rule]
        if missing:
            raise InputError(f"block rule has no value on window {missing[0]!r}")
        if len(self.rule) != len(words):
            extra = next(w for w in self.rule if w not in set(words))
            raise InputError(f"block rule key {extra!r} is not a source path")
        try:
            self.hom
        except ValueError as exc:
            raise InputError(f"block rule is not a valid code: {exc}") from None

    @property
    def window_length(self) -> int:
        return self.memory + self.anticipation + 1

    @property
    def recoding_level(self) -> int:
        return self.memory + self.anticipation

    @classmethod
    def from_hom(cls, h: GraphHom, source: SFT | None = None, target: SFT | None = None) -> "BlockCode":
        """The 1-block code of an edge-wise graph homomorphism."""
        source = source or SFT(h.source)
        target = target or SFT(h.target)
        return cls(source, target, {(e.name,): h.edge_map[e.name] for e in source.graph.edges})

    @cached_property
    def hom(self) -> GraphHom:
        """The code as a homomorphism from the higher block graph G(K) to the target."""
        g = self.source.graph
        K = self.window_length
        gk = _block_graph(g, K)
        if K == 1:
            emap = {e.name: self.rule[(e.name,)] for e in g.edges}
        else:
            emap = {e.name: self.rule[e.name] for e in gk.edges}
        tg = self.target.graph
        vmap = {}
        for v in gk.vertices:
            out = gk.out_edges(v)
            if out:
                vmap[v] = tg.source(emap[out[0].name])
        return GraphHom(gk, tg, vmap, emap)

    def __call__(self, x: "Point") -> "Point":
        return apply_code(self, x)

    def __repr__(self) -> str:
        return (
            f"BlockCode({self.source.name or '?'}→{self.target.name or '?'}, "
            f"window=({self.memory},{self.anticipation}))"
        )

    def extend(self, memory: int, anticipation: int) -> "BlockCode":
        """The same map written on a larger window."""
        if memory < self.memory or anticipation < self.anticipation:
            raise ValueError("can only enlarge the window")
        if (memory, anticipation) == (self.memory, self.anticipation):
            return self
        off = memory - self.memory
        n = self.window_length
        rule = {
            w: self.rule[w[off:off + n]]
            for w in paths(self.source.graph, memory + anticipation + 1)
        }
        return BlockCode(self.source, self.target, rule, memory, anticipation)

    def normalized(self) -> "BlockCode":
        """Window enlarged to contain position 0 (memory, anticipation ≥ 0)."""
        return self.extend(max(self.memory, 0), max(self.anticipation, 0))

    @cached_property
    def _trimmed(self) -> "BlockCode":
        rule, m, a = self.rule, self.memory, self.anticipation
        changed = False
        for side in ("left", "right"):
            while m + a > 0:
                cut = (lambda w: w[1:]) if side == "left" else (lambda w: w[:-1])
                smaller: dict = {}
                ok = True
                for w, img in rule.items():
                    if smaller.setdefault(cut(w), img) != img:
                        ok = False
                        break
                if not ok:
                    break
                rule = smaller
                changed = True
                if side == "left":
                    m -= 1
                else:
                    a -= 1
        if not changed:
            return self
        return BlockCode(self.source, self.target, rule, m, a)

    def trimmed(self) -> "BlockCode":
        """The same map on the smallest window it depends on."""
        return self._trimmed

    def reverse(self) -> "BlockCode":
        """The code between the time-reversed shifts."""
        rule = {tuple(reversed(w)): img for w, img in self.rule.items()}
        return BlockCode(self.source.reverse(), self.target.reverse(), rule, self.anticipation, self.memory)

    @cached_property
    def pair_graph(self) -> "PairGraph":
        return PairGraph.of(self.trimmed().hom)


def identity_code(s: SFT) -> BlockCode:
    return BlockCode(s, s, {(e.name,): e.name for e in s.graph.edges})


def shift_code(s: SFT) -> BlockCode:
    """The left shift σ, (σx)_k = x_{k+1}."""
    return BlockCode(s, s, {(e.name,): e.name for e in s.graph.edges}, -1, 1)


def to_higher_block(s: SFT, memory: int, anticipation: int) -> BlockCode:
    """The conjugacy onto the higher block presentation read at the given window."""
    K = memory + anticipation + 1
    if K == 1:
        target = s
        rule = {(e.name,): e.name for e in s.graph.edges}
    else:
        target = SFT(_block_graph(s.graph, K))
        rule = {w: w for w in paths(s.graph, K)}
    return BlockCode(s, target, rule, memory, anticipation)


def compose(c2: BlockCode, c1: BlockCode) -> BlockCode:
    """``c2 ∘ c1``."""
    if c1.target != c2.source:
        raise InputError("codes are not composable: target of the first differs from source of the second")
    n1 = c1.window_length
    n2 = c2.window_length
    rule = {}
    for w in paths(c1.source.graph, n1 + n2 - 1):
        mid = tuple(c1.rule[w[j:j + n1]] for j in range(n2))
        rule[w] = c2.rule[mid]
    return BlockCode(
        c1.source, c2.target, rule, c1.memory + c2.memory, c1.anticipation + c2.anticipation
    )


def code_equal(c: BlockCode, d: BlockCode) -> bool:
    """Whether two codes induce the same point map."""
    if c.source != d.source or c.target != d.target:
        return False
    m = max(c.memory, d.memory)
    a = max(c.anticipation, d.anticipation)
    return c.extend(m, a).rule == d.extend(m, a).rule


def product_code(codes: Sequence[BlockCode], target: SFT) -> BlockCode:
    """The code ``x ↦ (c_1(x), …, c_n(x))`` into an SFT whose edges are tuples."""
    src = codes[0].source
    if any(c.source != src for c in codes):
        raise InputError("product code needs a common source")
    m = max(c.memory for c in codes)
    a = max(c.anticipation for c in codes)
    ext = [c.extend(m, a) for c in codes]
    rule = {w: tuple(c.rule[w] for c in ext) for w in paths(src.graph, m + a + 1)}
    missing = [img for img in rule.values() if not target.graph.has_edge(img)]
    if missing:
        raise HypothesisFailure("product map leaves the fibre product", repr(missing[0]))
    return BlockCode(src, target, rule, m, a)


# ---------------------------------------------------------------------------
# Eventually periodic points


@dataclass(frozen=True, eq=False)
class Point:
    """An eventually periodic bi-infinite path ``…LLL core RRR…``.

    ``core[0]`` sits at coordinate ``offset``; ``left_cycle[-1]`` is the
    edge just before the core and ``right_cycle[0]`` the one just after.
    """

    left_cycle: tuple
    core: tuple
    right_cycle: tuple
    offset: int = 0

    def __post_init__(self) -> None:
        for name in ("left_cycle", "core", "right_cycle"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if not self.left_cycle or not self.right_cycle:
            raise ValueError("cycles must be nonempty")

    def __getitem__(self, k: int) -> Hashable:
        s = k - self.offset
        if s < 0:
            return self.left_cycle[s % len(self.left_cycle)]
        if s < len(self.core):
            return self.core[s]
        return self.right_cycle[(s - len(self.core)) % len(self.right_cycle)]

    def window(self, lo: int, hi: int) -> tuple:
        return tuple(self[k] for k in range(lo, hi))

    @property
    def left_period(self) -> int:
        return len(self.left_cycle)

    @property
    def right_period(self) -> int:
        return len(self.right_cycle)

    @property
    def core_end(self) -> int:
        return self.offset + len(self.core)

    @classmethod
    def periodic(cls, word: Sequence, offset: int = 0) -> "Point":
        """``word^∞`` with ``word[0]`` at ``offset``."""
        return cls(tuple(word), (), tuple(word), offset)

    @classmethod
    def from_function(
        cls, f: Callable[[int], Hashable], start: int, end: int, left_period: int, right_period: int
    ) -> "Point":
        """Point with ``x_k = f(k)``, where ``f`` has the given periods below ``start`` and from ``end`` on."""
        end = max(start, end)
        return cls(
            tuple(f(k) for k in range(start - left_period, start)),
            tuple(f(k) for k in range(start, end)),
            tuple(f(k) for k in range(end, end + right_period)),
            start,
        )

    def _span(self, other: "Point") -> tuple[int, int]:
        lp = self.left_period * other.left_period // gcd(self.left_period, other.left_period)
        rp = self.right_period * other.right_period // gcd(self.right_period, other.right_period)
        return min(self.offset, other.offset) - lp, max(self.core_end, other.core_end) + rp

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Point):
            return NotImplemented
        lo, hi = self._span(other)
        return all(self[k] == other[k] for k in range(lo, hi))

    def __hash__(self) -> int:
        return hash((_cycle_class(self.left_cycle), _cycle_class(self.right_cycle)))

    def __repr__(self) -> str:
        return f"Point(({' '.join(map(str, self.left_cycle))})^∞ [{self.offset}] {' '.join(map(str, self.core))} ({' '.join(map(str, self.right_cycle))})^∞)"

    def shift(self, n: int = 1) -> "Point":
        """σ^n: (σx)_k = x_{k+1}."""
        return Point(self.left_cycle, self.core, self.right_cycle, self.offset - n)

    def is_legal(self, g: Graph) -> bool:
        lo = self.offset - self.left_period
        hi = self.core_end + self.right_period + 1
        for k in range(lo, hi):
            if not g.has_edge(self[k]):
                return False
        return all(g.target(self[k]) == g.source(self[k + 1]) for k in range(lo, hi - 1))


def _primitive(word: tuple) -> tuple:
    n = len(word)
    for p in range(1, n + 1):
        if n % p == 0 and word[:p] * (n // p) == word:
            return word[:p]
    return word


def _cycle_class(word: tuple) -> frozenset:
    w = _primitive(word)
    return frozenset(w[k:] + w[:k] for k in range(len(w)))


def apply_code(c: BlockCode, x: Point) -> Point:
    def f(k: int) -> Hashable:
        return c.rule[x.window(k - c.memory, k + c.anticipation + 1)]

    start = x.offset - c.anticipation
    end = x.core_end + c.memory
    return Point.from_function(f, start, max(start, end), x.left_period, x.right_period)


def bracket(x: Point, y: Point) -> Point:
    """Splice the left ray of ``y`` onto the right ray of ``x``.

    Defined when ``x`` and ``y`` share the edge at coordinate 0; the result
    agrees with ``x`` from coordinate 0 on and with ``y`` before it.
    """
    if x[0] != y[0]:
        raise ValueError("bracket undefined: points differ at coordinate 0")

    def f(k: int) -> Hashable:
        return x[k] if k >= 0 else y[k]

    start = min(y.offset, 0)
    end = max(x.core_end, 0)
    return Point.from_function(f, start, end, y.left_period, x.right_period)


def periodic_points(s: SFT, n: int) -> list[Point]:
    """Points of period ``n``, one per closed path of length ``n`` (its first edge at 0)."""
    g = s.graph
    out = []
    for w in paths(g, n):
        if g.target(w[-1]) == g.source(w[0]):
            out.append(Point.periodic(w))
    return out


# ---------------------------------------------------------------------------
# Pair graph and decision procedures


@dataclass(frozen=True)
class PairGraph:
    """Pairs of edges with equal image under a 1-block homomorphism, trimmed."""

    graph: Graph
    diagonal: frozenset

    @classmethod
    def of(cls, h: GraphHom) -> "PairGraph":
        pre: dict = {}
        for e in h.source.edges:
            pre.setdefault(h.edge_map[e.name], []).append(e)
        edges = []
        for es in pre.values():
            for e, f in product(es, es):
                edges.append(Edge((e.name, f.name), (e.i, f.i), (e.t, f.t)))
        g = trim_essential(Graph.from_edges(edges))
        diag = frozenset(e.name for e in g.edges if e.name[0] == e.name[1])
        return cls(g, diag)

    @property
    def off_diagonal(self) -> list[Edge]:
        return [e for e in self.graph.edges if e.name not in self.diagonal]


def _reachable(g: Graph, starts: Iterable, forward: bool = True) -> set:
    seen = set(starts)
    queue = deque(seen)
    while queue:
        v = queue.popleft()
        nxt = g.out_edges(v) if forward else g.in_edges(v)
        for e in nxt:
            w = e.t if forward else e.i
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def _warn_empty(c: BlockCode, what: str) -> None:
    warnings.warn(f"{what} evaluated on an empty shift; holds vacuously", EmptyShiftWarning, stacklevel=3)


def is_injective(c: BlockCode) -> bool:
    return not c.pair_graph.off_diagonal


def is_surjective(c: BlockCode) -> bool:
    """Every target path has a preimage (subset construction on the recoded hom)."""
    tg = c.target.graph
    if c.source.is_empty:
        return tg.is_empty
    h = c.trimmed().hom
    gk = h.source
    by_image: dict = {}
    for v in gk.vertices:
        by_image.setdefault(h.vertex_map[v], set()).add(v)
    start = [(u, frozenset(by_image.get(u, ()))) for u in tg.vertices]
    if any(not s for _, s in start):
        return False
    seen = set(start)
    queue = deque(start)
    while queue:
        u, states = queue.popleft()
        for f in tg.out_edges(u):
            nxt = frozenset(
                e.t for v in states for e in gk.out_edges(v) if h.edge_map[e.name] == f.name
            )
            if not nxt:
                return False
            key = (f.t, nxt)
            if key not in seen:
                seen.add(key)
                queue.append(key)
    return True


def is_conjugacy(c: BlockCode) -> bool:
    return is_injective(c) and is_surjective(c)


def _resolving(pg: PairGraph, forward: bool) -> bool:
    g = pg.graph
    diag_vertices = {e.i for e in g.edges if e.name in pg.diagonal}
    # vertices from which (forward) or into which (backward) a diagonal vertex is reachable
    hits = _reachable(g, diag_vertices, forward=not forward)
    for e in pg.off_diagonal:
        if (e.t if forward else e.i) in hits:
            return False
    return True


def is_s_resolving(c: BlockCode) -> bool:
    """No two distinct right-tail-equivalent points share an image."""
    return _resolving(c.pair_graph, forward=True)


def is_u_resolving(c: BlockCode) -> bool:
    """No two distinct left-tail-equivalent points share an image."""
    return _resolving(c.pair_graph, forward=False)


def _bijective(c: BlockCode, resolving: Callable[[BlockCode], bool], what: str) -> bool:
    if c.source.is_empty:
        _warn_empty(c, what)
        return c.target.is_empty
    if not c.source.analysis.is_nonwandering:
        raise CriterionInapplicable(f"{what}: source has an edge on no cycle")
    return resolving(c) and is_surjective(c)


def is_s_bijective(c: BlockCode) -> bool:
    return _bijective(c, is_s_resolving, "is_s_bijective")


def is_u_bijective(c: BlockCode) -> bool:
    return _bijective(c, is_u_resolving, "is_u_bijective")


def is_left_covering(h: GraphHom) -> bool:
    """In-edges at every vertex map bijectively onto the in-edges at its image."""
    for v in h.source.vertices:
        imgs = [h.edge_map[e.name] for e in h.source.in_edges(v)]
        want = {f.name for f in h.target.in_edges(h.vertex_map[v])}
        if len(imgs) != len(set(imgs)) or set(imgs) != want:
            return False
    return True


def is_right_covering(h: GraphHom) -> bool:
    """Out-edges at every vertex map bijectively onto the out-edges at its image."""
    for v in h.source.vertices:
        imgs = [h.edge_map[e.name] for e in h.source.out_edges(v)]
        want = {f.name for f in h.target.out_edges(h.vertex_map[v])}
        if len(imgs) != len(set(imgs)) or set(imgs) != want:
            return False
    return True


# ---------------------------------------------------------------------------
# Degree


def fibre_count(c: BlockCode, word: Sequence) -> int | None:
    """Number of preimages of the periodic point ``word^∞``; None if infinite."""
    h = c.trimmed().hom
    gk = h.source
    n = len(word)
    tg = c.target.graph
    pre: dict = {}
    for e in gk.edges:
        pre.setdefault(h.edge_map[e.name], []).append(e)
    edges = []
    for j, f in enumerate(word):
        if not tg.has_edge(f):
            raise ValueError(f"{f!r} is not a target edge")
        for e in pre.get(f, ()):
            edges.append(Edge((e.name, j), (e.i, j), (e.t, (j + 1) % n)))
    r = trim_essential(Graph.from_edges(edges))
    for v in r.vertices:
        if len(r.out_edges(v)) != 1 or len(r.in_edges(v)) != 1:
            return None
    return sum(1 for v in r.vertices if v[1] == 0)


def _orbit_words(s: SFT, limit: int = 12) -> Iterable[tuple]:
    """Primitive closed paths, one per orbit, by increasing length."""
    seen: set = set()
    for n in range(1, limit + 1):
        for p in periodic_points(s, n):
            w = p.left_cycle
            if _primitive(w) != w:
                continue
            cls = _cycle_class(w)
            if cls in seen:
                continue
            seen.add(cls)
            yield w


def degree(c: BlockCode) -> int:
    """Constant fibre cardinality of a factor map that is s- and u-bijective.

    Hypotheses are checked and a failure raises ``HypothesisFailure`` naming
    it.  The count is taken over the shortest periodic orbit and checked
    against a second one.
    """
    if c.source.is_empty or c.target.is_empty:
        raise HypothesisFailure("irreducible source and target", "empty shift")
    if not c.source.analysis.is_strongly_connected:
        raise HypothesisFailure("irreducible source", "source graph is not strongly connected")
    if not c.target.analysis.is_strongly_connected:
        raise HypothesisFailure("irreducible target", "target graph is not strongly connected")
    if not is_surjective(c):
        raise HypothesisFailure("factor map", "code is not onto")
    if not is_s_bijective(c):
        raise HypothesisFailure("s-bijective", "code is not s-bijective")
    if not is_u_bijective(c):
        raise HypothesisFailure("u-bijective", "code is not u-bijective")
    words = []
    for w in _orbit_words(c.target):
        words.append(w)
        if len(words) == 2:
            break
    if len(words) == 1:
        words.append(words[0] * 2)
    counts = [fibre_count(c, w) for w in words]
    if counts[0] is None or counts[0] != counts[1]:
        raise NotConstantToOne(f"fibre counts over two orbits: {counts}")
    return counts[0]


# ---------------------------------------------------------------------------
# Fibre products


class MultiFibre:
    """The fibre product of several codes into a common shift X.

    Each code is first written on a window containing 0; the product's
    edges are tuples of higher-block edges (one per factor) with a common
    image, trimmed to the essential part.
    """

    def __init__(self, codes: Sequence[BlockCode], name: str = ""):
        if not codes:
            raise ValueError("need at least one code")
        x = codes[0].target
        if any(c.target != x for c in codes):
            raise InputError("fibre product needs codes with a common target")
        self.codes = tuple(codes)
        self.base = x
        self.normal = tuple(c.normalized() for c in codes)
        self.homs = tuple(c.hom for c in self.normal)
        self._sft = SFT(self._build(), name)

    def _build(self) -> Graph:
        pre_e = []
        for h in self.homs:
            d: dict = {}
            for e in h.source.edges:
                d.setdefault(h.edge_map[e.name], []).append(e)
            pre_e.append(d)
        edges = []
        for f in self.base.graph.edges:
            for combo in product(*(d.get(f.name, ()) for d in pre_e)):
                edges.append(Edge(
                    tuple(e.name for e in combo),
                    tuple(e.i for e in combo),
                    tuple(e.t for e in combo),
                ))
        return trim_essential(Graph.from_edges(edges))

    @property
    def sft(self) -> SFT:
        return self._sft

    def __len__(self) -> int:
        return len(self.codes)

    def _center(self, j: int) -> Callable[[Hashable], Hashable]:
        c = self.normal[j]
        if c.window_length == 1:
            return lambda e: e
        m = c.memory
        return lambda e: e[m]

    def projection(self, j: int) -> BlockCode:
        """The coordinate map onto the source of the ``j``-th code."""
        center = self._center(j)
        rule = {(E.name,): center(E.name[j]) for E in self._sft.graph.edges}
        return BlockCode(self._sft, self.codes[j].source, rule)

    def delete(self, j: int, target: "MultiFibre") -> BlockCode:
        """Drop coordinate ``j``, landing in ``target`` (the product of the remaining codes)."""
        rule = {(E.name,): E.name[:j] + E.name[j + 1:] for E in self._sft.graph.edges}
        return BlockCode(self._sft, target.sft, rule)

    def select(self, idx: Sequence[int], target: "MultiFibre") -> BlockCode:
        """Keep the coordinates ``idx`` (in that order), landing in ``target``."""
        rule = {(E.name,): tuple(E.name[j] for j in idx) for E in self._sft.graph.edges}
        return BlockCode(self._sft, target.sft, rule)

    def lift(self, maps: Sequence[BlockCode]) -> BlockCode:
        """The map into the product with coordinates ``maps[j]`` (which must agree over X)."""
        if len(maps) != len(self.codes):
            raise ValueError("one map per factor required")
        parts = []
        for c, d in zip(self.normal, maps):
            if d.target != c.source:
                raise InputError("lift: map does not land in the factor")
            parts.append(compose(to_higher_block(c.source, c.memory, c.anticipation), d))
        return product_code(parts, self._sft)


def fibre_product(c1: BlockCode, c2: BlockCode) -> tuple[SFT, BlockCode, BlockCode]:
    """``{(y1, y2) : c1(y1) = c2(y2)}`` with its two projections."""
    mf = MultiFibre([c1, c2])
    return mf.sft, mf.projection(0), mf.projection(1)


def n_fold_fibre(c: BlockCode, N: int) -> tuple[SFT, list[BlockCode]]:
    """``Y_N = {(y_0, …, y_N) : c(y_i) all equal}`` with the deletion maps δ_0 … δ_N.

    For N = 0 the deletions are empty and Y_0 is returned as the product of
    one factor (conjugate to the source).
    """
    if N < 0:
        raise ValueError("N must be nonnegative")
    top = MultiFibre([c] * (N + 1))
    if N == 0:
        return top.sft, []
    lower = MultiFibre([c] * N)
    return top.sft, [top.delete(n, lower) for n in range(N + 1)]

