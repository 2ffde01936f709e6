"""Seeded generators for small graphs, codes, coverings and squares.

Coverings are built by duplicating vertex fibres and lifting edges, so the
bijectivity hypotheses hold by construction rather than by rejection.
"""

from __future__ import annotations

import random
from typing import Iterator

from .graph_core import Graph, paths, trim_essential
from .sft import SFT, BlockCode, compose, shift_code

__all__ = [
    "brute_force_injective",
    "code_corpus",
    "composable_covers",
    "random_code",
    "random_cover",
    "random_graph",
    "random_square",
]


def random_graph(rng: random.Random, max_vertices: int = 3, max_edges: int = 6, prefix: str = "e") -> Graph:
    """A strongly connected essential graph; loops and parallel edges allowed."""
    while True:
        n = rng.randint(1, max_vertices)
        m = rng.randint(n, max_edges)
        vs = [f"v{k}" for k in range(n)]
        # a Hamiltonian cycle first, so the result is strongly connected
        order = vs[:]
        rng.shuffle(order)
        pairs = [(order[k], order[(k + 1) % n]) for k in range(n)]
        while len(pairs) < m:
            pairs.append((rng.choice(vs), rng.choice(vs)))
        rng.shuffle(pairs)
        g = Graph(tuple(vs), tuple((f"{prefix}{k}", i, t) for k, (i, t) in enumerate(pairs)))
        if trim_essential(g) is g:
            return g


def random_code(rng: random.Random, source: SFT, target: SFT, block: int = 1, tries: int = 50) -> BlockCode | None:
    """A random block code whose rule is a homomorphism G(block) -> target.

    Windows of ``block`` edges overlap in ``block - 1`` edges; the overlap
    word is sent to a target vertex and each window to an edge between the
    images of its two overlap words.  Returns None when no assignment works.
    """
    g, tg = source.graph, target.graph
    K = block
    for _ in range(tries):
        if K == 1:
            states = list(g.vertices)
            vmap = {v: rng.choice(tg.vertices) for v in states}
            rule = {}
            for e in g.edges:
                opts = [f.name for f in tg.edges if f.i == vmap[e.i] and f.t == vmap[e.t]]
                if not opts:
                    break
                rule[(e.name,)] = rng.choice(opts)
            else:
                return BlockCode(source, target, rule, 0, 0)
            continue
        states = list(paths(g, K - 1))
        vmap = {w: rng.choice(tg.vertices) for w in states}
        rule = {}
        for w in paths(g, K):
            a, b = w[:-1], w[1:]
            opts = [f.name for f in tg.edges if f.i == vmap[a] and f.t == vmap[b]]
            if not opts:
                break
            rule[w] = rng.choice(opts)
        else:
            m = rng.randint(0, K - 1)
            return BlockCode(source, target, rule, m, K - 1 - m)
    return None


def code_corpus(seed: int = 0, size: int = 60) -> list[BlockCode]:
    """1-block and 2-block codes between graphs with at most 3 vertices and 6 edges."""
    rng = random.Random(seed)
    out = []
    while len(out) < size:
        src = SFT(random_graph(rng, prefix="e"), "src")
        tgt = SFT(random_graph(rng, prefix="f"), "tgt")
        if rng.random() < 0.3:
            tgt = src
        c = random_code(rng, src, tgt, rng.choice((1, 1, 2)))
        if c is not None:
            out.append(c)
    return out


def random_cover(
    rng: random.Random,
    base: SFT,
    left: bool,
    max_copies: int = 2,
    max_vertices: int = 6,
    tag: str = "",
    tries: int = 100,
) -> BlockCode:
    """A left- (or right-) covering 1-block code onto ``base`` built by fibre duplication.

    Each base vertex gets one or more copies.  For a left covering every
    copy of ``t`` receives one lift of each in-edge of ``t``, its source a
    random copy of the edge's source; right coverings lift out-edges.
    Retries until the cover is essential, strongly connected and onto.
    """
    g = base.graph
    for _ in range(tries):
        copies = {v: [(v, tag, j) for j in range(rng.randint(1, max_copies))] for v in g.vertices}
        if sum(map(len, copies.values())) > max_vertices:
            continue
        vs = [w for v in g.vertices for w in copies[v]]
        edges, rule = [], {}
        for e in g.edges:
            anchors = copies[e.t] if left else copies[e.i]
            for w in anchors:
                other = rng.choice(copies[e.i] if left else copies[e.t])
                name = (e.name, tag, w[2], other[2]) if left else (e.name, tag, other[2], w[2])
                edges.append((name, other, w) if left else (name, w, other))
                rule[(name,)] = e.name
        cg = Graph(tuple(vs), tuple(edges))
        if trim_essential(cg) is not cg:
            continue
        cover = SFT(cg, f"cover{tag}")
        if not cover.analysis.is_strongly_connected:
            continue
        # every base edge has a lift, so the code is onto when the cover is essential
        return BlockCode(cover, base, rule)
    raise RuntimeError("no covering found; relax the vertex budget")


def random_square(rng: random.Random, max_vertices: int = 6):
    """A square completed to a fibre product over a 2 or 3 vertex base.

    ``pi2`` is left-covering and ``pi1`` right-covering, so the completed
    square satisfies the bijectivity hypotheses of the pullback identity.
    Regenerates until every graph in the square has at most ``max_vertices`` vertices.
    """
    from .verify import completed_square

    while True:
        base = SFT(random_graph(rng, max_vertices=3, max_edges=5, prefix="b"), "Sigma0")
        if len(base.graph.vertices) < 2:
            continue
        pi1 = random_cover(rng, base, left=False, max_vertices=max_vertices, tag="1")
        pi2 = random_cover(rng, base, left=True, max_vertices=max_vertices, tag="2")
        d = completed_square(pi1, pi2)
        if 0 < len(d.eta1.source.graph.vertices) <= max_vertices:
            return d


def composable_covers(rng: random.Random, left: bool) -> tuple[BlockCode, BlockCode]:
    """``(c1, c2)`` with ``c2 ∘ c1`` defined; both left- (or both right-) covering.

    Half the time ``c1`` is precomposed with the shift so that windows with
    a nonzero offset are exercised.
    """
    base = SFT(random_graph(rng, max_vertices=2, max_edges=4, prefix="b"), "W")
    c2 = random_cover(rng, base, left, max_vertices=3, tag="y")
    c1 = random_cover(rng, c2.source, left, max_vertices=5, tag="x")
    if rng.random() < 0.5:
        c1 = compose(c1, shift_code(c1.source))
    return c1, c2


def _cycles(g: Graph, max_len: int) -> list[tuple]:
    out = []
    for n in range(1, max_len + 1):
        out.extend(w for w in paths(g, n) if g.target(w[-1]) == g.source(w[0]))
    return out


def _points(g: Graph, max_cycle: int, max_core: int) -> Iterator[tuple[tuple, tuple, tuple]]:
    cycles = _cycles(g, max_cycle)
    for n in range(0, max_core + 1):
        cores = [()] if n == 0 else list(paths(g, n))
        for core in cores:
            for lc in cycles:
                if core and g.target(lc[-1]) != g.source(core[0]):
                    continue
                end = core[-1] if core else lc[-1]
                for rc in cycles:
                    if g.target(end) == g.source(rc[0]):
                        yield lc, core, rc


def brute_force_injective(c: BlockCode, max_cycle: int = 3, max_core: int = 4) -> bool:
    """Compare point images on eventually periodic points.

    Points ``…LLL core RRR…`` with short cycles and cores are sampled
    exhaustively; both points and images are keyed by a window wide enough
    that, by the Fine and Wilf periodicity lemma, equal keys mean equal
    sequences.  Finding two points with one image refutes injectivity.
    """
    g = c.source.graph
    m, a = c.memory, c.anticipation
    margin = 2 * max_cycle + abs(m) + abs(a) + 2
    lo, hi = -margin, max_core + margin
    seen: dict = {}
    for lc, core, rc in _points(g, max_cycle, max_core):
        def x(k: int, lc=lc, core=core, rc=rc):
            if k < 0:
                return lc[k % len(lc)]
            if k < len(core):
                return core[k]
            return rc[(k - len(core)) % len(rc)]

        key = tuple(x(k) for k in range(lo, hi))
        img = tuple(c.rule[tuple(x(j) for j in range(k - m, k + a + 1))] for k in range(lo + abs(m), hi - abs(a)))
        prev = seen.setdefault(img, key)
        if prev != key:
            return False
    return True
