"""JSON input formats and JSON-safe output helpers.

Graph refs are file paths (relative to the referencing file) or inline
objects.  Identifiers given as JSON lists become tuples, so derived graphs
(fibre products, grid cells) round-trip.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .complexes import PairMorphism, PresentedSigma, SUPair
from .errors import InputError
from .graph_core import Edge, Graph
from .sft import SFT, BlockCode

__all__ = [
    "code_to_json",
    "graph_to_json",
    "jsonable",
    "load_document",
    "parse_code",
    "parse_graph",
    "parse_pair",
    "parse_sft",
    "parse_square",
    "parse_triple",
]


def _ident(x: Any, where: str):
    if isinstance(x, list):
        return tuple(_ident(y, where) for y in x)
    if isinstance(x, (str, int)) and not isinstance(x, bool):
        return x
    raise InputError(f"{where}: identifier must be a string, integer or list, got {type(x).__name__}")


def load_document(path: str | Path) -> tuple[Any, Path]:
    """Parse a JSON file; errors carry the file name, line and column."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{p}: cannot read file ({exc.strerror})") from None
    try:
        return json.loads(text), p.parent
    except json.JSONDecodeError as exc:
        raise InputError(f"{p}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})") from None


def _resolve(ref: Any, base: Path, where: str) -> tuple[Any, Path]:
    if isinstance(ref, str):
        return load_document(base / ref)
    if isinstance(ref, dict):
        return ref, base
    raise InputError(f"{where}: expected a file path or an inline object")


def _require(obj: dict, key: str, where: str) -> Any:
    if not isinstance(obj, dict):
        raise InputError(f"{where}: expected an object")
    if key not in obj:
        raise InputError(f"{where}: missing key {key!r}")
    return obj[key]


def parse_graph(ref: Any, base: Path = Path("."), where: str = "graph") -> Graph:
    obj, base = _resolve(ref, base, where)
    edges_raw = _require(obj, "edges", where)
    if not isinstance(edges_raw, list):
        raise InputError(f"{where}.edges: expected a list")
    edges = []
    for k, e in enumerate(edges_raw):
        w = f"{where}.edges[{k}]"
        edges.append(Edge(
            _ident(_require(e, "name", w), w + ".name"),
            _ident(_require(e, "i", w), w + ".i"),
            _ident(_require(e, "t", w), w + ".t"),
        ))
    vertices = obj.get("vertices")
    try:
        if vertices is None:
            return Graph.from_edges(edges)
        return Graph(tuple(_ident(v, f"{where}.vertices") for v in vertices), tuple(edges))
    except ValueError as exc:
        raise InputError(f"{where}: {exc}") from None


def parse_sft(ref: Any, base: Path = Path("."), where: str = "sft", name: str = "") -> SFT:
    g = parse_graph(ref, base, where)
    try:
        return SFT(g, name)
    except InputError as exc:
        raise InputError(f"{where}: {exc}") from None


def parse_code(
    ref: Any,
    base: Path = Path("."),
    where: str = "code",
    source: SFT | None = None,
    target: SFT | None = None,
) -> BlockCode:
    """A block code, given by a homomorphism on G(K) or by an explicit rule list.

    ``{"source", "target", "hom": {"edge_map": {...}}, "memory", "anticipation"}``
    where for windows longer than one edge the edge_map keys are the window
    words joined by commas; or ``"rule": [{"window": [...], "image": e}, ...]``.
    Source and target may be omitted when the context supplies them.
    """
    obj, base = _resolve(ref, base, where)
    if "source" in obj:
        source = parse_sft(obj["source"], base, where + ".source")
    if "target" in obj:
        target = parse_sft(obj["target"], base, where + ".target")
    if source is None or target is None:
        raise InputError(f"{where}: source and target are required")
    m = obj.get("memory", 0)
    a = obj.get("anticipation", 0)
    if not isinstance(m, int) or not isinstance(a, int):
        raise InputError(f"{where}: memory and anticipation must be integers")
    K = m + a + 1
    rule: dict = {}
    if "rule" in obj:
        for k, item in enumerate(obj["rule"]):
            w = f"{where}.rule[{k}]"
            window = _ident(_require(item, "window", w), w + ".window")
            rule[tuple(window)] = _ident(_require(item, "image", w), w + ".image")
    elif "hom" in obj:
        hom = obj["hom"]
        emap = _require(hom, "edge_map", where + ".hom")
        if not isinstance(emap, dict):
            raise InputError(f"{where}.hom.edge_map: expected an object")
        names = {str(e.name): e.name for e in source.graph.edges}
        for key, img in emap.items():
            parts = key.split(",") if K > 1 else [key]
            try:
                window = tuple(names[p] for p in parts)
            except KeyError as exc:
                raise InputError(f"{where}.hom.edge_map[{key!r}]: unknown source edge {exc.args[0]!r}") from None
            rule[window] = _ident(img, f"{where}.hom.edge_map[{key!r}]")
        vmap = hom.get("vertex_map")
        if vmap is not None and K == 1:
            for e in source.graph.edges:
                img = rule.get((e.name,))
                if img is None or not target.graph.has_edge(img):
                    continue
                exp = vmap.get(str(e.i))
                if exp is not None and target.graph.source(img) != _ident(exp, where):
                    raise InputError(f"{where}.hom.vertex_map[{e.i!r}]: inconsistent with the edge map")
    else:
        raise InputError(f"{where}: expected 'hom' or 'rule'")
    for window, img in rule.items():
        if not target.graph.has_edge(img):
            raise InputError(f"{where}: image {img!r} of window {list(window)!r} is not a target edge")
    try:
        return BlockCode(source, target, rule, m, a)
    except InputError as exc:
        raise InputError(f"{where}: {exc}") from None


def parse_pair(ref: Any, base: Path = Path("."), where: str = "pair"):
    """An SUPair (sft mode) or a PresentedSigma (presentation mode)."""
    obj, base = _resolve(ref, base, where)
    if "grid" in obj:
        return _parse_presentation(obj, base, where)
    X = parse_sft(_require(obj, "X", where), base, where + ".X", "X")
    Y = parse_sft(obj["Y"], base, where + ".Y", "Y") if "Y" in obj else X
    Z = parse_sft(obj["Z"], base, where + ".Z", "Z") if "Z" in obj else X
    pi_s = parse_code(_require(obj, "pi_s", where), base, where + ".pi_s", Y, X)
    pi_u = parse_code(_require(obj, "pi_u", where), base, where + ".pi_u", Z, X)
    return SUPair(pi_s, pi_u, obj.get("name", ""))


def _parse_presentation(obj: dict, base: Path, where: str) -> PresentedSigma:
    grid = {}
    for k, cell in enumerate(obj["grid"]):
        w = f"{where}.grid[{k}]"
        L, M = _require(cell, "L", w), _require(cell, "M", w)
        grid[(L, M)] = parse_sft(_require(cell, "graph", w), base, w + ".graph", f"Sigma_{L},{M}")
    dl, dm = {}, {}
    for key, store, dkey, step in (("delta_l", dl, "l", (1, 0)), ("delta_m", dm, "m", (0, 1))):
        for k, item in enumerate(obj.get(key, [])):
            w = f"{where}.{key}[{k}]"
            L, M, j = _require(item, "L", w), _require(item, "M", w), _require(item, dkey, w)
            src = grid.get((L, M))
            tgt = grid.get((L - step[0], M - step[1]))
            if src is None or tgt is None:
                raise InputError(f"{w}: cell outside the grid")
            store[(L, M, j)] = parse_code(_require(item, "code", w), base, w + ".code", src, tgt)
    sc = PresentedSigma(grid, dl, dm)
    for L, M in sc.cells():
        for j in range(L + 1 if L else 0):
            if (L, M, j) not in dl:
                raise InputError(f"{where}.delta_l: missing face l={j} at cell ({L},{M})")
        for j in range(M + 1 if M else 0):
            if (L, M, j) not in dm:
                raise InputError(f"{where}.delta_m: missing face m={j} at cell ({L},{M})")
    return sc


def parse_square(ref: Any, base: Path = Path("."), where: str = "square"):
    from .verify import SquareDiagram

    obj, base = _resolve(ref, base, where)
    S = parse_sft(_require(obj, "Sigma", where), base, where + ".Sigma", "Sigma")
    S1 = parse_sft(_require(obj, "Sigma1", where), base, where + ".Sigma1", "Sigma1")
    S2 = parse_sft(_require(obj, "Sigma2", where), base, where + ".Sigma2", "Sigma2")
    S0 = parse_sft(_require(obj, "Sigma0", where), base, where + ".Sigma0", "Sigma0")
    return SquareDiagram(
        parse_code(_require(obj, "eta1", where), base, where + ".eta1", S, S1),
        parse_code(_require(obj, "eta2", where), base, where + ".eta2", S, S2),
        parse_code(_require(obj, "pi1", where), base, where + ".pi1", S1, S0),
        parse_code(_require(obj, "pi2", where), base, where + ".pi2", S2, S0),
    )


def parse_triple(ref: Any, base: Path = Path("."), where: str = "triple") -> PairMorphism:
    obj, base = _resolve(ref, base, where)
    p = parse_pair(_require(obj, "pair", where), base, where + ".pair")
    q = parse_pair(_require(obj, "pair_prime", where), base, where + ".pair_prime")
    if not isinstance(p, SUPair) or not isinstance(q, SUPair):
        raise InputError(f"{where}: triples need pairs in sft mode")
    return PairMorphism(
        p, q,
        parse_code(_require(obj, "eta_X", where), base, where + ".eta_X", p.X, q.X),
        parse_code(_require(obj, "eta_Y", where), base, where + ".eta_Y", p.Y, q.Y),
        parse_code(_require(obj, "eta_Z", where), base, where + ".eta_Z", p.Z, q.Z),
    )


# ---------------------------------------------------------------------------
# Output


def jsonable(x: Any) -> Any:
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    if isinstance(x, dict):
        return {str(k) if not isinstance(k, str) else k: jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if hasattr(x, "to_json"):
        return jsonable(x.to_json())
    return x


def graph_to_json(g: Graph) -> dict:
    return {
        "vertices": jsonable(list(g.vertices)),
        "edges": [{"name": jsonable(e.name), "i": jsonable(e.i), "t": jsonable(e.t)} for e in g.edges],
    }


def code_to_json(c: BlockCode, inline_graphs: bool = True) -> dict:
    out: dict = {}
    if inline_graphs:
        out["source"] = graph_to_json(c.source.graph)
        out["target"] = graph_to_json(c.target.graph)
    out["memory"] = c.memory
    out["anticipation"] = c.anticipation
    out["rule"] = [{"window": jsonable(list(w)), "image": jsonable(img)} for w, img in c.rule.items()]
    return out
