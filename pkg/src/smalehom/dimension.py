"""Krieger dimension groups as direct limits and the maps codes induce on them.

A ``LimitGroup`` presents ``lim (Z^n, B)``: elements are pairs ``(v, k)``
with ``(v, k) ≡ (B v, k + 1)``.  On the stable side ``B = Aᵀ`` (a vertex
generator goes to the sum of its predecessors); the unstable side is the
stable side of the time-reversed graph, so ``B = A``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .errors import CapExceeded, HypothesisFailure
from .graph_core import Graph, adjacency_matrix, higher_block
from .linalg import Decomposer, IntMatrix, Subspace, q_matmul, rational_inverse
from .sft import SFT, BlockCode, is_left_covering, is_right_covering, is_s_bijective, is_u_bijective

KINDS = ("s", "u", "s_star", "u_star")
DEFAULT_RECODING_CAP = 8


@dataclass(frozen=True, eq=False)
class LimitGroup:
    rank: int
    connecting: IntMatrix
    label: str = ""

    def __post_init__(self) -> None:
        if self.connecting.shape != (self.rank, self.rank):
            raise ValueError("connecting matrix must be rank × rank")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LimitGroup):
            return NotImplemented
        return self.rank == other.rank and self.connecting == other.connecting

    def __hash__(self) -> int:
        return hash((self.rank, self.connecting))

    @cached_property
    def stable_power(self) -> IntMatrix:
        """``B^rank``; its kernel is the stable kernel of B."""
        return self.connecting.power(self.rank)

    def is_zero_vector(self, v: Sequence[int]) -> bool:
        return not any(self.stable_power.apply(list(v)))

    def kills(self, m: IntMatrix) -> bool:
        """Whether every column of ``m`` dies in the limit."""
        return (self.stable_power @ m).is_zero()

    @cached_property
    def eventual_range(self) -> Subspace:
        """The subspace ``B^rank Q^n`` on which B is invertible."""
        return Subspace(self.rank, self.stable_power.columns())

    @property
    def rational_dim(self) -> int:
        return self.eventual_range.rank

    def to_json(self) -> dict:
        return {"rank": self.rank, "connecting": self.connecting.tolist(), "label": self.label}


@dataclass(frozen=True)
class LimitElement:
    vector: tuple
    level: int = 0


def elem_equal(g: LimitGroup, x: LimitElement, y: LimitElement) -> bool:
    if len(x.vector) != g.rank or len(y.vector) != g.rank:
        raise ValueError("element does not belong to the group")
    top = max(x.level, y.level)
    b = g.connecting
    v = b.power(top - x.level).apply(list(x.vector))
    w = b.power(top - y.level).apply(list(y.vector))
    return g.is_zero_vector([p - q for p, q in zip(v, w)])


@dataclass(frozen=True, eq=False)
class LimitHom:
    """``(x, k) ↦ (matrix · x, k + level_shift)``."""

    source: LimitGroup
    target: LimitGroup
    matrix: IntMatrix
    level_shift: int = 0
    check: bool = field(default=True, repr=False)

    def __post_init__(self) -> None:
        if self.matrix.shape != (self.target.rank, self.source.rank):
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match groups "
                f"({self.target.rank}, {self.source.rank})"
            )
        if self.check and self.target.connecting @ self.matrix != self.matrix @ self.source.connecting:
            raise HypothesisFailure("intertwining", "matrix does not commute with the connecting maps")

    def aligned(self, shift: int) -> IntMatrix:
        """Matrix realising the same map with a larger level shift."""
        if shift < self.level_shift:
            raise ValueError("can only raise the level shift")
        return self.target.connecting.power(shift - self.level_shift) @ self.matrix

    def to_json(self) -> dict:
        return {"matrix": self.matrix.tolist(), "level_shift": self.level_shift}


def _same_groups(f: LimitHom, g: LimitHom) -> None:
    if f.source != g.source or f.target != g.target:
        raise ValueError("homomorphisms have different source or target")


def hom_equal(f: LimitHom, g: LimitHom) -> bool:
    _same_groups(f, g)
    s = max(f.level_shift, g.level_shift)
    return f.target.kills(f.aligned(s) - g.aligned(s))


def hom_compose(f: LimitHom, g: LimitHom) -> LimitHom:
    """``f ∘ g``."""
    if g.target != f.source:
        raise ValueError("homomorphisms are not composable")
    return LimitHom(g.source, f.target, f.matrix @ g.matrix, f.level_shift + g.level_shift)


def hom_add(f: LimitHom, g: LimitHom) -> LimitHom:
    _same_groups(f, g)
    s = max(f.level_shift, g.level_shift)
    return LimitHom(f.source, f.target, f.aligned(s) + g.aligned(s), s)


def hom_sub(f: LimitHom, g: LimitHom) -> LimitHom:
    _same_groups(f, g)
    s = max(f.level_shift, g.level_shift)
    return LimitHom(f.source, f.target, f.aligned(s) - g.aligned(s), s)


def hom_scale(f: LimitHom, k: int) -> LimitHom:
    return LimitHom(f.source, f.target, f.matrix.scale(k), f.level_shift)


def hom_zero(source: LimitGroup, target: LimitGroup) -> LimitHom:
    return LimitHom(source, target, IntMatrix.zeros(target.rank, source.rank), 0)


def hom_identity(g: LimitGroup) -> LimitHom:
    return LimitHom(g, g, IntMatrix.identity(g.rank), 0)


def hom_is_zero(f: LimitHom) -> bool:
    return f.target.kills(f.matrix)


# ---------------------------------------------------------------------------
# Rationalization


def _range_basis(g: LimitGroup) -> list[list[Fraction]]:
    return g.eventual_range.basis


@dataclass(frozen=True)
class RationalMap:
    """A linear map between the rationalized limits, in eventual-range bases."""

    rows: int
    cols: int
    entries: tuple

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self.entries]

    def __matmul__(self, other: "RationalMap") -> "RationalMap":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        if not self.rows or not other.cols:
            return RationalMap(self.rows, other.cols, tuple(tuple(Fraction(0) for _ in range(other.cols)) for _ in range(self.rows)))
        prod = q_matmul(self.entries, other.entries, self.cols)
        return RationalMap(self.rows, other.cols, tuple(tuple(r) for r in prod))

    def trace(self) -> Fraction:
        return sum((self.entries[i][i] for i in range(min(self.rows, self.cols))), Fraction(0))

    def power(self, k: int) -> "RationalMap":
        out = RationalMap(self.rows, self.rows, tuple(tuple(Fraction(int(i == j)) for j in range(self.rows)) for i in range(self.rows)))
        for _ in range(k):
            out = out @ self
        return out


def _restricted_inverse_power(g: LimitGroup, basis: list, k: int) -> list[list[Fraction]]:
    """Matrix of ``(B|R)^k`` (k may be negative) in the given basis of R (columns)."""
    r = len(basis)
    if r == 0:
        return []
    dec = Decomposer(g.rank, basis)
    b = g.connecting
    cols = []
    for v in basis:
        w = [sum((Fraction(b[i, j]) * v[j] for j in range(g.rank) if b[i, j]), Fraction(0)) for i in range(g.rank)]
        cols.append(dec.split(w))
    mat = [[cols[j][i] for j in range(r)] for i in range(r)]
    if k < 0:
        mat = rational_inverse(mat)
        k = -k
    out = [[Fraction(int(i == j)) for j in range(r)] for i in range(r)]
    for _ in range(k):
        out = q_matmul(mat, out, r)
    return out


def rationalized(f: LimitHom) -> RationalMap:
    """The map ``lim ⊗ Q → lim ⊗ Q`` in eventual-range coordinates.

    The element ``(r, 0)`` with ``r`` in the source's eventual range is sent
    to ``(B_t|R)^{-(s+n)} B_t^n M r`` where ``s`` is the level shift and
    ``n`` the target rank.
    """
    src_basis = _range_basis(f.source)
    tgt_basis = _range_basis(f.target)
    rs, rt = len(src_basis), len(tgt_basis)
    if rs == 0 or rt == 0:
        return RationalMap(rt, rs, tuple(tuple(Fraction(0) for _ in range(rs)) for _ in range(rt)))
    n = f.target.rank
    pre = f.target.stable_power @ f.matrix
    dec = Decomposer(n, tgt_basis)
    cols = []
    for v in src_basis:
        w = [sum((Fraction(pre[i, j]) * v[j] for j in range(f.source.rank) if pre[i, j]), Fraction(0)) for i in range(n)]
        c = dec.split(w)
        if c is None:
            raise ArithmeticError("image left the eventual range")
        cols.append(c)
    coords = [[cols[j][i] for j in range(rs)] for i in range(rt)]
    fix = _restricted_inverse_power(f.target, tgt_basis, -(f.level_shift + n))
    out = q_matmul(fix, coords, rt)
    return RationalMap(rt, rs, tuple(tuple(r) for r in out))


# ---------------------------------------------------------------------------
# Dimension groups and induced maps


def dimension_group(s: SFT, side: str = "s") -> LimitGroup:
    if side not in ("s", "u"):
        raise ValueError("side must be 's' or 'u'")
    a = adjacency_matrix(s.graph)
    b = a.T if side == "s" else a
    return LimitGroup(len(s.graph.vertices), b, f"D^{side}({s.name})" if s.name else f"D^{side}")


def _expand_matrix(g: Graph, K: int) -> IntMatrix:
    """Z^{G^0} → Z^{G(K)^0}: ``g_v ↦ Σ g_p`` over paths p of length K−1 ending at v."""
    gk = higher_block(g, K)[0] if K > 1 else g
    if K == 1:
        return IntMatrix.identity(len(g.vertices))
    vi = g.vertex_index
    pi = gk.vertex_index
    m = [[0] * len(g.vertices) for _ in gk.vertices]
    for p in gk.vertices:
        m[pi[p]][vi[g.target(p[-1])]] = 1
    return IntMatrix(m, len(g.vertices))


def _collapse_matrix(g: Graph, K: int) -> IntMatrix:
    """Z^{G(K)^0} → Z^{G^0}: ``g_p ↦ g_{i(p)}``."""
    if K == 1:
        return IntMatrix.identity(len(g.vertices))
    gk = higher_block(g, K)[0]
    vi = g.vertex_index
    pi = gk.vertex_index
    m = [[0] * len(gk.vertices) for _ in g.vertices]
    for p in gk.vertices:
        m[vi[g.source(p[0])]][pi[p]] = 1
    return IntMatrix(m, len(gk.vertices))


def _vertex_incidence(c: BlockCode) -> IntMatrix:
    """Entry (w, p) is 1 when the recoded vertex p maps to w."""
    h = c.hom
    ti = c.target.graph.vertex_index
    si = h.source.vertex_index
    m = [[0] * len(si) for _ in ti]
    for p, w in h.vertex_map.items():
        m[ti[w]][si[p]] = 1
    return IntMatrix(m, len(si))


def _windows(c: BlockCode, cap: int, prefer_anticipation: bool):
    base = c.trimmed()
    m0, a0 = base.memory, base.anticipation
    for extra in range(0, cap - base.window_length + 1):
        for i in range(extra + 1):
            if prefer_anticipation:
                yield base.extend(m0 + i, a0 + extra - i)
            else:
                yield base.extend(m0 + extra - i, a0 + i)


def _induced_s(c: BlockCode, cap: int, src: LimitGroup, tgt: LimitGroup) -> LimitHom:
    for d in _windows(c, cap, prefer_anticipation=True):
        if is_left_covering(d.hom):
            K = d.window_length
            m = _vertex_incidence(d) @ _expand_matrix(c.source.graph, K)
            return LimitHom(src, tgt, m, d.anticipation)
    raise CapExceeded(f"no left-covering recoding within {cap} block levels; raise recoding cap")


def _induced_s_star(c: BlockCode, cap: int, src: LimitGroup, tgt: LimitGroup) -> LimitHom:
    for d in _windows(c, cap, prefer_anticipation=False):
        if is_right_covering(d.hom):
            K = d.window_length
            m = _collapse_matrix(c.source.graph, K) @ _vertex_incidence(d).T
            return LimitHom(tgt, src, m, d.memory)
    raise CapExceeded(f"no right-covering recoding within {cap} block levels; raise recoding cap")


def induced_map(c: BlockCode, kind: str, recoding_cap: int = DEFAULT_RECODING_CAP, check: bool = True) -> LimitHom:
    """The homomorphism of dimension groups induced by ``c``.

    ``s`` and ``u`` are covariant (source group to target group); ``s_star``
    and ``u_star`` are contravariant.  ``check`` runs the bijectivity
    precondition first.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    side = "s" if kind in ("s", "s_star") else "u"
    src = dimension_group(c.source, side)
    tgt = dimension_group(c.target, side)
    if check:
        needs_s = kind in ("s", "u_star")
        ok = is_s_bijective(c) if needs_s else is_u_bijective(c)
        if not ok:
            raise HypothesisFailure(
                "s-bijective" if needs_s else "u-bijective",
                f"induced map of kind {kind} needs an {'s' if needs_s else 'u'}-bijective code",
            )
    if c.source.is_empty or c.target.is_empty:
        return hom_zero(src, tgt) if kind in ("s", "u") else hom_zero(tgt, src)
    code = c if side == "s" else c.reverse()
    if kind in ("s", "u"):
        f = _induced_s(code, recoding_cap, src, tgt)
    else:
        f = _induced_s_star(code, recoding_cap, src, tgt)
    return f
