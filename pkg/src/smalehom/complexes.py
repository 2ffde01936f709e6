"""The double complex of an s/u-bijective pair and its homology.

A pair is ``Y --pi_s--> X <--pi_u-- Z`` with ``pi_s`` s-bijective and
``pi_u`` u-bijective.  The grid ``Sigma_{L,M}`` is the fibre product of
``L+1`` copies of ``pi_s`` and ``M+1`` copies of ``pi_u``; its stable
dimension groups, reduced by the symmetric group actions, form a double
complex whose total homology is computed here.

Cell groups are presented in "orbit coordinates".  With ``O`` the set of
S_{L+1}-orbits of vertices whose Y-coordinates are pairwise distinct, the
vertex space ``Z^V`` maps onto ``Z^O`` by sending a vertex to the signed
orbit generator (vertices with a repeated Y-coordinate go to 0).  The
reduced group at a cell is ``lim (Lam / T, B)``, where ``T`` is the image
of the quotient kernel (closed under B) and ``Lam = Alt_Z(Z^O) + T`` holds
the Z-alternating elements.  Everything after that is integer linear
algebra on ``(Lam, T, B)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Mapping, Sequence

from .dimension import DEFAULT_RECODING_CAP, LimitGroup, LimitHom, RationalMap, _windows, induced_map
from .errors import CapExceeded, ConstructionError, HypothesisFailure, InputError
from .graph_core import adjacency_matrix
from .linalg import (
    Decomposer,
    IntMatrix,
    Lattice,
    Subspace,
    block_diagonal,
    integer_kernel,
    q_identity,
    q_matmul,
    rational_inverse,
    rational_nullspace,
    smith_normal_form,
    unimodular_inverse,
)
from .sft import (
    SFT,
    BlockCode,
    MultiFibre,
    code_equal,
    compose,
    identity_code,
    is_left_covering,
    is_right_covering,
    is_s_bijective,
    is_u_bijective,
    to_higher_block,
)

DEFAULT_L_CAP = 4
DEFAULT_M_CAP = 4


def _parity(seq: Sequence) -> int:
    inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return -1 if inv % 2 else 1


# ---------------------------------------------------------------------------
# Pairs and covering recodings


@dataclass(frozen=True, eq=False)
class SUPair:
    """``Y --pi_s--> X <--pi_u-- Z``."""

    pi_s: BlockCode
    pi_u: BlockCode
    name: str = ""

    def __post_init__(self) -> None:
        if self.pi_s.target != self.pi_u.target:
            raise InputError("pi_s and pi_u must have the same target")

    @property
    def X(self) -> SFT:
        return self.pi_s.target

    @property
    def Y(self) -> SFT:
        return self.pi_s.source

    @property
    def Z(self) -> SFT:
        return self.pi_u.source

    @classmethod
    def trivial(cls, x: SFT, name: str = "") -> "SUPair":
        ident = identity_code(x)
        return cls(ident, ident, name)

    def validate(self) -> None:
        if not is_s_bijective(self.pi_s):
            raise HypothesisFailure("pi_s is s-bijective", "pi_s fails the s-bijectivity test")
        if not is_u_bijective(self.pi_u):
            raise HypothesisFailure("pi_u is u-bijective", "pi_u fails the u-bijectivity test")

    def reversed(self) -> "SUPair":
        """The pair of the time-reversed shifts (Z takes the role of Y)."""
        return SUPair(self.pi_u.reverse(), self.pi_s.reverse(), self.name)


@dataclass(frozen=True, eq=False)
class Recoded:
    """A code rewritten as a 1-block covering map on a higher block presentation."""

    code: BlockCode
    to_rec: BlockCode
    from_rec: BlockCode


def recode_covering(c: BlockCode, left: bool, cap: int = DEFAULT_RECODING_CAP) -> Recoded:
    """Find a window on which ``c`` is a left (or right) covering and recode there."""
    test = is_left_covering if left else is_right_covering
    for d in _windows(c, cap, prefer_anticipation=left):
        if not test(d.hom):
            continue
        m, a = d.memory, d.anticipation
        to_rec = to_higher_block(c.source, m, a)
        yp = to_rec.target
        code = BlockCode(yp, c.target, {(e.name,): d.hom.edge_map[e.name] for e in yp.graph.edges})
        K = m + a + 1
        rule = {(e.name,): (e.name[0] if K > 1 else e.name) for e in yp.graph.edges}
        from_rec = BlockCode(yp, c.source, rule, -m, m)
        return Recoded(code, to_rec, from_rec)
    kind = "left" if left else "right"
    raise CapExceeded(f"no {kind}-covering recoding within {cap} block levels; raise recoding cap")


# ---------------------------------------------------------------------------
# The grid Sigma_{L,M}


class SigmaComplex:
    """Grid of SFTs with face maps.

    Vertex identifiers of ``sft(L, M)`` must be tuples whose first ``L+1``
    entries are the Y-coordinates and the remaining ``M+1`` the
    Z-coordinates, so that the symmetric groups act by permuting entries.
    ``delta_l(L, M, l)`` maps to ``(L-1, M)`` and ``delta_m(L, M, m)`` to
    ``(L, M-1)``.  Cells outside ``0..L_max`` × ``0..M_max`` are zero.
    """

    L_max: int
    M_max: int
    truncated: bool = False

    def sft(self, L: int, M: int) -> SFT:
        raise NotImplementedError

    def delta_l(self, L: int, M: int, l: int) -> BlockCode:
        raise NotImplementedError

    def delta_m(self, L: int, M: int, m: int) -> BlockCode:
        raise NotImplementedError

    def reversed(self) -> "SigmaComplex":
        raise NotImplementedError

    def cells(self) -> list[tuple[int, int]]:
        return [(L, M) for L in range(self.L_max + 1) for M in range(self.M_max + 1)]


class PairSigma(SigmaComplex):
    """The grid of a pair, built from covering recodings of ``pi_s`` and ``pi_u``."""

    def __init__(
        self,
        pair: SUPair,
        L_cap: int = DEFAULT_L_CAP,
        M_cap: int = DEFAULT_M_CAP,
        recoding_cap: int = DEFAULT_RECODING_CAP,
    ):
        self.pair = pair
        self.L_cap, self.M_cap, self.recoding_cap = L_cap, M_cap, recoding_cap
        self.ys = recode_covering(pair.pi_s, True, recoding_cap)
        self.zs = recode_covering(pair.pi_u, False, recoding_cap)
        self.L_true = _max_fibre(self.ys.code) - 1
        self.M_true = _max_fibre(self.zs.code) - 1
        self.L_max = min(self.L_true, L_cap)
        self.M_max = min(self.M_true, M_cap)
        self.truncated = self.L_true > L_cap or self.M_true > M_cap
        self._mf: dict = {}

    def mf(self, L: int, M: int) -> MultiFibre:
        key = (L, M)
        if key not in self._mf:
            codes = [self.ys.code] * (L + 1) + [self.zs.code] * (M + 1)
            self._mf[key] = MultiFibre(codes, f"Sigma_{L},{M}")
        return self._mf[key]

    def sft(self, L: int, M: int) -> SFT:
        return self.mf(L, M).sft

    def delta_l(self, L: int, M: int, l: int) -> BlockCode:
        return self.mf(L, M).delete(l, self.mf(L - 1, M))

    def delta_m(self, L: int, M: int, m: int) -> BlockCode:
        return self.mf(L, M).delete(L + 1 + m, self.mf(L, M - 1))

    def coordinate(self, L: int, M: int, j: int) -> BlockCode:
        """Coordinate ``j`` as a map into the original Y (j ≤ L) or Z."""
        rec = self.ys if j <= L else self.zs
        return compose(rec.from_rec, self.mf(L, M).projection(j))

    def lift(self, L: int, M: int, maps: Sequence[BlockCode]) -> BlockCode:
        """Map into ``Sigma_{L,M}`` from coordinate maps into the original Y and Z."""
        recs = [self.ys] * (L + 1) + [self.zs] * (M + 1)
        return self.mf(L, M).lift([compose(r.to_rec, f) for r, f in zip(recs, maps)])

    def reversed(self) -> "PairSigma":
        return PairSigma(self.pair.reversed(), self.M_cap, self.L_cap, self.recoding_cap)


def _max_fibre(c: BlockCode) -> int:
    counts: dict = {}
    for v, w in c.hom.vertex_map.items():
        counts[w] = counts.get(w, 0) + 1
    return max(counts.values(), default=0)


class PresentedSigma(SigmaComplex):
    """A grid given explicitly: SFTs per cell and the face codes."""

    def __init__(self, grid: Mapping, delta_l: Mapping, delta_m: Mapping):
        self.grid = dict(grid)
        self._dl = dict(delta_l)
        self._dm = dict(delta_m)
        self.L_max = max(L for L, _ in self.grid)
        self.M_max = max(M for _, M in self.grid)
        for cell in self.cells():
            if cell not in self.grid:
                raise InputError(f"grid is missing cell {cell}")

    def sft(self, L: int, M: int) -> SFT:
        return self.grid[(L, M)]

    def delta_l(self, L: int, M: int, l: int) -> BlockCode:
        return self._dl[(L, M, l)]

    def delta_m(self, L: int, M: int, m: int) -> BlockCode:
        return self._dm[(L, M, m)]

    def reversed(self) -> "PresentedSigma":
        grid, dl, dm = {}, {}, {}
        for (L, M), s in self.grid.items():
            grid[(M, L)] = _rotate_sft(s, L + 1)
        for (L, M, l), c in self._dl.items():
            dm[(M, L, l)] = _rotate_code(c, grid[(M, L)], grid[(M, L - 1)], L + 1, L)
        for (L, M, m), c in self._dm.items():
            dl[(M, L, m)] = _rotate_code(c, grid[(M, L)], grid[(M - 1, L)], L + 1, L + 1)
        return PresentedSigma(grid, dl, dm)


def _rot(t: tuple, k: int) -> tuple:
    return tuple(t[k:]) + tuple(t[:k])


def _rotate_sft(s: SFT, k: int) -> SFT:
    from .graph_core import Edge, Graph

    g = s.graph
    edges = tuple(Edge(_rot(e.name, k), _rot(e.t, k), _rot(e.i, k)) for e in g.edges)
    return SFT(Graph(tuple(_rot(v, k) for v in g.vertices), edges), s.name)


def _rotate_code(c: BlockCode, src: SFT, tgt: SFT, k_src: int, k_tgt: int) -> BlockCode:
    rule = {
        tuple(_rot(e, k_src) for e in reversed(w)): _rot(img, k_tgt)
        for w, img in c.rule.items()
    }
    return BlockCode(src, tgt, rule, c.anticipation, c.memory)


def build_sigma(
    pair: SUPair,
    L_cap: int = DEFAULT_L_CAP,
    M_cap: int = DEFAULT_M_CAP,
    recoding_cap: int = DEFAULT_RECODING_CAP,
) -> PairSigma:
    return PairSigma(pair, L_cap, M_cap, recoding_cap)


def validate_sigma(sc: SigmaComplex) -> None:
    """Check the face maps: bijectivity and the simplicial identities."""
    for L, M in sc.cells():
        for l in range(L + 1 if L else 0):
            if not is_s_bijective(sc.delta_l(L, M, l)):
                raise HypothesisFailure("delta_l is s-bijective", f"cell ({L},{M}), l={l}")
        for m in range(M + 1 if M else 0):
            if not is_u_bijective(sc.delta_m(L, M, m)):
                raise HypothesisFailure("delta_m is u-bijective", f"cell ({L},{M}), m={m}")
        for i in range(L + 1 if L >= 2 else 0):
            for j in range(i + 1, L + 1):
                a = compose(sc.delta_l(L - 1, M, i), sc.delta_l(L, M, j))
                b = compose(sc.delta_l(L - 1, M, j - 1), sc.delta_l(L, M, i))
                if not code_equal(a, b):
                    raise HypothesisFailure("simplicial identity", f"Y faces at ({L},{M})")
        for i in range(M + 1 if M >= 2 else 0):
            for j in range(i + 1, M + 1):
                a = compose(sc.delta_m(L, M - 1, i), sc.delta_m(L, M, j))
                b = compose(sc.delta_m(L, M - 1, j - 1), sc.delta_m(L, M, i))
                if not code_equal(a, b):
                    raise HypothesisFailure("simplicial identity", f"Z faces at ({L},{M})")
        if L and M:
            for l in range(L + 1):
                for m in range(M + 1):
                    a = compose(sc.delta_m(L - 1, M, m), sc.delta_l(L, M, l))
                    b = compose(sc.delta_l(L, M - 1, l), sc.delta_m(L, M, m))
                    if not code_equal(a, b):
                        raise HypothesisFailure("faces commute", f"cell ({L},{M})")


# ---------------------------------------------------------------------------
# Reduced cell groups


class Cell:
    """The reduced group at one grid cell, in orbit and lattice coordinates."""

    def __init__(self, sc: SigmaComplex, L: int, M: int):
        self.L, self.M = L, M
        s = sc.sft(L, M)
        g = s.graph
        self.vertices = g.vertices
        self.index = g.vertex_index
        self.B = adjacency_matrix(g).T
        ny = L + 1
        orbit_id: dict = {}
        self.orbit_of: list = []
        self.reps: list[int] = []
        for v in self.vertices:
            if len(v) != L + M + 2:
                raise InputError(f"vertex {v!r} of cell ({L},{M}) is not a coordinate tuple")
            ys = v[:ny]
            keys = [repr(y) for y in ys]
            if len(set(keys)) < ny:
                self.orbit_of.append(None)
                continue
            order = sorted(range(ny), key=keys.__getitem__)
            rep = tuple(ys[i] for i in order) + tuple(v[ny:])
            if rep not in self.index:
                raise InputError(f"cell ({L},{M}) is not symmetric in the Y-coordinates")
            if rep not in orbit_id:
                orbit_id[rep] = len(self.reps)
                self.reps.append(self.index[rep])
            self.orbit_of.append((orbit_id[rep], _parity(order)))
        n_orb = len(self.reps)
        self.n_orbits = n_orb
        self.Bbar = IntMatrix.from_columns([self.phi(self.B.column(r)) for r in self.reps], n_orb)
        gens = [self.phi(self.B.column(k)) for k, o in enumerate(self.orbit_of) if o is None]
        T = Lattice(n_orb, gens)
        while True:
            nxt = T.join(self.Bbar.apply(b) for b in T.basis)
            if nxt == T:
                break
            T = nxt
        self.T = T
        alt = []
        perms = [(p, _parity(p)) for p in permutations(range(M + 1))]
        for r in self.reps:
            v = self.vertices[r]
            z = v[ny:]
            vec = [0] * n_orb
            for p, sg in perms:
                w = v[:ny] + tuple(z[i] for i in p)
                k = self.index.get(w)
                if k is None:
                    raise InputError(f"cell ({L},{M}) is not symmetric in the Z-coordinates")
                o, s2 = self.orbit_of[k]
                vec[o] += sg * s2
            alt.append(vec)
        self.lam = Lattice(n_orb, alt + [list(b) for b in T.basis])
        self.W = [self.lam.coordinates(t) for t in T.basis]
        cols = []
        for b in self.lam.basis:
            c = self.lam.coordinates(self.Bbar.apply(b))
            if c is None:
                raise ConstructionError(f"cell ({L},{M}): connecting map leaves the alternating lattice")
            cols.append(c)
        self.Bc = IntMatrix.from_columns(cols, self.rank)
        self.W_lattice = Lattice(self.rank, self.W)

    @property
    def rank(self) -> int:
        return self.lam.rank

    def phi(self, vec: Sequence[int]) -> list[int]:
        out = [0] * len(self.reps)
        for k, c in enumerate(vec):
            if c:
                o = self.orbit_of[k]
                if o is not None:
                    out[o[0]] += o[1] * c
        return out

    def kernel_generators(self) -> list[list[int]]:
        """Generators of the kernel of the orbit projection, as vertex vectors."""
        n = len(self.vertices)
        gens = []
        for k, o in enumerate(self.orbit_of):
            if o is None:
                gens.append(_unit(n, k))
            elif self.reps[o[0]] != k:
                v = _unit(n, k)
                v[self.reps[o[0]]] -= o[1]
                gens.append(v)
        return gens

    def to_json(self) -> dict:
        return {
            "cell": [self.L, self.M],
            "vertices": len(self.vertices),
            "orbits": self.n_orbits,
            "rank": self.rank,
            "relations": self.W,
            "connecting": self.Bc.tolist(),
        }


def _unit(n: int, k: int) -> list[int]:
    v = [0] * n
    v[k] = 1
    return v


@dataclass
class _VertexMap:
    """A vertex-level map between cells with its orbit-level data."""

    source: Cell
    target: Cell
    orbit_matrix: IntMatrix
    kernel_images: list
    shift: int


def _vertex_map(src: Cell, tgt: Cell, m: IntMatrix, shift: int) -> _VertexMap:
    om = IntMatrix.from_columns([tgt.phi(m.column(r)) for r in src.reps], tgt.n_orbits)
    kims = [tgt.phi(m.apply(s)) for s in src.kernel_generators()]
    return _VertexMap(src, tgt, om, kims, shift)


def _descend(vm: _VertexMap, j: int) -> IntMatrix | None:
    """Lattice-coordinate matrix of ``B^j`` composed with the map, or None if it does not descend."""
    tgt = vm.target
    bj = tgt.Bbar.power(j)
    for k in vm.kernel_images:
        if any(k) and not tgt.T.contains(bj.apply(k)):
            return None
    cols = []
    full = bj @ vm.orbit_matrix
    for b in vm.source.lam.basis:
        c = tgt.lam.coordinates(full.apply(b))
        if c is None:
            return None
        cols.append(c)
    return IntMatrix.from_columns(cols, tgt.rank)


def _sum_maps(parts: Sequence[tuple[int, LimitHom]]) -> tuple[IntMatrix, int]:
    shift = max(f.level_shift for _, f in parts)
    total = None
    for sign, f in parts:
        m = f.aligned(shift).scale(sign)
        total = m if total is None else total + m
    return total, shift


# ---------------------------------------------------------------------------
# The double complex


class DoubleComplex:
    """Reduced cell groups and boundary maps in lattice coordinates.

    Boundaries are ``B^twist`` times the alternating face sums, with one
    twist for the whole complex, chosen as the least value for which every
    boundary descends to the reduced groups and ``d∘d`` vanishes exactly
    modulo the relations.
    """

    def __init__(self, sc: SigmaComplex, recoding_cap: int = DEFAULT_RECODING_CAP):
        self.sc = sc
        self.recoding_cap = recoding_cap
        self.cells = {c: Cell(sc, *c) for c in sc.cells()}
        raw: dict = {}
        for (L, M), cell in self.cells.items():
            if L >= 1:
                parts = [((-1) ** l, self._induced(sc.delta_l(L, M, l), "s")) for l in range(L + 1)]
                raw[((L, M), (L - 1, M))] = parts
            if (L, M + 1) in self.cells:
                parts = [
                    ((-1) ** (L + m), self._induced(sc.delta_m(L, M + 1, m), "s_star"))
                    for m in range(M + 2)
                ]
                raw[((L, M), (L, M + 1))] = parts
        base_shift = max((f.level_shift for ps in raw.values() for _, f in ps), default=0)
        self.vertex_maps = {}
        for key, parts in raw.items():
            src, tgt = self.cells[key[0]], self.cells[key[1]]
            m = None
            for sign, f in parts:
                a = f.aligned(base_shift).scale(sign)
                m = a if m is None else m + a
            self.vertex_maps[key] = _vertex_map(src, tgt, m, base_shift)
        self.base_shift = base_shift
        limit = max((c.n_orbits for c in self.cells.values()), default=0) + 1
        last_error = ""
        for j in range(limit + 1):
            d, last_error = self._try_twist(j)
            if d is not None:
                self.d = d
                self.twist = j
                break
        else:
            raise ConstructionError(f"boundary does not descend: {last_error}")
        self.shift = base_shift + self.twist

    def _induced(self, code: BlockCode, kind: str) -> LimitHom:
        return induced_map(code, kind, self.recoding_cap, check=False)

    def _try_twist(self, j: int) -> tuple[dict | None, str]:
        d = {}
        for key, vm in self.vertex_maps.items():
            m = _descend(vm, j)
            if m is None:
                return None, f"cell {key[0]} to {key[1]}"
            d[key] = m
        for c, cell in self.cells.items():
            L, M = c
            for c2 in ((L - 2, M), (L - 1, M + 1), (L, M + 2)):
                if c2 not in self.cells:
                    continue
                total = IntMatrix.zeros(self.cells[c2].rank, cell.rank)
                for c1 in ((L - 1, M), (L, M + 1)):
                    if (c, c1) in d and (c1, c2) in d:
                        total = total + d[(c1, c2)] @ d[(c, c1)]
                lat = self.cells[c2].W_lattice
                if any(not lat.contains(col) for col in total.columns()):
                    return None, f"d∘d at cell {c} to {c2}"
        return d, ""

    @property
    def degrees(self) -> range:
        return range(-self.sc.M_max, self.sc.L_max + 1)

    def degree_cells(self, N: int) -> list[tuple[int, int]]:
        return [(L, M) for (L, M) in sorted(self.cells) if L - M == N]

    def total_rank(self, N: int) -> int:
        return sum(self.cells[c].rank for c in self.degree_cells(N))

    def total_boundary(self, N: int) -> IntMatrix:
        """``d_N`` from degree N to degree N-1 as one block matrix."""
        src = self.degree_cells(N)
        tgt = self.degree_cells(N - 1)
        rows = self.total_rank(N - 1)
        cols = self.total_rank(N)
        m = [[0] * cols for _ in range(rows)]
        co = _offsets([self.cells[c].rank for c in src])
        ro = _offsets([self.cells[c].rank for c in tgt])
        for a, cs in enumerate(src):
            for b, ct in enumerate(tgt):
                blk = self.d.get((cs, ct))
                if blk is None:
                    continue
                for i in range(blk.rows):
                    for k in range(blk.cols):
                        m[ro[b] + i][co[a] + k] = blk[i, k]
        return IntMatrix(m, cols)

    def total_relations(self, N: int) -> list[list[int]]:
        cells = self.degree_cells(N)
        n = self.total_rank(N)
        offs = _offsets([self.cells[c].rank for c in cells])
        out = []
        for c, o in zip(cells, offs):
            for w in self.cells[c].W:
                v = [0] * n
                v[o:o + len(w)] = w
                out.append(v)
        return out

    def total_connecting(self, N: int) -> IntMatrix:
        blocks = [self.cells[c].Bc for c in self.degree_cells(N)]
        if not blocks:
            return IntMatrix.zeros(0, 0)
        return block_diagonal(blocks)

    def to_json(self) -> dict:
        return {
            "cells": [self.cells[c].to_json() for c in sorted(self.cells)],
            "boundaries": [
                {"from": list(a), "to": list(b), "matrix": m.tolist()} for (a, b), m in sorted(self.d.items())
            ],
            "level_shift": self.shift,
            "truncated": self.sc.truncated,
        }


def _offsets(sizes: Sequence[int]) -> list[int]:
    out, acc = [], 0
    for s in sizes:
        out.append(acc)
        acc += s
    return out


def boundary(sc: SigmaComplex, side: str = "s", recoding_cap: int = DEFAULT_RECODING_CAP) -> DoubleComplex:
    if side not in ("s", "u"):
        raise ValueError("side must be 's' or 'u'")
    return DoubleComplex(sc if side == "s" else sc.reversed(), recoding_cap)


# ---------------------------------------------------------------------------
# Integer homology


@dataclass
class HomologyGroup:
    """Homology in one degree.

    ``finite_free_rank`` and ``finite_torsion`` describe one stage of the
    direct system; ``presentation`` is the free part as a limit group;
    ``torsion`` is the torsion of the limit.  ``torsion_stable`` says the
    torsion already stops shrinking within ``level_window`` consecutive
    stages, so the finite-stage torsion is the limit torsion.
    """

    N: int
    dim_q: int
    finite_free_rank: int
    finite_torsion: list[int]
    torsion: list[int]
    torsion_stable: bool
    presentation: object

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "dimQ": self.dim_q,
            "finite_stage": {"free_rank": self.finite_free_rank, "torsion": self.finite_torsion},
            "torsion": self.torsion,
            "torsion_stable": self.torsion_stable,
            "presentation": self.presentation.to_json(),
        }


def _integer_group(dc: DoubleComplex, N: int, level_window: int = 2, torsion_cap: int = 64) -> HomologyGroup:
    r = dc.total_rank(N)
    if r == 0:
        return HomologyGroup(N, 0, 0, [], [], True, LimitGroup(0, IntMatrix.zeros(0, 0), f"H_{N}"))
    d = dc.total_boundary(N)
    w_prev = dc.total_relations(N - 1)
    if d.rows:
        rows = [list(d.row(i)) + [-w[i] for w in w_prev] for i in range(d.rows)]
        ker = integer_kernel(rows, r + len(w_prev))
        K = Lattice(r, [k[:r] for k in ker])
    else:
        K = Lattice(r, [_unit(r, i) for i in range(r)])
    bd_gens = dc.total_relations(N)
    if dc.total_rank(N + 1):
        bd_gens += dc.total_boundary(N + 1).columns()
    Bd = Lattice(r, bd_gens)
    k = K.rank
    if k == 0:
        return HomologyGroup(N, 0, 0, [], [], True, LimitGroup(0, IntMatrix.zeros(0, 0), f"H_{N}"))
    coords = []
    for b in Bd.basis:
        c = K.coordinates(b)
        if c is None:
            raise ConstructionError(f"degree {N}: boundary image is not inside the cycles")
        coords.append(c)
    bc = dc.total_connecting(N)
    # connecting map on the cycle lattice, in the lattice basis
    kcols = []
    for b in K.basis:
        c = K.coordinates(bc.apply(b))
        if c is None:
            raise ConstructionError(f"degree {N}: connecting map does not preserve cycles")
        kcols.append(c)
    bk = IntMatrix.from_columns(kcols, k)
    if coords:
        D, U, _ = smith_normal_form(IntMatrix.from_columns(coords, k))
        diag = [abs(D[i, i]) for i in range(min(D.shape)) if D[i, i]]
    else:
        U = IntMatrix.identity(k)
        diag = []
    s = len(diag)
    finite_torsion = [x for x in diag if x > 1]
    Uinv = unimodular_inverse(U)
    bk_new = U @ bk @ Uinv
    free = k - s
    lower = IntMatrix([[bk_new[i, j] for j in range(s, k)] for i in range(s, k)], free)
    pres = LimitGroup(free, lower, f"H_{N}")
    # Torsion of the limit is the stable image of the torsion part under B;
    # it is reached once B(L) + Bd = L.
    bd_k = Lattice(k, coords)
    img = [Uinv.column(i) for i in range(s)]
    cur = bd_k.join(img)
    steps = None
    for step in range(torsion_cap):
        img = [bk.apply(v) for v in img]
        nxt = bd_k.join(img)
        if nxt == cur:
            steps = step
            break
        cur = nxt
    torsion = []
    if cur.rank and bd_k.rank:
        cc = [cur.coordinates(b) for b in bd_k.basis]
        Dt, _, _ = smith_normal_form(IntMatrix.from_columns(cc, cur.rank))
        torsion = [abs(Dt[i, i]) for i in range(min(Dt.shape)) if abs(Dt[i, i]) > 1]
    stable = steps is not None and steps < level_window - 1
    return HomologyGroup(N, pres.rational_dim, free, finite_torsion, torsion, stable, pres)


# ---------------------------------------------------------------------------
# Rational route


class _RCell:
    """``(Lam / T) ⊗ Q`` restricted to the eventual range of B."""

    def __init__(self, cell: Cell):
        self.cell = cell
        r = cell.rank
        self.wsub = Subspace(r, cell.W)
        piv = set(self.wsub.pivots)
        self.free = [i for i in range(r) if i not in piv]
        q = len(self.free)
        self.q = q
        bq = [self.proj(cell.Bc.column(self.free[j])) for j in range(q)]
        self.Bq = [[bq[j][i] for j in range(q)] for i in range(q)]  # columns -> rows
        pw = self._power(q)
        self.R = Subspace(q, [[pw[i][j] for i in range(q)] for j in range(q)]).basis if q else []
        self.dim = len(self.R)
        self.dec = Decomposer(q, self.R)
        cols = [self.dec.split(self.apply_Bq(v)) for v in self.R]
        self.BR = [[cols[j][i] for j in range(self.dim)] for i in range(self.dim)]
        self.BR_inv = rational_inverse(self.BR) if self.dim else []

    def proj(self, v: Sequence) -> list[Fraction]:
        red = self.wsub.reduce([Fraction(x) for x in v])
        return [red[i] for i in self.free]

    def lift(self, u: Sequence[Fraction]) -> list[Fraction]:
        v = [Fraction(0)] * self.cell.rank
        for i, x in zip(self.free, u):
            v[i] = x
        return v

    def apply_Bq(self, v: Sequence[Fraction]) -> list[Fraction]:
        return [sum((self.Bq[i][j] * v[j] for j in range(self.q) if v[j]), Fraction(0)) for i in range(self.q)]

    def _power(self, k: int) -> list[list[Fraction]]:
        out = q_identity(self.q)
        for _ in range(k):
            out = q_matmul(self.Bq, out, self.q) if self.q else out
        return out

    def inv_power(self, k: int) -> list[list[Fraction]]:
        out = q_identity(self.dim)
        base = self.BR_inv if k >= 0 else self.BR
        for _ in range(abs(k)):
            out = q_matmul(base, out, self.dim)
        return out


def _limit_matrix(src: _RCell, tgt: _RCell, m: IntMatrix, shift: int) -> list[list[Fraction]]:
    """A lattice-coordinate map with level shift, in eventual-range coordinates."""
    if src.dim == 0 or tgt.dim == 0:
        return [[Fraction(0)] * src.dim for _ in range(tgt.dim)]
    cols = []
    for u in src.R:
        x = src.lift(u)
        v = [sum((m[i, j] * x[j] for j in range(m.cols) if m[i, j] and x[j]), Fraction(0)) for i in range(m.rows)]
        w = tgt.proj(v)
        for _ in range(tgt.q):
            w = tgt.apply_Bq(w)
        c = tgt.dec.split(w)
        if c is None:
            raise ConstructionError("image left the eventual range")
        cols.append(c)
    coords = [[cols[j][i] for j in range(src.dim)] for i in range(tgt.dim)]
    return q_matmul(tgt.inv_power(shift + tgt.q), coords, tgt.dim)


def _qapply(m: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> list[Fraction]:
    return [sum((row[j] * v[j] for j in range(len(v)) if v[j]), Fraction(0)) for row in m]


class RationalHomology:
    """Homology of the rationalized limit complex, with chosen bases."""

    def __init__(self, dc: DoubleComplex):
        self.dc = dc
        self.rcells = {c: _RCell(cell) for c, cell in dc.cells.items()}
        self.dR = {
            key: _limit_matrix(self.rcells[key[0]], self.rcells[key[1]], m, dc.shift)
            for key, m in dc.d.items()
        }
        self.basis: dict = {}
        self.dims: dict = {}
        self._dec: dict = {}
        for N in range(min(dc.degrees) - 1, max(dc.degrees) + 2):
            self._degree(N)

    def cells(self, N: int) -> list:
        return self.dc.degree_cells(N)

    def size(self, N: int) -> int:
        return sum(self.rcells[c].dim for c in self.cells(N))

    def total(self, N: int) -> list[list[Fraction]]:
        src, tgt = self.cells(N), self.cells(N - 1)
        co = _offsets([self.rcells[c].dim for c in src])
        ro = _offsets([self.rcells[c].dim for c in tgt])
        rows, cols = self.size(N - 1), self.size(N)
        m = [[Fraction(0)] * cols for _ in range(rows)]
        for a, cs in enumerate(src):
            for b, ct in enumerate(tgt):
                blk = self.dR.get((cs, ct))
                if blk is None:
                    continue
                for i, row in enumerate(blk):
                    for k, x in enumerate(row):
                        m[ro[b] + i][co[a] + k] = x
        return m

    def _degree(self, N: int) -> None:
        n = self.size(N)
        d = self.total(N)
        ker = rational_nullspace(d, n) if d else q_identity(n)
        up = self.total(N + 1)
        im_vecs = [[up[i][j] for i in range(n)] for j in range(self.size(N + 1))] if up else []
        im = Subspace(n, im_vecs)
        chosen = list(im.basis)
        hb = []
        span = Subspace(n, chosen)
        for v in ker:
            if not span.contains(v):
                hb.append(v)
                chosen.append(v)
                span = span.join([v])
        self.basis[N] = hb
        self.dims[N] = len(hb)
        self._dec[N] = (Decomposer(n, chosen) if n else None, len(chosen) - len(hb))

    def coordinates(self, N: int, v: Sequence[Fraction]) -> list[Fraction]:
        """Homology class coordinates of a cycle."""
        dec, skip = self._dec[N]
        if dec is None:
            return []
        c = dec.split(v)
        if c is None:
            raise ConstructionError(f"degree {N}: vector is not a cycle")
        return c[skip:]


# ---------------------------------------------------------------------------
# Results


@dataclass
class HomologyResult:
    side: str
    groups: dict
    complex: DoubleComplex = field(repr=False)
    rational: RationalHomology = field(repr=False)
    truncated: bool = False

    def dim_q(self, N: int) -> int:
        g = self.groups.get(N)
        return g.dim_q if g else 0

    def to_json(self) -> dict:
        return {
            "side": self.side,
            "truncated": self.truncated,
            "degrees": [self.groups[N].to_json() for N in sorted(self.groups)],
        }


def homology_of_complex(dc: DoubleComplex, side: str = "s", level_window: int = 2) -> HomologyResult:
    rat = RationalHomology(dc)
    groups = {}
    for N in dc.degrees:
        g = _integer_group(dc, N, level_window)
        if g.dim_q != rat.dims.get(N, 0):
            raise ConstructionError(
                f"degree {N}: integer route gives dim {g.dim_q}, rational route {rat.dims.get(N, 0)}"
            )
        groups[N] = g
    return HomologyResult(side, groups, dc, rat, dc.sc.truncated)


def homology(
    pair: SUPair | SigmaComplex,
    side: str = "s",
    L_cap: int = DEFAULT_L_CAP,
    M_cap: int = DEFAULT_M_CAP,
    recoding_cap: int = DEFAULT_RECODING_CAP,
    level_window: int = 2,
) -> HomologyResult:
    """Homology of a pair (or of an explicitly given grid).

    The u-side is the s-side of the time-reversed pair; its degree is
    ``M - L`` in the original indexing.
    """
    if side not in ("s", "u"):
        raise ValueError("side must be 's' or 'u'")
    if isinstance(pair, SUPair):
        if side == "u":
            pair = pair.reversed()
            L_cap, M_cap = M_cap, L_cap
        sc = build_sigma(pair, L_cap, M_cap, recoding_cap)
    else:
        sc = pair if side == "s" else pair.reversed()
    return homology_of_complex(DoubleComplex(sc, recoding_cap), side, level_window)


# ---------------------------------------------------------------------------
# Chain maps and maps on homology


@dataclass
class ChainMap:
    """Per-cell maps between two complexes in eventual-range coordinates."""

    source: HomologyResult
    target: HomologyResult
    cells: dict

    def on_degree(self, N: int) -> list[list[Fraction]]:
        src_h, tgt_h = self.source.rational, self.target.rational
        rows, cols = tgt_h.size(N), src_h.size(N)
        m = [[Fraction(0)] * cols for _ in range(rows)]
        sc, tc = src_h.cells(N), tgt_h.cells(N)
        co = _offsets([src_h.rcells[c].dim for c in sc])
        ro = _offsets([tgt_h.rcells[c].dim for c in tc])
        for a, c in enumerate(sc):
            if c not in self.cells or c not in tgt_h.rcells:
                continue
            b = tc.index(c)
            for i, row in enumerate(self.cells[c]):
                for k, x in enumerate(row):
                    m[ro[b] + i][co[a] + k] = x
        return m

    def check(self) -> None:
        """``f d = d' f`` in every degree, exactly over Q."""
        src_h, tgt_h = self.source.rational, self.target.rational
        for N in self.source.complex.degrees:
            f_hi = self.on_degree(N)
            f_lo = self.on_degree(N - 1)
            d_src = src_h.total(N)
            d_tgt = tgt_h.total(N)
            lhs = q_matmul(f_lo, d_src, src_h.size(N - 1)) if f_lo and d_src else None
            rhs = q_matmul(d_tgt, f_hi, tgt_h.size(N)) if d_tgt and f_hi else None
            if not _same(lhs, rhs, tgt_h.size(N - 1), src_h.size(N)):
                raise ConstructionError(f"chain map does not commute with the boundary in degree {N}")

    def on_homology(self, N: int):
        src_h, tgt_h = self.source.rational, self.target.rational
        hb = src_h.basis.get(N, [])
        if N not in tgt_h.dims:
            return RationalMap(0, len(hb), ())
        f = self.on_degree(N)
        cols = [tgt_h.coordinates(N, _qapply(f, v)) if f else [] for v in hb]
        rows = tgt_h.dims.get(N, 0)
        entries = tuple(tuple(cols[j][i] for j in range(len(hb))) for i in range(rows))
        return RationalMap(rows, len(hb), entries)


def _same(a, b, rows: int, cols: int) -> bool:
    zero = [[Fraction(0)] * cols for _ in range(rows)]
    return (a if a is not None else zero) == (b if b is not None else zero)


def chain_map(
    source: HomologyResult,
    target: HomologyResult,
    cell_maps: Mapping[tuple[int, int], LimitHom],
    check: bool = True,
) -> ChainMap:
    """Assemble vertex-level maps ``D(Sigma_{L,M}) → D(Sigma'_{L,M})`` into a chain map."""
    out = {}
    for c, f in cell_maps.items():
        if c not in source.complex.cells or c not in target.complex.cells:
            continue
        src, tgt = source.complex.cells[c], target.complex.cells[c]
        vm = _vertex_map(src, tgt, f.matrix, f.level_shift)
        limit = tgt.n_orbits + 1
        for j in range(limit + 1):
            m = _descend(vm, j)
            if m is not None:
                break
        else:
            raise ConstructionError(f"cell map at {c} does not descend to the reduced groups")
        out[c] = _limit_matrix(source.rational.rcells[c], target.rational.rcells[c], m, f.level_shift + j)
    cm = ChainMap(source, target, out)
    if check:
        cm.check()
    return cm


@dataclass(frozen=True, eq=False)
class PairMorphism:
    """Codes ``(eta_X, eta_Y, eta_Z)`` from one pair to another, commuting with both legs."""

    source: SUPair
    target: SUPair
    eta_X: BlockCode
    eta_Y: BlockCode
    eta_Z: BlockCode

    def __post_init__(self) -> None:
        if not code_equal(compose(self.eta_X, self.source.pi_s), compose(self.target.pi_s, self.eta_Y)):
            raise HypothesisFailure("Y square commutes", "eta_X ∘ pi_s ≠ pi'_s ∘ eta_Y")
        if not code_equal(compose(self.eta_X, self.source.pi_u), compose(self.target.pi_u, self.eta_Z)):
            raise HypothesisFailure("Z square commutes", "eta_X ∘ pi_u ≠ pi'_u ∘ eta_Z")


def _product_into_fibre(first: BlockCode, second: BlockCode, over_first: BlockCode, over_second: BlockCode):
    """The map ``w ↦ (first w, second w)`` into FP(over_first, over_second)."""
    mf = MultiFibre([over_first, over_second])
    return mf.lift([first, second])


def check_product_conjugacy(first: BlockCode, second: BlockCode, over_first: BlockCode,
                            over_second: BlockCode, label: str) -> BlockCode:
    """Raise the named failure unless ``first × second`` is a conjugacy onto the fibre product."""
    from .sft import is_injective, is_surjective

    p = _product_into_fibre(first, second, over_first, over_second)
    if not is_injective(p):
        raise HypothesisFailure(f"product map {label} not 1-to-1")
    if not is_surjective(p):
        raise HypothesisFailure(f"product map {label} not onto")
    return p


def sigma_map(src: PairSigma, tgt: PairSigma, L: int, M: int, eta_Y: BlockCode, eta_Z: BlockCode) -> BlockCode:
    """Coordinatewise map ``Sigma_{L,M} → Sigma'_{L,M}``."""
    maps = [compose(eta_Y, src.coordinate(L, M, j)) for j in range(L + 1)]
    maps += [compose(eta_Z, src.coordinate(L, M, L + 1 + j)) for j in range(M + 1)]
    return tgt.lift(L, M, maps)


@dataclass
class InducedOnHomology:
    case: str
    source: HomologyResult
    target: HomologyResult
    chain: ChainMap
    maps: dict

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "maps": {str(N): [[str(x) for x in row] for row in m.tolist()] for N, m in sorted(self.maps.items())},
        }


def induced_on_homology(
    eta: PairMorphism,
    case: str = "s",
    L_cap: int = DEFAULT_L_CAP,
    M_cap: int = DEFAULT_M_CAP,
    recoding_cap: int = DEFAULT_RECODING_CAP,
) -> InducedOnHomology:
    """The map a morphism of pairs induces on stable homology.

    Case ``s`` needs ``pi_u × eta_Z`` to be a conjugacy onto the fibre
    product of ``eta_X`` and ``pi'_u`` and gives a covariant map; case ``u``
    needs ``pi_s × eta_Y`` to be one and gives a contravariant map.
    """
    if case not in ("s", "u"):
        raise ValueError("case must be 's' or 'u'")
    src, tgt = eta.source, eta.target
    if case == "s":
        check_product_conjugacy(src.pi_u, eta.eta_Z, eta.eta_X, tgt.pi_u, "π_u × η_Z")
    else:
        check_product_conjugacy(src.pi_s, eta.eta_Y, eta.eta_X, tgt.pi_s, "π_s × η_Y")
    sc_src = build_sigma(src, L_cap, M_cap, recoding_cap)
    sc_tgt = build_sigma(tgt, L_cap, M_cap, recoding_cap)
    h_src = homology_of_complex(DoubleComplex(sc_src, recoding_cap))
    h_tgt = homology_of_complex(DoubleComplex(sc_tgt, recoding_cap))
    cell_maps = {}
    for c in sc_src.cells():
        if c not in h_tgt.complex.cells:
            continue
        code = sigma_map(sc_src, sc_tgt, *c, eta.eta_Y, eta.eta_Z)
        kind = "s" if case == "s" else "s_star"
        cell_maps[c] = induced_map(code, kind, recoding_cap, check=False)
    if case == "s":
        cm = chain_map(h_src, h_tgt, cell_maps)
    else:
        cm = chain_map(h_tgt, h_src, cell_maps)
    maps = {N: cm.on_homology(N) for N in cm.source.complex.degrees}
    return InducedOnHomology(case, cm.source, cm.target, cm, maps)
